// Brute-force reference for MR-instance discovery. Every (assertion, pair of
// same-class invocations, e1, e2) combination is tried against the pattern
// rules, with operand membership decided by expanding each operand into the
// set of value keys it is built from. Shares the dataflow layer with the
// implementation but none of its matching code.
#pragma once

#include <set>
#include <string>
#include <tuple>

#include "mrmine/dataflow.h"
#include "mrmine/discovery.h"

namespace mrmine::testing {

using OracleInstance = std::tuple<int, ir::InvocationId, ir::InvocationId, discovery::Pattern>;

namespace oracle_detail {

using Env = std::map<std::string, int>;

struct Expander {
  const dataflow::TestAnalysis& a;
  const ir::ProjectModel& m;
  std::set<std::string> keys;
  std::set<int> done;
  bool bottom = false;

  void expr(const ir::Expression& e, const Env& env) {
    auto k = dataflow::value_key(e, env, a.flow);
    if (!k) {
      bottom = true;
      return;
    }
    keys.insert(*k);
    if (const auto* v = std::get_if<ir::VarRef>(&e.node)) {
      version(env.at(v->name));
    } else if (const auto* f = std::get_if<ir::FieldAccess>(&e.node)) {
      expr(*f->base, env);
    } else if (const auto* b = std::get_if<ir::BinaryExpr>(&e.node)) {
      expr(*b->lhs, env);
      expr(*b->rhs, env);
    } else if (const auto* u = std::get_if<ir::UnaryExpr>(&e.node)) {
      expr(*u->operand, env);
    } else if (const auto* n = std::get_if<ir::NewExpr>(&e.node)) {
      for (const auto& x : n->args) expr(x, env);
    } else if (const auto* c = std::get_if<ir::CallExpr>(&e.node)) {
      const auto* inv = a.flow.find(c->call->id);
      if (inv && inv->ret) version(*inv->ret);
    }
  }

  void version(int v) {
    if (!done.insert(v).second) return;
    const auto& ver = a.flow.versions.at(static_cast<std::size_t>(v));
    switch (ver.kind) {
      case dataflow::VersionKind::Unknown:
        bottom = true;
        return;
      case dataflow::VersionKind::Def: {
        const auto& s = a.tc->statements.at(static_cast<std::size_t>(ver.stmt));
        const auto& env = a.flow.env_before.at(static_cast<std::size_t>(ver.stmt));
        if (const auto* d = std::get_if<ir::VarDecl>(&s.node)) expr(d->init, env);
        if (const auto* as = std::get_if<ir::Assignment>(&s.node)) expr(as->value, env);
        return;
      }
      case dataflow::VersionKind::Ret: {
        const auto* inv = a.flow.find(ver.call);
        // Values produced by the class under test are leaves; anything else
        // is looked through to what it was computed from.
        if (!inv || m.is_internal(inv->call->class_fqn)) return;
        if (inv->call->receiver) expr(*inv->call->receiver, inv->env_before);
        for (const auto& x : inv->call->args) expr(x, inv->env_before);
        return;
      }
      default:
        return;
    }
  }
};

inline std::optional<std::set<std::string>> expand(const std::vector<const ir::Expression*>& es, const Env& env,
                                                   const dataflow::TestAnalysis& a, const ir::ProjectModel& m) {
  std::set<std::string> out;
  for (const auto* e : es) {
    Expander x{a, m, {}, {}, false};
    x.expr(*e, env);
    if (x.bottom) return std::nullopt;
    out.insert(x.keys.begin(), x.keys.end());
  }
  return out;
}

struct Split {
  discovery::Pattern pattern;
  std::set<std::string> lhs, rhs;
  std::optional<ir::InvocationId> connective;
};

inline bool logical(const ir::Expression& e) {
  if (const auto* b = std::get_if<ir::BinaryExpr>(&e.node))
    return b->op == ir::BinOp::And || b->op == ir::BinOp::Or;
  if (const auto* u = std::get_if<ir::UnaryExpr>(&e.node)) return u->op == ir::UnOp::Not;
  return false;
}

inline std::optional<Split> bool_split(const ir::Expression& e, const Env& env, const dataflow::TestAnalysis& a,
                                       const ir::ProjectModel& m, int guard = 0);

inline std::optional<Split> call_split(const dataflow::InvocationFlow& inv, const dataflow::TestAnalysis& a,
                                       const ir::ProjectModel& m) {
  const auto& mi = *inv.call;
  if (!m.is_internal(mi.class_fqn)) return std::nullopt;
  const auto* decl = m.find_class(mi.class_fqn)->find_method(mi.method, mi.args.size());
  if (!decl || decl->return_type != ir::Type::Bool()) return std::nullopt;
  std::vector<const ir::Expression*> l, r;
  if (mi.receiver) {
    l.push_back(&*mi.receiver);
    for (const auto& x : mi.args) r.push_back(&x);
  } else {
    for (std::size_t i = 0; i < mi.args.size(); ++i) (i == 0 ? l : r).push_back(&mi.args[i]);
  }
  if (l.empty() || r.empty()) return std::nullopt;
  auto ls = expand(l, inv.env_before, a, m);
  auto rs = expand(r, inv.env_before, a, m);
  if (!ls || !rs) return std::nullopt;
  return Split{discovery::Pattern::BoolAssert, *ls, *rs, mi.id};
}

inline std::optional<Split> bool_split(const ir::Expression& e, const Env& env, const dataflow::TestAnalysis& a,
                                       const ir::ProjectModel& m, int guard) {
  if (guard > 64) return std::nullopt;
  if (const auto* b = std::get_if<ir::BinaryExpr>(&e.node)) {
    static const std::set<ir::BinOp> cmp{ir::BinOp::Eq, ir::BinOp::Ne, ir::BinOp::Lt,
                                         ir::BinOp::Gt, ir::BinOp::Le, ir::BinOp::Ge};
    if (!cmp.count(b->op)) return std::nullopt;
    auto ls = expand({&*b->lhs}, env, a, m);
    auto rs = expand({&*b->rhs}, env, a, m);
    if (!ls || !rs) return std::nullopt;
    return Split{discovery::Pattern::BoolAssert, *ls, *rs, std::nullopt};
  }
  if (const auto* c = std::get_if<ir::CallExpr>(&e.node)) {
    const auto* inv = a.flow.find(c->call->id);
    return inv ? call_split(*inv, a, m) : std::nullopt;
  }
  if (const auto* v = std::get_if<ir::VarRef>(&e.node)) {
    auto it = env.find(v->name);
    if (it == env.end()) return std::nullopt;
    const auto& ver = a.flow.versions.at(static_cast<std::size_t>(it->second));
    if (ver.kind == dataflow::VersionKind::Def) {
      const auto& s = a.tc->statements.at(static_cast<std::size_t>(ver.stmt));
      const auto& denv = a.flow.env_before.at(static_cast<std::size_t>(ver.stmt));
      if (const auto* d = std::get_if<ir::VarDecl>(&s.node)) return bool_split(d->init, denv, a, m, guard + 1);
      if (const auto* as = std::get_if<ir::Assignment>(&s.node)) return bool_split(as->value, denv, a, m, guard + 1);
    } else if (ver.kind == dataflow::VersionKind::Ret) {
      const auto* inv = a.flow.find(ver.call);
      return inv ? call_split(*inv, a, m) : std::nullopt;
    }
  }
  return std::nullopt;
}

inline std::optional<Split> split(const ir::Assertion& as, const dataflow::TestAnalysis& a,
                                  const ir::ProjectModel& m) {
  const Env& env = a.flow.env_before.at(static_cast<std::size_t>(as.id.stmt));
  if (as.api == ir::AssertApi::AssertTrue || as.api == ir::AssertApi::AssertFalse)
    return as.operands.size() == 1 ? bool_split(as.operands[0], env, a, m) : std::nullopt;
  if (as.operands.size() != 2 || logical(as.operands[0]) || logical(as.operands[1])) return std::nullopt;
  auto ls = expand({&as.operands[0]}, env, a, m);
  auto rs = expand({&as.operands[1]}, env, a, m);
  if (!ls || !rs) return std::nullopt;
  return Split{discovery::Pattern::CompAssert, *ls, *rs, std::nullopt};
}

}  // namespace oracle_detail

inline std::set<OracleInstance> brute_force_instances(const dataflow::TestAnalysis& a, const ir::ProjectModel& m) {
  using namespace oracle_detail;
  std::set<OracleInstance> out;
  // All invocations of internal classes, in statement order.
  std::vector<const dataflow::InvocationFlow*> calls;
  for (const auto& inv : a.flow.invocations)
    if (m.is_internal(inv.call->class_fqn)) calls.push_back(&inv);
  for (const auto& s : a.tc->statements) {
    const auto* as = std::get_if<ir::AssertionStmt>(&s.node);
    if (!as) continue;
    auto sp = split(as->assertion, a, m);
    if (!sp) continue;
    for (const auto* c1 : calls) {
      for (const auto* c2 : calls) {
        if (c1->call->class_fqn != c2->call->class_fqn) continue;
        if (c1->id.stmt >= c2->id.stmt) continue;
        if (sp->connective && (c1->id == *sp->connective || c2->id == *sp->connective)) continue;
        auto io1 = a.io.find(c1->id);
        auto io2 = a.io.find(c2->id);
        if (io1 == a.io.end() || io2 == a.io.end()) continue;
        std::vector<dataflow::Element> first = io1->second.X;
        first.insert(first.end(), io1->second.Y.begin(), io1->second.Y.end());
        bool match = false;
        for (const auto& e1 : first) {
          for (const auto& e2 : io2->second.Y) {
            if (!e1.key || !e2.key) continue;
            bool fwd = sp->lhs.count(*e1.key) && sp->rhs.count(*e2.key);
            bool bwd = sp->rhs.count(*e1.key) && sp->lhs.count(*e2.key);
            match = match || fwd || bwd;
          }
        }
        if (match) out.insert({as->assertion.id.stmt, c1->id, c2->id, sp->pattern});
      }
    }
  }
  return out;
}

inline std::set<OracleInstance> discovered_instances(const discovery::DiscoveryResult& r) {
  std::set<OracleInstance> out;
  for (const auto& i : r.instances) out.insert({i.alpha.assertion.stmt, i.alpha.mi1, i.alpha.mi2, i.alpha.pattern});
  return out;
}

}  // namespace mrmine::testing
