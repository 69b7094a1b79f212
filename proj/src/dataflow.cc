#include "mrmine/dataflow.h"

#include <algorithm>

#include "mrmine/builtins.h"
#include "mrmine/printer.h"

namespace mrmine::dataflow {

using namespace mrmine::ir;

// ---------------------------------------------------------------------------
// Reaching definitions

int DefUseGraph::reaching_def(int stmt, const std::string& var) const {
  auto it = reaching.find({stmt, var});
  return it == reaching.end() ? kUndefined : it->second;
}

std::set<std::string> opaque_identifiers(const std::string& text) {
  std::set<std::string> out;
  std::size_t i = 0;
  auto start = [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
  };
  auto part = [&](char c) { return start(c) || (c >= '0' && c <= '9'); };
  while (i < text.size()) {
    char c = text[i];
    if (c == '"') {
      for (++i; i < text.size() && text[i] != '"'; ++i)
        if (text[i] == '\\') ++i;
      ++i;
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == '/' && i + 1 < text.size() && text[i + 1] == '*') {
      auto end = text.find("*/", i + 2);
      i = end == std::string::npos ? text.size() : end + 2;
    } else if (start(c)) {
      std::size_t b = i;
      while (i < text.size() && part(text[i])) ++i;
      out.insert(text.substr(b, i - b));
    } else if (c >= '0' && c <= '9') {
      while (i < text.size() && part(text[i])) ++i;
    } else {
      ++i;
    }
  }
  return out;
}

namespace {

std::set<std::string> vars_of(const Expression& e) {
  std::vector<std::string> v;
  collect_vars(e, v);
  return {v.begin(), v.end()};
}

std::set<std::string> statement_uses(const Statement& s) {
  std::set<std::string> out;
  auto add = [&](const Expression& e) {
    auto v = vars_of(e);
    out.insert(v.begin(), v.end());
  };
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VarDecl>) {
          add(n.init);
        } else if constexpr (std::is_same_v<N, Assignment>) {
          if (!std::holds_alternative<VarRef>(n.target.node)) add(n.target);
          add(n.value);
        } else if constexpr (std::is_same_v<N, InvocationStmt>) {
          if (n.call.receiver) add(*n.call.receiver);
          for (const auto& a : n.call.args) add(a);
        } else if constexpr (std::is_same_v<N, AssertionStmt>) {
          for (const auto& o : n.assertion.operands) add(o);
        } else if constexpr (std::is_same_v<N, ThrowStmt>) {
          add(n.message);
        } else if constexpr (std::is_same_v<N, OpaqueRegion>) {
          out = opaque_identifiers(n.text);
        } else if constexpr (std::is_same_v<N, ReturnStmt>) {
          if (n.value) add(*n.value);
        } else if constexpr (std::is_same_v<N, IfStmt>) {
          add(n.cond);
        } else if constexpr (std::is_same_v<N, WhileStmt>) {
          add(n.cond);
        }
      },
      s.node);
  return out;
}

// Variable (re)bound by a statement; a field store redefines its root.
std::optional<std::string> statement_def(const Statement& s) {
  if (const auto* d = std::get_if<VarDecl>(&s.node)) return d->name;
  if (const auto* a = std::get_if<Assignment>(&s.node)) return root_variable(a->target);
  return std::nullopt;
}

}  // namespace

DefUseGraph build_def_use(const TestCaseIR& tc) {
  DefUseGraph g;
  std::map<std::string, int> last;  // current reaching definition
  for (const auto& p : tc.params) last[p.name] = kParamDef;
  for (std::size_t i = 0; i < tc.statements.size(); ++i) {
    const Statement& s = tc.statements[i];
    int idx = static_cast<int>(i);
    auto uses = statement_uses(s);
    if (!uses.empty()) g.uses[idx] = uses;
    bool opaque = std::holds_alternative<OpaqueRegion>(s.node);
    for (const auto& u : uses) {
      auto it = last.find(u);
      g.reaching[{idx, u}] = (opaque || it == last.end()) ? kUndefined : it->second;
    }
    if (opaque) {
      g.opaque_regions.insert(idx);
      for (const auto& u : uses) last[u] = kUndefined;
      continue;
    }
    if (auto d = statement_def(s)) {
      g.defs[*d].insert(idx);
      last[*d] = idx;
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Summaries

std::string summary_key(const std::string& class_fqn, const std::string& method, std::size_t arity) {
  return class_fqn + "#" + method + "/" + std::to_string(arity);
}

const MethodSummary* find_summary(const Summaries& s, const MethodInvocation& mi) {
  auto it = s.find(summary_key(mi.class_fqn, mi.method, mi.args.size()));
  return it == s.end() ? nullptr : &it->second;
}

namespace {

constexpr int kThis = -1;
constexpr int kFresh = -2;
constexpr int kUnknownRoot = -3;

using Roots = std::set<int>;

class SummaryBuilder {
 public:
  SummaryBuilder(const ProjectModel& model) : model_(model) {}

  MethodSummary summarize(const ClassDecl& cls, const MethodDecl& md, int depth) {
    std::string key = summary_key(cls.fqn, md.name, md.params.size());
    auto memo = memo_.find({key, depth});
    if (memo != memo_.end()) return memo->second;
    stack_.push_back(key);
    Frame f{cls, md, depth, {}, {}};
    f.result.writes_arg.assign(md.params.size(), false);
    for (std::size_t i = 0; i < md.params.size(); ++i) f.env[md.params[i].name] = {static_cast<int>(i)};
    body(f, md.body, false);
    stack_.pop_back();
    memo_[{key, depth}] = f.result;
    return f.result;
  }

 private:
  struct Frame {
    const ClassDecl& cls;
    const MethodDecl& md;
    int depth;
    std::map<std::string, Roots> env;
    MethodSummary result;
  };

  Roots roots(Frame& f, const Expression& e) {
    if (const auto* v = std::get_if<VarRef>(&e.node)) {
      if (v->name == "this") return {kThis};
      auto it = f.env.find(v->name);
      return it == f.env.end() ? Roots{kUnknownRoot} : it->second;
    }
    if (const auto* fa = std::get_if<FieldAccess>(&e.node)) return roots(f, *fa->base);
    if (const auto* c = std::get_if<CallExpr>(&e.node)) {
      const ClassDecl* cls = model_.find_class(c->call->class_fqn);
      const MethodDecl* m = cls ? cls->find_method(c->call->method, c->call->args.size()) : nullptr;
      if (m && m->return_type && !m->return_type->is_object()) return {kFresh};
      if (builtins::is_builtin_class(c->call->class_fqn)) return {kFresh};
      return {kUnknownRoot};
    }
    return {kFresh};
  }

  void effect(Frame& f, const Roots& rs, bool is_read) {
    for (int r : rs) {
      if (r == kThis) {
        (is_read ? f.result.reads_receiver : f.result.writes_receiver) = true;
      } else if (r >= 0) {
        if (!is_read) f.result.writes_arg[static_cast<std::size_t>(r)] = true;
      } else if (r == kUnknownRoot && !is_read) {
        f.result.inconclusive = true;
      }
    }
  }

  void scan_reads(Frame& f, const Expression& e) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, VarRef>) {
            // `this` escaping into a new object or return value.
            if (n.name == "this") f.result.reads_receiver = true;
          } else if constexpr (std::is_same_v<N, FieldAccess>) {
            effect(f, roots(f, *n.base), true);
            scan_reads(f, *n.base);
          } else if constexpr (std::is_same_v<N, BinaryExpr>) {
            scan_reads(f, *n.lhs);
            scan_reads(f, *n.rhs);
          } else if constexpr (std::is_same_v<N, UnaryExpr>) {
            scan_reads(f, *n.operand);
          } else if constexpr (std::is_same_v<N, NewExpr>) {
            for (const auto& a : n.args) scan_reads(f, a);
          } else if constexpr (std::is_same_v<N, CallExpr>) {
            if (n.call->receiver) scan_reads(f, *n.call->receiver);
            for (const auto& a : n.call->args) scan_reads(f, a);
          }
        },
        e.node);
  }

  void call(Frame& f, const MethodInvocation& mi) {
    if (builtins::is_builtin_class(mi.class_fqn)) return;
    const ClassDecl* cls = model_.find_class(mi.class_fqn);
    const MethodDecl* callee = cls ? cls->find_method(mi.method, mi.args.size()) : nullptr;
    if (!callee || f.depth == 0) {
      f.result.inconclusive = true;
      return;
    }
    std::string key = summary_key(cls->fqn, callee->name, callee->params.size());
    if (std::find(stack_.begin(), stack_.end(), key) != stack_.end()) {
      f.result.inconclusive = true;
      return;
    }
    MethodSummary s = summarize(*cls, *callee, f.depth - 1);
    if (s.inconclusive) {
      f.result.inconclusive = true;
      return;
    }
    Roots recv;
    if (mi.receiver) {
      recv = roots(f, *mi.receiver);
    } else if (!callee->is_static) {
      recv = f.md.is_static ? Roots{kUnknownRoot} : Roots{kThis};
    }
    if (s.reads_receiver) effect(f, recv, true);
    if (s.writes_receiver) effect(f, recv, false);
    for (std::size_t j = 0; j < mi.args.size(); ++j) {
      Roots ar = roots(f, mi.args[j]);
      // Handing the receiver to another method may expose its fields.
      if (ar.count(kThis)) f.result.reads_receiver = true;
      if (j < s.writes_arg.size() && s.writes_arg[j]) effect(f, ar, false);
    }
  }

  void expr(Frame& f, const Expression& e) {
    scan_reads(f, e);
    for_each_invocation(e, [&](const MethodInvocation& mi) { call(f, mi); });
  }

  void body(Frame& f, const std::vector<Statement>& stmts, bool conditional) {
    for (const auto& s : stmts) statement(f, s, conditional);
  }

  void bind(Frame& f, const std::string& var, Roots rs, bool conditional) {
    if (conditional) {
      auto& cur = f.env[var];
      cur.insert(rs.begin(), rs.end());
    } else {
      f.env[var] = std::move(rs);
    }
  }

  void statement(Frame& f, const Statement& s, bool conditional) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, VarDecl>) {
            expr(f, n.init);
            bind(f, n.name, roots(f, n.init), conditional);
          } else if constexpr (std::is_same_v<N, Assignment>) {
            expr(f, n.value);
            if (const auto* v = std::get_if<VarRef>(&n.target.node)) {
              bind(f, v->name, roots(f, n.value), conditional);
            } else {
              const auto& fa = std::get<FieldAccess>(n.target.node);
              scan_reads(f, *fa.base);
              for_each_invocation(*fa.base, [&](const MethodInvocation& mi) { call(f, mi); });
              effect(f, roots(f, *fa.base), false);
            }
          } else if constexpr (std::is_same_v<N, InvocationStmt>) {
            if (n.call.receiver) expr(f, *n.call.receiver);
            for (const auto& a : n.call.args) expr(f, a);
            call(f, n.call);
          } else if constexpr (std::is_same_v<N, AssertionStmt>) {
            for (const auto& o : n.assertion.operands) expr(f, o);
          } else if constexpr (std::is_same_v<N, ThrowStmt>) {
            expr(f, n.message);
          } else if constexpr (std::is_same_v<N, OpaqueRegion>) {
            f.result.inconclusive = true;
          } else if constexpr (std::is_same_v<N, ReturnStmt>) {
            if (n.value) expr(f, *n.value);
          } else if constexpr (std::is_same_v<N, IfStmt>) {
            expr(f, n.cond);
            body(f, n.then_body, true);
            body(f, n.else_body, true);
          } else if constexpr (std::is_same_v<N, WhileStmt>) {
            for (int pass = 0; pass < 2; ++pass) {
              expr(f, n.cond);
              body(f, n.body, true);
            }
          }
        },
        s.node);
  }

  const ProjectModel& model_;
  std::map<std::pair<std::string, int>, MethodSummary> memo_;
  std::vector<std::string> stack_;
};

}  // namespace

Summaries method_writes_summary(const ProjectModel& model, int depth_k) {
  Summaries out;
  SummaryBuilder builder(model);
  for (const auto& c : model.classes)
    for (const auto& m : c.methods)
      out[summary_key(c.fqn, m.name, m.params.size())] = builder.summarize(c, m, std::max(depth_k, 0));
  return out;
}

// ---------------------------------------------------------------------------
// Value versions

std::string_view to_string(Policy p) {
  return p == Policy::Conservative ? "conservative" : "assume-mutated";
}

std::optional<Policy> parse_policy(std::string_view text) {
  if (text == "conservative") return Policy::Conservative;
  if (text == "assume-mutated") return Policy::AssumeMutated;
  return std::nullopt;
}

const InvocationFlow* ValueFlow::find(const InvocationId& id) const {
  for (const auto& f : invocations)
    if (f.id == id) return &f;
  return nullptr;
}

std::optional<int> ValueFlow::version_at(int stmt, const std::string& var) const {
  if (stmt < 0 || static_cast<std::size_t>(stmt) >= env_before.size()) return std::nullopt;
  const auto& env = env_before[static_cast<std::size_t>(stmt)];
  auto it = env.find(var);
  if (it == env.end()) return std::nullopt;
  return it->second;
}

std::string version_key(int version) { return "v" + std::to_string(version); }

namespace {

class FlowBuilder {
 public:
  FlowBuilder(const TestCaseIR& tc, const ProjectModel& model, const Summaries& summaries, Policy policy)
      : tc_(tc), model_(model), summaries_(summaries), policy_(policy) {}

  ValueFlow run() {
    for (const auto& p : tc_.params) {
      Version v;
      v.kind = VersionKind::Param;
      v.var = p.name;
      bind_new(p.name, add(v));
      types_[p.name] = p.type;
    }
    for (std::size_t i = 0; i < tc_.statements.size(); ++i) {
      flow_.env_before.push_back(snapshot());
      statement(tc_.statements[i], static_cast<int>(i));
    }
    flow_.env_before.push_back(snapshot());
    return std::move(flow_);
  }

 private:
  int add(Version v) {
    v.id = static_cast<int>(flow_.versions.size());
    flow_.versions.push_back(std::move(v));
    return flow_.versions.back().id;
  }

  int unknown(int stmt) {
    Version v;
    v.kind = VersionKind::Unknown;
    v.stmt = stmt;
    return add(v);
  }

  void bind_new(const std::string& var, int version) {
    int slot = static_cast<int>(slot_version_.size());
    slot_version_.push_back(version);
    env_[var] = slot;
  }

  std::map<std::string, int> snapshot() const {
    std::map<std::string, int> out;
    for (const auto& [var, slot] : env_) out[var] = slot_version_[static_cast<std::size_t>(slot)];
    return out;
  }

  void link(int a, int b) {
    if (a == b) return;
    links_[a].insert(b);
    links_[b].insert(a);
  }

  void mutate(int slot, int version, int stmt) {
    slot_version_[static_cast<std::size_t>(slot)] = version;
    auto it = links_.find(slot);
    if (it == links_.end()) return;
    for (int other : it->second) slot_version_[static_cast<std::size_t>(other)] = unknown(stmt);
  }

  std::optional<int> slot_of_root(const Expression& e) const {
    auto root = root_variable(e);
    if (!root) return std::nullopt;
    auto it = env_.find(*root);
    if (it == env_.end()) return std::nullopt;
    return it->second;
  }

  bool may_be_object(const Expression& e) const {
    if (std::holds_alternative<Literal>(e.node)) return false;
    if (const auto* v = std::get_if<VarRef>(&e.node)) {
      auto it = types_.find(v->name);
      return it == types_.end() || it->second.is_object() || it->second.base == BaseType::Var;
    }
    return root_variable(e).has_value();
  }

  void handle_call(const MethodInvocation& mi, int stmt) {
    InvocationFlow inv;
    inv.id = mi.id;
    inv.call = &mi;
    inv.env_before = snapshot();

    auto make = [&](VersionKind k, int pos) {
      Version v;
      v.kind = k;
      v.stmt = stmt;
      v.call = mi.id;
      v.arg_pos = pos;
      return add(v);
    };

    const ClassDecl* cls = model_.find_class(mi.class_fqn);
    const MethodDecl* callee = cls ? cls->find_method(mi.method, mi.args.size()) : nullptr;
    const MethodSummary* summary = callee ? find_summary(summaries_, mi) : nullptr;

    if (builtins::is_builtin_class(mi.class_fqn)) {
      inv.ret = make(VersionKind::Ret, -1);
    } else if (callee && summary) {
      if (callee->return_type) inv.ret = make(VersionKind::Ret, -1);
      bool assume = summary->inconclusive && policy_ == Policy::AssumeMutated;
      bool lost = summary->inconclusive && policy_ == Policy::Conservative;
      if (mi.receiver) {
        if (auto slot = slot_of_root(*mi.receiver)) {
          if (summary->writes_receiver || assume) {
            inv.receiver_post = make(VersionKind::RecvPost, -1);
            mutate(*slot, *inv.receiver_post, stmt);
          } else if (lost) {
            mutate(*slot, unknown(stmt), stmt);
          }
        }
      }
      for (std::size_t j = 0; j < mi.args.size(); ++j) {
        auto slot = slot_of_root(mi.args[j]);
        if (!slot) continue;
        bool writes = j < summary->writes_arg.size() && summary->writes_arg[j];
        if (writes || (assume && may_be_object(mi.args[j]))) {
          int v = make(VersionKind::ArgPost, static_cast<int>(j));
          inv.arg_post[static_cast<int>(j)] = v;
          mutate(*slot, v, stmt);
        } else if (lost && may_be_object(mi.args[j])) {
          mutate(*slot, unknown(stmt), stmt);
        }
      }
    } else {
      // Undeclared class or method: the return value is opaque data and any
      // object handed over may have been changed.
      inv.ret = make(VersionKind::Ret, -1);
      if (mi.receiver) {
        if (auto slot = slot_of_root(*mi.receiver)) mutate(*slot, unknown(stmt), stmt);
      }
      for (const auto& a : mi.args) {
        if (!may_be_object(a)) continue;
        if (auto slot = slot_of_root(a)) mutate(*slot, unknown(stmt), stmt);
      }
    }
    flow_.invocations.push_back(std::move(inv));
  }

  void calls_in(const Statement& s, int stmt) {
    for_each_invocation(s, [&](const MethodInvocation& mi) { handle_call(mi, stmt); });
  }

  // Binds `var` to the value of `init` evaluated at `stmt`.
  void bind_value(const std::string& var, const Expression& init, int stmt, bool object_typed) {
    if (const auto* v = std::get_if<VarRef>(&init.node)) {
      auto it = env_.find(v->name);
      if (it != env_.end()) {
        env_[var] = it->second;
      } else {
        bind_new(var, unknown(stmt));
      }
      return;
    }
    if (const auto* c = std::get_if<CallExpr>(&init.node)) {
      const InvocationFlow* inv = flow_.find(c->call->id);
      bind_new(var, inv && inv->ret ? *inv->ret : unknown(stmt));
      return;
    }
    Version d;
    d.kind = VersionKind::Def;
    d.stmt = stmt;
    d.var = var;
    bind_new(var, add(d));
    if (std::holds_alternative<FieldAccess>(init.node) && object_typed) {
      if (auto src = slot_of_root(init)) link(env_[var], *src);
    }
  }

  void statement(const Statement& s, int stmt) {
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, VarDecl>) {
            calls_in(s, stmt);
            types_[n.name] = n.type;
            bind_value(n.name, n.init, stmt, n.type.is_object() || n.type.base == BaseType::Var);
          } else if constexpr (std::is_same_v<N, Assignment>) {
            calls_in(s, stmt);
            if (const auto* v = std::get_if<VarRef>(&n.target.node)) {
              auto t = types_.find(v->name);
              bool obj = t == types_.end() || t->second.is_object() || t->second.base == BaseType::Var;
              bind_value(v->name, n.value, stmt, obj);
            } else if (auto slot = slot_of_root(n.target)) {
              Version d;
              d.kind = VersionKind::FieldStore;
              d.stmt = stmt;
              mutate(*slot, add(d), stmt);
              if (may_be_object(n.value)) {
                if (auto src = slot_of_root(n.value)) link(*slot, *src);
              }
            }
          } else if constexpr (std::is_same_v<N, OpaqueRegion>) {
            for (const auto& name : opaque_identifiers(n.text)) {
              auto it = env_.find(name);
              if (it != env_.end()) {
                mutate(it->second, unknown(stmt), stmt);
              }
              bind_new(name, unknown(stmt));
            }
          } else {
            calls_in(s, stmt);
          }
        },
        s.node);
  }

  const TestCaseIR& tc_;
  const ProjectModel& model_;
  const Summaries& summaries_;
  Policy policy_;
  ValueFlow flow_;
  std::map<std::string, int> env_;  // variable -> slot
  std::vector<int> slot_version_;
  std::map<int, std::set<int>> links_;
  std::map<std::string, Type> types_;
};

}  // namespace

ValueFlow build_value_flow(const TestCaseIR& tc, const ProjectModel& model, const Summaries& summaries,
                           Policy policy) {
  return FlowBuilder(tc, model, summaries, policy).run();
}

std::optional<std::string> value_key(const Expression& e, const std::map<std::string, int>& env,
                                     const ValueFlow& flow) {
  return std::visit(
      [&](const auto& n) -> std::optional<std::string> {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Literal>) {
          return "L" + printer::print_literal(n);
        } else if constexpr (std::is_same_v<N, VarRef>) {
          auto it = env.find(n.name);
          if (it == env.end() || flow.is_unknown(it->second)) return std::nullopt;
          return version_key(it->second);
        } else if constexpr (std::is_same_v<N, FieldAccess>) {
          auto b = value_key(*n.base, env, flow);
          if (!b) return std::nullopt;
          return "(" + *b + "." + n.field + ")";
        } else if constexpr (std::is_same_v<N, BinaryExpr>) {
          auto l = value_key(*n.lhs, env, flow);
          auto r = value_key(*n.rhs, env, flow);
          if (!l || !r) return std::nullopt;
          return "(" + *l + " " + std::string(to_string(n.op)) + " " + *r + ")";
        } else if constexpr (std::is_same_v<N, UnaryExpr>) {
          auto x = value_key(*n.operand, env, flow);
          if (!x) return std::nullopt;
          return "(" + std::string(to_string(n.op)) + *x + ")";
        } else if constexpr (std::is_same_v<N, CallExpr>) {
          const InvocationFlow* inv = flow.find(n.call->id);
          if (!inv || !inv->ret) return std::nullopt;
          return version_key(*inv->ret);
        } else {
          std::string out = "(new " + n.class_fqn;
          for (const auto& a : n.args) {
            auto k = value_key(a, env, flow);
            if (!k) return std::nullopt;
            out += " " + *k;
          }
          return out + ")";
        }
      },
      e.node);
}

// ---------------------------------------------------------------------------
// IO sets

std::string_view to_string(ElementKind k) {
  switch (k) {
    case ElementKind::ArgLiteral:
      return "arg_literal";
    case ElementKind::ArgVar:
      return "arg_var";
    case ElementKind::ReceiverPre:
      return "receiver_pre";
    case ElementKind::ReceiverPost:
      return "receiver_post";
    case ElementKind::ReturnValue:
      return "return_value";
    case ElementKind::ArgObjectPost:
      return "arg_object_post";
  }
  return "?";
}

IoSets compute_io_sets(const MethodInvocation& mi, const ValueFlow& flow, const Summaries& summaries,
                       Policy policy, const ProjectModel& model) {
  IoSets io;
  io.invocation = mi.id;
  const InvocationFlow* inv = flow.find(mi.id);
  if (!inv) return io;
  const auto& env = inv->env_before;

  const ClassDecl* cls = model.find_class(mi.class_fqn);
  const MethodDecl* callee = cls ? cls->find_method(mi.method, mi.args.size()) : nullptr;
  const MethodSummary* summary = callee ? find_summary(summaries, mi) : nullptr;
  bool inconclusive = summary && summary->inconclusive;
  bool assume = inconclusive && policy == Policy::AssumeMutated;
  io.low_confidence = assume;

  for (std::size_t j = 0; j < mi.args.size(); ++j) {
    const Expression& a = mi.args[j];
    Element el;
    el.anchor = mi.id;
    el.position = static_cast<int>(j);
    el.key = value_key(a, env, flow);
    if (const auto* lit = std::get_if<Literal>(&a.node)) {
      el.kind = ElementKind::ArgLiteral;
      el.literal = *lit;
    } else {
      el.kind = ElementKind::ArgVar;
      el.variable = root_variable(a);
      if (const auto* v = std::get_if<VarRef>(&a.node)) {
        auto it = env.find(v->name);
        if (it != env.end()) el.version = it->second;
      }
    }
    io.X.push_back(std::move(el));
  }

  if (mi.receiver && (!summary || summary->reads_receiver || inconclusive)) {
    Element el;
    el.kind = ElementKind::ReceiverPre;
    el.anchor = mi.id;
    el.variable = root_variable(*mi.receiver);
    el.key = value_key(*mi.receiver, env, flow);
    if (el.variable) {
      auto it = env.find(*el.variable);
      if (it != env.end()) el.version = it->second;
    }
    io.X.push_back(std::move(el));
  }

  if ((callee ? callee->return_type.has_value() : true) && inv->ret) {
    Element el;
    el.kind = ElementKind::ReturnValue;
    el.anchor = mi.id;
    el.variable = mi.return_binding;
    el.version = *inv->ret;
    el.key = version_key(*inv->ret);
    io.Y.push_back(std::move(el));
  }

  if (summary && mi.receiver && (summary->writes_receiver || assume) && inv->receiver_post) {
    Element el;
    el.kind = ElementKind::ReceiverPost;
    el.anchor = mi.id;
    el.variable = root_variable(*mi.receiver);
    el.version = *inv->receiver_post;
    el.key = version_key(*inv->receiver_post);
    io.Y.push_back(std::move(el));
  }

  for (const auto& [pos, version] : inv->arg_post) {
    Element el;
    el.kind = ElementKind::ArgObjectPost;
    el.anchor = mi.id;
    el.position = pos;
    el.variable = root_variable(mi.args[static_cast<std::size_t>(pos)]);
    el.version = version;
    el.key = version_key(version);
    io.Y.push_back(std::move(el));
  }
  return io;
}

TestAnalysis analyze_test(const TestCaseIR& tc, const ProjectModel& model, const Summaries& summaries,
                          Policy policy) {
  TestAnalysis a;
  a.tc = &tc;
  a.policy = policy;
  a.graph = build_def_use(tc);
  a.flow = build_value_flow(tc, model, summaries, policy);
  for (const auto& inv : a.flow.invocations) {
    const MethodInvocation& mi = *inv.call;
    if (!model.find_class(mi.class_fqn)) continue;
    a.io.emplace(mi.id, compute_io_sets(mi, a.flow, summaries, policy, model));
  }
  return a;
}

}  // namespace mrmine::dataflow
