#include "mrmine/discovery.h"

#include <algorithm>
#include <set>

namespace mrmine::discovery {

using namespace mrmine::ir;
using dataflow::Element;
using dataflow::InvocationFlow;
using dataflow::TestAnalysis;
using dataflow::VersionKind;

bool CutInvocations::p1(const std::string& class_fqn) const {
  auto it = by_class.find(class_fqn);
  return it != by_class.end() && it->second.size() >= 2;
}

CutInvocations identify_method_invocations(const TestCaseIR& tc, const ProjectModel& model) {
  CutInvocations out;
  for (const auto& s : tc.statements) {
    for_each_invocation(s, [&](const MethodInvocation& mi) {
      if (model.is_internal(mi.class_fqn)) out.by_class[mi.class_fqn].push_back(mi.id);
    });
  }
  return out;
}

std::string_view to_string(Pattern p) { return p == Pattern::BoolAssert ? "A1_BoolAssert" : "A2_CompAssert"; }

namespace {

using Env = std::map<std::string, int>;

// Collects the value keys an expression is built from. Values computed by
// non-CUT code (builtins, external libraries, local arithmetic) are looked
// through; values returned or mutated by internal methods are leaves.
class AtomCollector {
 public:
  AtomCollector(const TestAnalysis& a, const ProjectModel& model) : a_(a), model_(model) {}

  Atoms collect(const Expression& e, const Env& env) {
    keys_.clear();
    seen_.clear();
    bottom_ = false;
    expr(e, env);
    if (bottom_) return std::nullopt;
    return std::vector<std::string>(keys_.begin(), keys_.end());
  }

 private:
  void expr(const Expression& e, const Env& env) {
    if (bottom_) return;
    auto key = dataflow::value_key(e, env, a_.flow);
    if (!key) {
      bottom_ = true;
      return;
    }
    keys_.insert(*key);
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, VarRef>) {
            version(env.at(n.name));
          } else if constexpr (std::is_same_v<N, FieldAccess>) {
            expr(*n.base, env);
          } else if constexpr (std::is_same_v<N, BinaryExpr>) {
            expr(*n.lhs, env);
            expr(*n.rhs, env);
          } else if constexpr (std::is_same_v<N, UnaryExpr>) {
            expr(*n.operand, env);
          } else if constexpr (std::is_same_v<N, CallExpr>) {
            if (const InvocationFlow* inv = a_.flow.find(n.call->id); inv && inv->ret) version(*inv->ret);
          } else if constexpr (std::is_same_v<N, NewExpr>) {
            for (const auto& arg : n.args) expr(arg, env);
          }
        },
        e.node);
  }

  void version(int v) {
    if (bottom_ || !seen_.insert(v).second) return;
    const auto& ver = a_.flow.versions.at(static_cast<std::size_t>(v));
    if (ver.kind == VersionKind::Unknown) {
      bottom_ = true;
    } else if (ver.kind == VersionKind::Def) {
      const Statement& s = a_.tc->statements.at(static_cast<std::size_t>(ver.stmt));
      const Env& env = a_.flow.env_before.at(static_cast<std::size_t>(ver.stmt));
      if (const auto* d = std::get_if<VarDecl>(&s.node)) {
        expr(d->init, env);
      } else if (const auto* asg = std::get_if<Assignment>(&s.node)) {
        expr(asg->value, env);
      }
    } else if (ver.kind == VersionKind::Ret) {
      const InvocationFlow* inv = a_.flow.find(ver.call);
      if (!inv || model_.is_internal(inv->call->class_fqn)) return;
      if (inv->call->receiver) expr(*inv->call->receiver, inv->env_before);
      for (const auto& arg : inv->call->args) expr(arg, inv->env_before);
    }
  }

  const TestAnalysis& a_;
  const ProjectModel& model_;
  std::set<std::string> keys_;
  std::set<int> seen_;
  bool bottom_ = false;
};

bool is_logical_top(const Expression& e) {
  if (const auto* b = std::get_if<BinaryExpr>(&e.node)) return is_logical(b->op);
  if (const auto* u = std::get_if<UnaryExpr>(&e.node)) return u->op == UnOp::Not;
  return false;
}

const MethodDecl* internal_bool_method(const MethodInvocation& mi, const ProjectModel& model) {
  if (!model.is_internal(mi.class_fqn)) return nullptr;
  const MethodDecl* m = model.find_class(mi.class_fqn)->find_method(mi.method, mi.args.size());
  if (!m || !m->return_type || m->return_type->base != BaseType::Bool) return nullptr;
  return m;
}

class SideFinder {
 public:
  SideFinder(const TestAnalysis& a, const ProjectModel& model) : a_(a), model_(model), atoms_(a, model) {}

  std::optional<Sides> bool_operand(const Expression& e, const Env& env, int depth = 0) {
    if (depth > 64) return std::nullopt;
    if (const auto* b = std::get_if<BinaryExpr>(&e.node)) {
      if (!is_comparison(b->op)) return std::nullopt;
      return make(Pattern::BoolAssert, std::string(ir::to_string(b->op)), *b->lhs, env, *b->rhs, env);
    }
    if (const auto* c = std::get_if<CallExpr>(&e.node)) {
      const InvocationFlow* inv = a_.flow.find(c->call->id);
      return inv ? connective(*inv) : std::nullopt;
    }
    if (const auto* v = std::get_if<VarRef>(&e.node)) {
      auto it = env.find(v->name);
      if (it == env.end()) return std::nullopt;
      const auto& ver = a_.flow.versions.at(static_cast<std::size_t>(it->second));
      if (ver.kind == VersionKind::Def) {
        const Statement& s = a_.tc->statements.at(static_cast<std::size_t>(ver.stmt));
        const Env& denv = a_.flow.env_before.at(static_cast<std::size_t>(ver.stmt));
        if (const auto* d = std::get_if<VarDecl>(&s.node)) return bool_operand(d->init, denv, depth + 1);
        if (const auto* asg = std::get_if<Assignment>(&s.node)) return bool_operand(asg->value, denv, depth + 1);
      } else if (ver.kind == VersionKind::Ret) {
        const InvocationFlow* inv = a_.flow.find(ver.call);
        return inv ? connective(*inv) : std::nullopt;
      }
    }
    return std::nullopt;
  }

  std::optional<Sides> comparison(const Expression& l, const Expression& r, const Env& env, std::string op) {
    if (is_logical_top(l) || is_logical_top(r)) return std::nullopt;
    return make(Pattern::CompAssert, std::move(op), l, env, r, env);
  }

 private:
  std::optional<Sides> connective(const InvocationFlow& inv) {
    const MethodInvocation& mi = *inv.call;
    if (!internal_bool_method(mi, model_)) return std::nullopt;
    std::optional<Sides> out;
    if (mi.receiver) {
      out = sides_of(Pattern::BoolAssert, mi.method, {&*mi.receiver}, collect_ptrs(mi.args, 0), inv.env_before);
    } else {
      if (mi.args.size() < 2) return std::nullopt;
      out = sides_of(Pattern::BoolAssert, mi.method, {&mi.args[0]}, collect_ptrs(mi.args, 1), inv.env_before);
    }
    if (out) out->connective = mi.id;
    return out;
  }

  static std::vector<const Expression*> collect_ptrs(const std::vector<Expression>& v, std::size_t from) {
    std::vector<const Expression*> out;
    for (std::size_t i = from; i < v.size(); ++i) out.push_back(&v[i]);
    return out;
  }

  std::optional<Sides> make(Pattern p, std::string op, const Expression& l, const Env& lenv, const Expression& r,
                            const Env& renv) {
    auto la = atoms_.collect(l, lenv);
    auto ra = atoms_.collect(r, renv);
    if (!la || !ra) return std::nullopt;
    return Sides{p, std::move(op), std::move(*la), std::move(*ra), std::nullopt};
  }

  std::optional<Sides> sides_of(Pattern p, std::string op, const std::vector<const Expression*>& l,
                                const std::vector<const Expression*>& r, const Env& env) {
    if (l.empty() || r.empty()) return std::nullopt;
    auto gather = [&](const std::vector<const Expression*>& es) -> Atoms {
      std::set<std::string> all;
      for (const Expression* e : es) {
        auto a = atoms_.collect(*e, env);
        if (!a) return std::nullopt;
        all.insert(a->begin(), a->end());
      }
      return std::vector<std::string>(all.begin(), all.end());
    };
    auto la = gather(l);
    auto ra = gather(r);
    if (!la || !ra) return std::nullopt;
    return Sides{p, std::move(op), std::move(*la), std::move(*ra), std::nullopt};
  }

  const TestAnalysis& a_;
  const ProjectModel& model_;
  AtomCollector atoms_;
};

bool contains(const std::vector<std::string>& sorted, const std::optional<std::string>& key) {
  return key && std::binary_search(sorted.begin(), sorted.end(), *key);
}

}  // namespace

std::optional<Sides> assertion_sides(const Assertion& a, const TestAnalysis& analysis, const ProjectModel& model) {
  const auto idx = static_cast<std::size_t>(a.id.stmt);
  if (idx >= analysis.flow.env_before.size()) return std::nullopt;
  const Env& env = analysis.flow.env_before[idx];
  SideFinder finder(analysis, model);
  if (a.api == AssertApi::AssertTrue || a.api == AssertApi::AssertFalse) {
    if (a.operands.size() != 1) return std::nullopt;
    return finder.bool_operand(a.operands[0], env);
  }
  if (a.operands.size() != 2) return std::nullopt;
  return finder.comparison(a.operands[0], a.operands[1], env, std::string(ir::to_string(a.api)));
}

std::vector<RelationAssertionMatch> classify_assertion(const Assertion& a, const TestAnalysis& analysis,
                                                       const CutInvocations& cuts, const ProjectModel& model) {
  std::vector<RelationAssertionMatch> out;
  auto sides = assertion_sides(a, analysis, model);
  if (!sides) return out;
  for (const auto& [cls, ids] : cuts.by_class) {
    if (ids.size() < 2) continue;
    for (const auto& id1 : ids) {
      if (id1 == sides->connective) continue;
      auto io1 = analysis.io.find(id1);
      if (io1 == analysis.io.end()) continue;
      std::vector<const Element*> first;
      for (const auto& e : io1->second.X) first.push_back(&e);
      for (const auto& e : io1->second.Y) first.push_back(&e);
      for (const auto& id2 : ids) {
        if (id2 == sides->connective || id2.stmt <= id1.stmt) continue;
        auto io2 = analysis.io.find(id2);
        if (io2 == analysis.io.end()) continue;
        std::optional<RelationAssertionMatch> found;
        for (const Element* e1 : first) {
          for (const auto& e2 : io2->second.Y) {
            bool forward = contains(sides->lhs, e1->key) && contains(sides->rhs, e2.key);
            bool backward = contains(sides->rhs, e1->key) && contains(sides->lhs, e2.key);
            if (forward || backward) {
              found = RelationAssertionMatch{a.id, sides->pattern, *e1, e2, id1, id2, sides->op};
              break;
            }
          }
          if (found) break;
        }
        if (found) out.push_back(std::move(*found));
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return std::tie(x.mi1, x.mi2) < std::tie(y.mi1, y.mi2);
  });
  return out;
}

namespace {

std::vector<InvocationId> feeding_invocations(const RelationAssertionMatch& m, const Sides& sides,
                                              const CutInvocations& cuts, const TestAnalysis& analysis,
                                              const std::string& cls) {
  std::set<InvocationId> mi{m.mi1, m.mi2};
  for (const auto& id : cuts.by_class.at(cls)) {
    if (id == sides.connective) continue;
    auto io = analysis.io.find(id);
    if (io == analysis.io.end()) continue;
    for (const auto& y : io->second.Y) {
      if (contains(sides.lhs, y.key) || contains(sides.rhs, y.key)) {
        mi.insert(id);
        break;
      }
    }
  }
  return {mi.begin(), mi.end()};
}

}  // namespace

DiscoveryResult discover_mtc(const TestAnalysis& analysis, const ProjectModel& model) {
  DiscoveryResult result;
  const TestCaseIR& tc = *analysis.tc;
  CutInvocations cuts = identify_method_invocations(tc, model);
  bool any_p1 = false;
  for (const auto& [cls, ids] : cuts.by_class) any_p1 = any_p1 || ids.size() >= 2;
  if (!any_p1) return result;

  // Class of each invocation, to name the CUT of a match.
  std::map<InvocationId, std::string> owner;
  for (const auto& [cls, ids] : cuts.by_class)
    for (const auto& id : ids) owner[id] = cls;

  for (const auto& s : tc.statements) {
    const auto* as = std::get_if<AssertionStmt>(&s.node);
    if (!as) continue;
    auto matches = classify_assertion(as->assertion, analysis, cuts, model);
    if (matches.empty()) continue;
    auto sides = assertion_sides(as->assertion, analysis, model);
    for (auto& m : matches) {
      MRInstance inst;
      inst.cut = owner.at(m.mi1);
      inst.MI = feeding_invocations(m, *sides, cuts, analysis, inst.cut);
      inst.alpha = std::move(m);
      result.instances.push_back(std::move(inst));
    }
  }
  result.is_mtc = !result.instances.empty();
  return result;
}

DiscoveryResult discover_mtc(const TestCaseIR& tc, const ProjectModel& model, const dataflow::Summaries& summaries,
                             dataflow::Policy policy) {
  TestAnalysis analysis = dataflow::analyze_test(tc, model, summaries, policy);
  return discover_mtc(analysis, model);
}

std::vector<TestRef> all_tests(const ProjectModel& model) {
  std::vector<TestRef> out;
  for (std::size_t s = 0; s < model.test_suites.size(); ++s)
    for (std::size_t t = 0; t < model.test_suites[s].test_cases.size(); ++t) out.push_back({s, t});
  return out;
}

std::vector<DiscoveryResult> discover_all(const ProjectModel& model, const dataflow::Summaries& summaries,
                                          dataflow::Policy policy) {
  const auto refs = all_tests(model);
  std::vector<DiscoveryResult> out(refs.size());
  const auto n = static_cast<std::int64_t>(refs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    const TestRef& r = refs[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(i)] =
        discover_mtc(model.test_suites[r.suite].test_cases[r.test], model, summaries, policy);
  }
  return out;
}

std::vector<DiscoveryResult> discover_all_serial(const ProjectModel& model, const dataflow::Summaries& summaries,
                                                 dataflow::Policy policy) {
  std::vector<DiscoveryResult> out;
  for (const auto& r : all_tests(model))
    out.push_back(discover_mtc(model.test_suites[r.suite].test_cases[r.test], model, summaries, policy));
  return out;
}

}  // namespace mrmine::discovery
