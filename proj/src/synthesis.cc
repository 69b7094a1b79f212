#include "mrmine/synthesis.h"

#include <algorithm>
#include <map>
#include <set>

#include "mrmine/printer.h"

namespace mrmine::synthesis {

using namespace mrmine::ir;
using dataflow::Element;
using dataflow::ElementKind;
using dataflow::TestAnalysis;
using dataflow::VersionKind;

std::string_view to_string(Refusal r) {
  switch (r) {
    case Refusal::Arity:
      return "arity";
    case Refusal::NoTransformation:
      return "no-transformation";
    case Refusal::Slice:
      return "slice";
  }
  return "?";
}

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Candidate:
      return "candidate";
    case Status::HighQuality:
      return "high_quality";
    case Status::LowQuality:
      return "low_quality";
    case Status::Undetermined:
      return "undetermined";
  }
  return "?";
}

std::optional<Status> parse_status(std::string_view text) {
  for (Status s : {Status::Candidate, Status::HighQuality, Status::LowQuality, Status::Undetermined})
    if (to_string(s) == text) return s;
  return std::nullopt;
}

std::string mr_name(const std::string& test, std::size_t instance_index) {
  return test + "_MR" + std::to_string(instance_index);
}

namespace {

// Statements a use of `var` at `stmt` depends on: the reaching binding and,
// for mutated objects, the statement that produced the current state.
std::vector<int> use_deps(const TestAnalysis& a, int stmt, const std::string& var, bool& ok) {
  std::vector<int> out;
  auto v = a.flow.version_at(stmt, var);
  int b = a.graph.reaching_def(stmt, var);
  if (!v || a.flow.is_unknown(*v) || b == dataflow::kUndefined) {
    ok = false;
    return out;
  }
  if (b >= 0) out.push_back(b);
  const auto& ver = a.flow.versions[static_cast<std::size_t>(*v)];
  if (ver.kind == VersionKind::RecvPost || ver.kind == VersionKind::ArgPost || ver.kind == VersionKind::FieldStore)
    out.push_back(ver.stmt);
  return out;
}

std::set<std::string> uses_at(const TestAnalysis& a, int stmt) {
  auto it = a.graph.uses.find(stmt);
  return it == a.graph.uses.end() ? std::set<std::string>{} : it->second;
}

std::vector<std::string> element_vars(const Element& e, const MethodInvocation& mi) {
  std::vector<std::string> out;
  if (e.kind == ElementKind::ReceiverPre) {
    if (mi.receiver) collect_vars(*mi.receiver, out);
  } else if (e.kind == ElementKind::ArgVar && e.position >= 0) {
    collect_vars(mi.args[static_cast<std::size_t>(e.position)], out);
  }
  return out;
}

const MethodInvocation* find_invocation(const TestAnalysis& a, const InvocationId& id) {
  const auto* inv = a.flow.find(id);
  return inv ? inv->call : nullptr;
}

}  // namespace

Deduction deduce_constituents(const discovery::MRInstance& instance, const TestAnalysis& a) {
  Deduction d;
  if (instance.MI.size() != 2) {
    d.reason = Refusal::Arity;
    d.detail = "instance relates " + std::to_string(instance.MI.size()) + " invocations";
    return d;
  }
  const InvocationId& id1 = instance.alpha.mi1;
  const InvocationId& id2 = instance.alpha.mi2;
  const MethodInvocation* mi1 = find_invocation(a, id1);
  const MethodInvocation* mi2 = find_invocation(a, id2);
  const auto& io1 = a.io.at(id1);
  const auto& io2 = a.io.at(id2);

  MRConstituents c;
  c.mi1 = id1;
  c.mi2 = id2;
  c.relation_assertion = instance.alpha.assertion;
  c.source_input = io1.X;
  c.source_output = io1.Y;
  c.followup_input = io2.X;
  c.followup_output = io2.Y;
  c.target_methods.emplace_back(instance.cut, mi1->method);
  if (mi2->method != mi1->method) c.target_methods.emplace_back(instance.cut, mi2->method);

  // Versions that carry the source input or source output.
  std::set<int> source;
  for (const auto& e : io1.X) {
    for (const auto& v : element_vars(e, *mi1))
      if (auto ver = a.flow.version_at(id1.stmt, v)) source.insert(*ver);
  }
  for (const auto& e : io1.Y)
    if (e.version) source.insert(*e.version);

  // Statements the follow-up input is computed by, walking backwards from mi2
  // and stopping at mi1.
  std::set<int> reach;
  std::vector<int> work;
  auto visit_use = [&](int stmt, const std::string& var) -> bool {
    bool ok = true;
    for (int dep : use_deps(a, stmt, var, ok)) {
      if (dep == id1.stmt || dep == id2.stmt) continue;
      if (reach.insert(dep).second) work.push_back(dep);
    }
    return ok;
  };
  for (const auto& e : io2.X) {
    for (const auto& v : element_vars(e, *mi2)) {
      if (!visit_use(id2.stmt, v)) {
        d.reason = Refusal::Slice;
        d.detail = "follow-up input '" + v + "' has no known value";
        return d;
      }
    }
  }
  while (!work.empty()) {
    int s = work.back();
    work.pop_back();
    for (const auto& u : uses_at(a, s)) visit_use(s, u);
  }

  // A reached statement belongs to the transformation when it consumes the
  // source input or output, directly or through another such statement.
  std::set<int> chain;
  for (int s : reach) {
    bool tainted = false;
    for (const auto& u : uses_at(a, s)) {
      auto ver = a.flow.version_at(s, u);
      if (ver && source.count(*ver)) tainted = true;
      bool ok = true;
      for (int dep : use_deps(a, s, u, ok))
        if (dep == id1.stmt || chain.count(dep)) tainted = true;
    }
    if (tainted) chain.insert(s);
  }
  if (chain.empty()) {
    d.reason = Refusal::NoTransformation;
    d.detail = "follow-up input does not depend on the source input or output";
    return d;
  }
  c.transform_chain.assign(chain.begin(), chain.end());
  d.constituents = std::move(c);
  return d;
}

namespace {

std::optional<Type> declared_type(const TestCaseIR& tc, const std::string& var) {
  for (const auto& s : tc.statements)
    if (const auto* d = std::get_if<VarDecl>(&s.node); d && d->name == var) return d->type;
  return std::nullopt;
}

std::optional<Type> literal_type(const Literal& lit) {
  switch (lit.value.index()) {
    case 1:
      return Type::Int();
    case 2:
      return Type::Float();
    case 3:
      return Type::Bool();
    case 4:
      return Type::String();
    default:
      return std::nullopt;
  }
}

void replace_literal(Expression& e, const Literal& lit, const std::string& param) {
  if (const auto* l = std::get_if<Literal>(&e.node)) {
    if (*l == lit) e = make_var(param);
    return;
  }
  std::visit(
      [&](auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, FieldAccess>) {
          replace_literal(*n.base, lit, param);
        } else if constexpr (std::is_same_v<N, BinaryExpr>) {
          replace_literal(*n.lhs, lit, param);
          replace_literal(*n.rhs, lit, param);
        } else if constexpr (std::is_same_v<N, UnaryExpr>) {
          replace_literal(*n.operand, lit, param);
        } else if constexpr (std::is_same_v<N, CallExpr>) {
          if (n.call->receiver) replace_literal(*n.call->receiver, lit, param);
          for (auto& arg : n.call->args) replace_literal(arg, lit, param);
        } else if constexpr (std::is_same_v<N, NewExpr>) {
          for (auto& arg : n.args) replace_literal(arg, lit, param);
        }
      },
      e.node);
}

std::set<std::string> all_names(const TestCaseIR& tc) {
  std::set<std::string> out;
  for (const auto& s : tc.statements) {
    if (auto d = defined_variable(s)) out.insert(*d);
    std::visit(
        [&](const auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, OpaqueRegion>) {
            auto ids = dataflow::opaque_identifiers(n.text);
            out.insert(ids.begin(), ids.end());
          }
        },
        s.node);
  }
  for (const auto& s : tc.statements) {
    for_each_invocation(s, [&](const MethodInvocation& mi) {
      std::vector<std::string> vs;
      if (mi.receiver) collect_vars(*mi.receiver, vs);
      for (const auto& arg : mi.args) collect_vars(arg, vs);
      out.insert(vs.begin(), vs.end());
    });
  }
  return out;
}

}  // namespace

CodifiedMR codify(const TestCaseIR& tc, const MRConstituents& c, const TestAnalysis& a, const ProjectModel& model,
                  const std::string& origin_suite, std::size_t instance_index) {
  const MethodInvocation* mi1 = find_invocation(a, c.mi1);
  if (!mi1) throw SliceError("source invocation not found");
  const int s1 = c.mi1.stmt;

  CodifiedMR mr;
  mr.name = mr_name(tc.name, instance_index);
  mr.origin_suite = origin_suite;
  mr.origin_test = tc.name;
  mr.instance_index = instance_index;
  mr.origin_stmt = s1;
  mr.cut = mi1->class_fqn;

  // Parameters: receiver first, then arguments, in source order.
  std::map<std::string, int> param_version;  // variable params -> version at mi1
  std::map<std::string, int> param_binding;
  std::set<std::string> taken = all_names(tc);
  std::vector<std::pair<std::size_t, std::string>> literal_params;  // (arg position, param)
  std::vector<Literal> literal_values;

  auto add_var_param = [&](const std::string& var) {
    if (param_version.count(var)) return;
    auto ver = a.flow.version_at(s1, var);
    int b = a.graph.reaching_def(s1, var);
    if (!ver || a.flow.is_unknown(*ver) || b == dataflow::kUndefined)
      throw SliceError("source input '" + var + "' has no known value");
    auto type = declared_type(tc, var);
    if (!type || type->base == BaseType::Var) throw SliceError("cannot determine the type of '" + var + "'");
    param_version[var] = *ver;
    param_binding[var] = b;
    mr.params.push_back(Param{var, *type});
    mr.sources.push_back(ParamSource{var, var, std::nullopt});
  };

  std::vector<const Element*> ordered;
  for (const auto& e : c.source_input)
    if (e.kind == ElementKind::ReceiverPre) ordered.push_back(&e);
  for (const auto& e : c.source_input)
    if (e.kind != ElementKind::ReceiverPre) ordered.push_back(&e);

  const ClassDecl* cls = model.find_class(mi1->class_fqn);
  const MethodDecl* callee = cls ? cls->find_method(mi1->method, mi1->args.size()) : nullptr;
  for (const Element* e : ordered) {
    if (e->kind == ElementKind::ArgLiteral) {
      auto type = literal_type(*e->literal);
      if (!type) continue;  // null stays a literal
      std::string base = callee ? callee->params[static_cast<std::size_t>(e->position)].name
                                : "arg" + std::to_string(e->position);
      std::string name = base;
      for (int k = 2; taken.count(name); ++k) name = base + std::to_string(k);
      taken.insert(name);
      mr.params.push_back(Param{name, *type});
      mr.sources.push_back(ParamSource{name, std::nullopt, *e->literal});
      literal_params.emplace_back(static_cast<std::size_t>(e->position), name);
      literal_values.push_back(*e->literal);
    } else {
      for (const auto& v : element_vars(*e, *mi1)) add_var_param(v);
    }
  }
  if (mr.params.empty()) throw SliceError("source input has nothing to parameterize");

  // Backward closure from the invocations, transformation and relation
  // assertion, cut at the parameter values.
  std::set<int> body{s1, c.mi2.stmt, c.relation_assertion.stmt};
  body.insert(c.transform_chain.begin(), c.transform_chain.end());
  std::vector<int> work(body.begin(), body.end());
  while (!work.empty()) {
    int s = work.back();
    work.pop_back();
    const Statement& st = tc.statements.at(static_cast<std::size_t>(s));
    if (std::holds_alternative<OpaqueRegion>(st.node))
      throw SliceError("statement " + std::to_string(s) + " is an opaque region");
    for (const auto& u : uses_at(a, s)) {
      auto ver = a.flow.version_at(s, u);
      auto pv = param_version.find(u);
      if (pv != param_version.end() && ver == pv->second) continue;
      bool ok = true;
      auto deps = use_deps(a, s, u, ok);
      if (!ok) throw SliceError("'" + u + "' has no known value at statement " + std::to_string(s));
      for (int dep : deps) {
        if (pv != param_version.end() && dep == param_binding[u]) continue;
        if (body.insert(dep).second) work.push_back(dep);
      }
    }
  }
  for (int s : body) {
    if (auto d = defined_variable(tc.statements[static_cast<std::size_t>(s)]); d && param_version.count(*d))
      throw SliceError("statement " + std::to_string(s) + " redefines parameter '" + *d + "'");
  }

  TestCaseIR out;
  out.name = mr.name;
  out.params = mr.params;
  out.span = tc.span;
  for (int s : body) {
    Statement st = tc.statements[static_cast<std::size_t>(s)];
    if (s == s1 && !literal_params.empty()) {
      for_each_invocation(st, [&](const MethodInvocation& cmi) {
        if (cmi.id != c.mi1) return;
        auto& mi = const_cast<MethodInvocation&>(cmi);
        for (const auto& [pos, name] : literal_params) mi.args[pos] = make_var(name);
      });
    }
    if (s == c.relation_assertion.stmt) {
      auto& as = std::get<AssertionStmt>(st.node);
      for (std::size_t i = 0; i < literal_values.size(); ++i)
        for (auto& op : as.assertion.operands) replace_literal(op, literal_values[i], literal_params[i].second);
    }
    out.statements.push_back(std::move(st));
  }
  renumber(out);
  mr.body = std::move(out);
  return mr;
}

std::string render_class_name(const CodifiedMR& mr) {
  auto dot = mr.origin_suite.rfind('.');
  std::string simple = dot == std::string::npos ? mr.origin_suite : mr.origin_suite.substr(dot + 1);
  return simple + "MR";
}

std::string render(const CodifiedMR& mr) {
  if (mr.body.params.empty()) throw std::logic_error("codified MR '" + mr.name + "' has no parameters");
  return "class " + render_class_name(mr) + " {\n" + printer::print_test_case(mr.body, 2) + "}\n";
}

std::vector<SynthesisOutcome> synthesize_test(const TestCaseIR& tc, const std::string& origin_suite,
                                              const TestAnalysis& analysis,
                                              const discovery::DiscoveryResult& discovered,
                                              const ProjectModel& model) {
  std::vector<SynthesisOutcome> out;
  for (std::size_t i = 0; i < discovered.instances.size(); ++i) {
    SynthesisOutcome o;
    o.instance_index = i;
    Deduction d = deduce_constituents(discovered.instances[i], analysis);
    if (!d.constituents) {
      o.refusal = d.reason;
      o.detail = d.detail;
    } else {
      o.constituents = d.constituents;
      try {
        o.mr = codify(tc, *d.constituents, analysis, model, origin_suite, i);
        o.mr->cut = discovered.instances[i].cut;
      } catch (const SliceError& e) {
        o.refusal = Refusal::Slice;
        o.detail = e.what();
      }
    }
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace mrmine::synthesis
