#include <gtest/gtest.h>

#include "mrmine/dataflow.h"
#include "mrmine/execution.h"
#include "mrmine/interpreter.h"
#include "test_support.h"

using namespace mrmine;
using namespace mrmine::ir;
using namespace mrmine::dataflow;
namespace t = mrmine::testing;

namespace {

const IoSets& io_at(const TestAnalysis& a, int stmt, int pos = 0) {
  return a.io.at(InvocationId{a.tc->name, stmt, pos});
}

bool has(const std::vector<Element>& es, ElementKind k, int position = -1) {
  for (const auto& e : es)
    if (e.kind == k && (position < 0 || e.position == position)) return true;
  return false;
}

}  // namespace

TEST(DefUse, StraightLineReachingDefs) {
  auto m = t::model_with(t::test_source(R"(
    int x = 1;
    int y = x + 2;
    x = y;
    int z = x + y;)"));
  auto g = build_def_use(t::find_test(m, "t"));
  EXPECT_EQ(g.reaching_def(1, "x"), 0);
  EXPECT_EQ(g.reaching_def(2, "y"), 1);
  EXPECT_EQ(g.reaching_def(3, "x"), 2);
  EXPECT_EQ(g.reaching_def(3, "y"), 1);
  EXPECT_EQ(g.reaching_def(3, "q"), kUndefined);
  EXPECT_EQ(g.defs.at("x"), (std::set<int>{0, 2}));
}

TEST(DefUse, FieldAssignmentDefinesRoot) {
  auto m = t::model_with(t::test_source(R"(
    Stack s = new Stack();
    s.count = 3;
    int n = s.size();)"));
  auto g = build_def_use(t::find_test(m, "t"));
  EXPECT_EQ(g.reaching_def(2, "s"), 1);
}

TEST(DefUse, OpaqueRegionLosesDefinitions) {
  auto m = t::model_with(t::test_source(R"(
    int x = 1;
    int y = 2;
    if (y > 0) { x = 5; }
    int a = x;
    int b = y;)"));
  auto g = build_def_use(t::find_test(m, "t"));
  EXPECT_TRUE(g.opaque_regions.count(2));
  EXPECT_EQ(g.reaching_def(3, "x"), kUndefined);
  EXPECT_EQ(g.reaching_def(4, "y"), kUndefined);
}

TEST(DefUse, ParamsReachAsParamDef) {
  TestCaseIR tc;
  tc.name = "p";
  tc.params.push_back(Param{"v", Type::Int()});
  tc.statements.push_back(Statement{0, VarDecl{"w", Type::Int(), make_var("v")}});
  auto g = build_def_use(tc);
  EXPECT_EQ(g.reaching_def(0, "v"), kParamDef);
}

TEST(OpaqueIdentifiers, SkipsStringsAndComments) {
  auto ids = opaque_identifiers("if (a > b) { c = \"d e\"; // f g\n h = 1; /* i */ }");
  EXPECT_TRUE(ids.count("a"));
  EXPECT_TRUE(ids.count("b"));
  EXPECT_TRUE(ids.count("c"));
  EXPECT_TRUE(ids.count("h"));
  EXPECT_FALSE(ids.count("d"));
  EXPECT_FALSE(ids.count("f"));
  EXPECT_FALSE(ids.count("i"));
}

TEST(Summaries, CorpusMethods) {
  auto m = t::corpus_model();
  auto s = method_writes_summary(m, 3);
  auto get = [&](const char* cls, const char* method, std::size_t n) {
    return s.at(summary_key(cls, method, n));
  };
  auto push = get("com.demo.util.Stack", "push", 1);
  EXPECT_TRUE(push.writes_receiver);
  EXPECT_TRUE(push.reads_receiver);
  EXPECT_FALSE(push.inconclusive);
  auto peek = get("com.demo.util.Stack", "peek", 0);
  EXPECT_TRUE(peek.reads_receiver);
  EXPECT_FALSE(peek.writes_receiver);
  auto abs = get("com.demo.math.MathUtil", "abs", 1);
  EXPECT_FALSE(abs.reads_receiver);
  EXPECT_FALSE(abs.inconclusive);
  EXPECT_EQ(abs.writes_arg, std::vector<bool>{false});
  EXPECT_TRUE(get("com.demo.util.Buffer", "flush", 0).inconclusive);
  EXPECT_TRUE(get("com.demo.geo.Vec", "norm1", 0).reads_receiver);
  EXPECT_FALSE(get("com.demo.geo.Vec", "norm1", 0).inconclusive);
  // setBold builds a new object and leaves its receiver alone.
  EXPECT_FALSE(get("com.demo.layout.Text", "setBold", 0).writes_receiver);
}

TEST(Summaries, DepthLimitMakesCallersInconclusive) {
  auto m = t::corpus_model();
  auto s0 = method_writes_summary(m, 0);
  EXPECT_TRUE(s0.at(summary_key("com.demo.geo.Vec", "norm1", 0)).inconclusive);
  EXPECT_FALSE(s0.at(summary_key("com.demo.util.Stack", "push", 1)).inconclusive);
}

// Summaries are checked against field accesses observed while running each
// method on generated receivers and arguments.
TEST(Summaries, AgreeWithObservedFieldAccess) {
  auto m = t::corpus_model();
  auto sums = method_writes_summary(m, 3);
  exec::GenConfig gen;
  gen.attempts = 40;
  std::size_t checked = 0;
  for (const auto& cls : m.classes) {
    if (!m.is_internal(cls.fqn)) continue;
    for (const auto& method : cls.methods) {
      const MethodSummary& sum = sums.at(summary_key(cls.fqn, method.name, method.params.size()));
      if (sum.inconclusive) continue;
      synthesis::CodifiedMR probe;
      probe.name = cls.fqn + "." + method.name;
      if (!method.is_static) probe.params.push_back(Param{"self", Type::Object(cls.fqn)});
      for (const auto& p : method.params) probe.params.push_back(p);
      std::vector<exec::InputTuple> inputs;
      try {
        inputs = exec::generate_inputs(probe, m, gen);
      } catch (const exec::UnconstructibleType&) {
        continue;
      }
      for (auto& in : inputs) {
        exec::Interpreter interp(m);
        interp.heap() = in.heap;
        std::optional<exec::Value> self;
        std::vector<exec::Value> args = in.args;
        if (!method.is_static) {
          self = args.front();
          args.erase(args.begin());
        }
        std::set<std::size_t> read, written;
        exec::Hooks hooks;
        hooks.on_field = [&](exec::ObjRef o, std::size_t, bool write) { (write ? written : read).insert(o.id); };
        auto id_of = [](const exec::Value& v) -> std::optional<std::size_t> {
          if (const auto* r = std::get_if<exec::ObjRef>(&v)) return r->id;
          return std::nullopt;
        };
        // Field hooks fire only inside run_test, so the call is wrapped in a
        // one-statement test body.
        TestCaseIR body;
        body.name = "probe";
        std::vector<Expression> arg_exprs;
        for (std::size_t i = 0; i < args.size(); ++i) {
          body.params.push_back(Param{"a" + std::to_string(i), method.params[i].type});
          arg_exprs.push_back(make_var("a" + std::to_string(i)));
        }
        MethodInvocation call;
        call.class_fqn = cls.fqn;
        call.method = method.name;
        call.args = arg_exprs;
        std::vector<exec::Value> run_args;
        if (self) {
          body.params.insert(body.params.begin(), Param{"self", Type::Object(cls.fqn)});
          call.receiver = make_var("self");
          run_args.push_back(*self);
        }
        run_args.insert(run_args.end(), args.begin(), args.end());
        body.statements.push_back(Statement{0, InvocationStmt{call}});
        renumber(body);
        auto run = interp.run_test(body, run_args, hooks);
        (void)run;
        if (self) {
          auto sid = *id_of(*self);
          if (written.count(sid)) EXPECT_TRUE(sum.writes_receiver) << probe.name;
          if (read.count(sid)) EXPECT_TRUE(sum.reads_receiver) << probe.name;
        }
        for (std::size_t i = 0; i < args.size(); ++i) {
          auto aid = id_of(args[i]);
          if (aid && written.count(*aid)) EXPECT_TRUE(sum.writes_arg.at(i)) << probe.name << " arg " << i;
        }
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 400u);
}

TEST(IoSets, BoldWidthTest) {
  auto m = t::corpus_model();
  auto sums = method_writes_summary(m, 3);
  auto a = analyze_test(t::find_test(m, "simulateWidth"), m, sums, Policy::Conservative);
  const auto& first = io_at(a, 1);
  EXPECT_TRUE(has(first.X, ElementKind::ReceiverPre));
  EXPECT_TRUE(has(first.Y, ElementKind::ReturnValue));
  EXPECT_FALSE(has(first.Y, ElementKind::ReceiverPost));
  EXPECT_FALSE(first.low_confidence);
}

TEST(IoSets, PushCarriesLiteralAndReceiverState) {
  auto m = t::corpus_model();
  auto sums = method_writes_summary(m, 3);
  auto a = analyze_test(t::find_test(m, "pushPop"), m, sums, Policy::Conservative);
  const auto& push = io_at(a, 1);
  EXPECT_TRUE(has(push.X, ElementKind::ArgLiteral, 0));
  EXPECT_TRUE(has(push.X, ElementKind::ReceiverPre));
  EXPECT_TRUE(has(push.Y, ElementKind::ReceiverPost));
  EXPECT_FALSE(has(push.Y, ElementKind::ReturnValue));
  // stack2 aliases stack1 after the push.
  auto v1 = a.flow.version_at(2, "stack1");
  auto v2 = a.flow.version_at(3, "stack2");
  ASSERT_TRUE(v1 && v2);
  EXPECT_EQ(a.flow.versions[*v1].kind, VersionKind::RecvPost);
}

TEST(IoSets, PolicyDecidesInconclusiveReceiver) {
  auto m = t::corpus_model();
  auto sums = method_writes_summary(m, 3);
  const auto& tc = t::find_test(m, "flushKeepsData");
  auto cons = analyze_test(tc, m, sums, Policy::Conservative);
  auto mut = analyze_test(tc, m, sums, Policy::AssumeMutated);
  EXPECT_FALSE(has(io_at(cons, 1).Y, ElementKind::ReceiverPost));
  EXPECT_TRUE(has(io_at(mut, 1).Y, ElementKind::ReceiverPost));
  EXPECT_TRUE(io_at(mut, 1).low_confidence);
  // An inconclusive callee may read anything, so the receiver is an input
  // under both policies.
  EXPECT_TRUE(has(io_at(cons, 1).X, ElementKind::ReceiverPre));
}

TEST(IoSets, BuiltinCallsHaveNoSets) {
  auto m = t::corpus_model();
  auto sums = method_writes_summary(m, 3);
  auto a = analyze_test(t::find_test(m, "concatLonger"), m, sums, Policy::Conservative);
  EXPECT_TRUE(a.io.empty());
}

TEST(Policy, ParseAndPrint) {
  EXPECT_EQ(parse_policy("conservative"), Policy::Conservative);
  EXPECT_EQ(parse_policy("assume-mutated"), Policy::AssumeMutated);
  EXPECT_FALSE(parse_policy("other").has_value());
  EXPECT_EQ(to_string(Policy::AssumeMutated), "assume-mutated");
}
