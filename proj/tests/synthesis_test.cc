#include <gtest/gtest.h>

#include "mrmine/dataflow.h"
#include "mrmine/discovery.h"
#include "mrmine/execution.h"
#include "mrmine/frontend.h"
#include "mrmine/ir_serialize.h"
#include "mrmine/synthesis.h"
#include "replay.h"
#include "test_support.h"

using namespace mrmine;
using namespace mrmine::ir;
using namespace mrmine::synthesis;
namespace t = mrmine::testing;

namespace {

struct Fixture {
  ProjectModel model = t::corpus_model();
  dataflow::Summaries sums = dataflow::method_writes_summary(model, 3);

  std::vector<SynthesisOutcome> synthesize(const std::string& test) const {
    const auto& tc = t::find_test(model, test);
    auto a = dataflow::analyze_test(tc, model, sums, dataflow::Policy::Conservative);
    auto found = discovery::discover_mtc(a, model);
    return synthesize_test(tc, t::suite_of(model, test).name, a, found, model);
  }

  Deduction deduce(const std::string& test, std::size_t i = 0) const {
    const auto& tc = t::find_test(model, test);
    auto a = dataflow::analyze_test(tc, model, sums, dataflow::Policy::Conservative);
    auto found = discovery::discover_mtc(a, model);
    return deduce_constituents(found.instances.at(i), a);
  }

  std::vector<CodifiedMR> all_mrs() const {
    std::vector<CodifiedMR> out;
    for (const auto& s : model.test_suites)
      for (const auto& tc : s.test_cases)
        for (auto& o : synthesize(tc.name))
          if (o.mr) out.push_back(std::move(*o.mr));
    return out;
  }
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

CodifiedMR only_mr(const std::string& test) {
  auto out = fx().synthesize(test);
  for (auto& o : out)
    if (o.mr) return *o.mr;
  throw std::runtime_error("no MR for " + test);
}

TestCaseIR reparse(const std::string& text, const std::string& name) {
  auto r = frontend::parse_source({"mr.mt", text});
  if (r.has_errors()) throw std::runtime_error(r.diagnostics.front().str());
  for (auto& s : r.fragment.suites)
    for (auto& tc : s.test_cases)
      if (tc.name == name) {
        frontend::resolve_test_case(tc, fx().model);
        return tc;
      }
  throw std::runtime_error("missing " + name);
}

}  // namespace

TEST(Deduce, BoldWidthTransformation) {
  auto d = fx().deduce("simulateWidth");
  ASSERT_TRUE(d.constituents);
  EXPECT_EQ(d.constituents->transform_chain, std::vector<int>{2});
  ASSERT_EQ(d.constituents->source_input.size(), 1u);
  EXPECT_EQ(d.constituents->source_input[0].kind, dataflow::ElementKind::ReceiverPre);
  EXPECT_EQ(d.constituents->source_input[0].variable, std::optional<std::string>("textRder"));
  ASSERT_EQ(d.constituents->followup_input.size(), 1u);
  EXPECT_EQ(d.constituents->followup_input[0].variable, std::optional<std::string>("boldTextRder"));
}

TEST(Deduce, StackAliasIsTheTransformation) {
  auto d = fx().deduce("pushPop");
  ASSERT_TRUE(d.constituents);
  EXPECT_EQ(d.constituents->transform_chain, std::vector<int>{2});
  EXPECT_EQ(d.constituents->target_methods.size(), 2u);
}

TEST(Deduce, Refusals) {
  EXPECT_EQ(fx().deduce("absSymmetric").reason, Refusal::NoTransformation);
  EXPECT_EQ(fx().deduce("addCommutes").reason, Refusal::NoTransformation);
  EXPECT_EQ(fx().deduce("evenSteps").reason, Refusal::Arity);
  EXPECT_EQ(fx().deduce("loopOnlyGrows").reason, Refusal::Slice);
  EXPECT_FALSE(fx().deduce("absSymmetric").constituents);
}

TEST(Codify, BoldWidthGolden) {
  CodifiedMR mr = only_mr("simulateWidth");
  EXPECT_EQ(mr.name, "simulateWidth_MR0");
  ASSERT_EQ(mr.params.size(), 1u);
  EXPECT_EQ(mr.params[0], (Param{"textRder", Type::Object("com.demo.layout.TextRenderer")}));
  // The source declaration and the unrelated assertion are gone.
  int asserts = 0;
  for (const auto& s : mr.body.statements) {
    asserts += std::holds_alternative<AssertionStmt>(s.node);
    EXPECT_NE(defined_variable(s), std::optional<std::string>("textRder"));
  }
  EXPECT_EQ(asserts, 1);
  EXPECT_EQ(render(mr), t::slurp(std::string(MRMINE_GOLDEN_DIR) + "/simulateWidth_MR0.mt"));
}

TEST(Codify, StackGoldenPromotesLiteral) {
  CodifiedMR mr = only_mr("pushPop");
  ASSERT_EQ(mr.params.size(), 2u);
  EXPECT_EQ(mr.params[1], (Param{"v", Type::Int()}));
  ASSERT_EQ(mr.sources.size(), 2u);
  EXPECT_EQ(mr.sources[1].literal, (Literal{std::int64_t{3}}));
  EXPECT_EQ(render(mr), t::slurp(std::string(MRMINE_GOLDEN_DIR) + "/pushPop_MR0.mt"));
}

TEST(Codify, OpaqueRegionIsSliceError) {
  auto out = fx().synthesize("loopOnlyGrows");
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0].mr);
  EXPECT_EQ(out[0].refusal, Refusal::Slice);
}

TEST(Codify, Invariants) {
  auto mrs = fx().all_mrs();
  ASSERT_GE(mrs.size(), 10u);
  for (const auto& mr : mrs) {
    std::set<std::string> params;
    for (const auto& p : mr.params) params.insert(p.name);
    EXPECT_EQ(mr.body.params, mr.params) << mr.name;
    int asserts = 0;
    std::set<std::string> defined, used;
    for (const auto& s : mr.body.statements) {
      asserts += std::holds_alternative<AssertionStmt>(s.node);
      auto d = defined_variable(s);
      if (d) EXPECT_FALSE(params.count(*d)) << mr.name << " redefines " << *d;
      auto g = dataflow::build_def_use(mr.body);
      auto it = g.uses.find(s.index);
      if (it != g.uses.end()) {
        for (const auto& u : it->second) {
          used.insert(u);
          // Every free variable is a parameter.
          EXPECT_NE(g.reaching_def(s.index, u), dataflow::kUndefined) << mr.name << " uses " << u;
        }
      }
      if (d) defined.insert(*d);
    }
    EXPECT_EQ(asserts, 1) << mr.name;
    for (const auto& p : params) EXPECT_TRUE(used.count(p)) << mr.name << " leaves " << p << " unused";
    EXPECT_TRUE(validate_model(ProjectModel{{}, {}, {TestSuite{"", "S", {mr.body}}}}).empty()) << mr.name;
  }
}

TEST(Codify, RenderParseRenderFixedPoint) {
  for (const auto& mr : fx().all_mrs()) {
    std::string text = render(mr);
    TestCaseIR back = reparse(text, mr.name);
    EXPECT_TRUE(structurally_equal(back, mr.body)) << mr.name;
    CodifiedMR again = mr;
    again.body = back;
    again.params = back.params;
    EXPECT_EQ(render(again), text) << mr.name;
  }
}

// Executing each MR on the values of its origin test passes.
TEST(Codify, SemanticsPreserved) {
  for (const auto& mr : fx().all_mrs()) {
    auto r = t::replay_mr(mr, t::find_test(fx().model, mr.origin_test), fx().model);
    ASSERT_TRUE(r.reached) << mr.name;
    EXPECT_EQ(r.run.end, exec::TestRun::End::Completed) << mr.name << ": " << r.run.message;
  }
}

// Dropping any single statement either leaves a variable undefined or
// changes a value the relation assertion reads on some generated input.
TEST(Codify, BodiesAreMinimal) {
  exec::GenConfig gen;
  gen.attempts = 60;
  for (const auto& mr : fx().all_mrs()) {
    std::vector<exec::InputTuple> inputs;
    try {
      inputs = exec::generate_inputs(mr, fx().model, gen);
    } catch (const exec::UnconstructibleType&) {
      continue;
    }
    auto observe = [&](const CodifiedMR& x) {
      auto g = dataflow::build_def_use(x.body);
      int relation = x.body.statements.back().index;
      std::vector<std::string> o;
      for (const auto& in : inputs) {
        exec::Interpreter interp(fx().model);
        interp.heap() = in.heap;
        exec::Hooks hooks;
        std::string seen;
        hooks.before_statement = [&](int stmt, const exec::Env& env) {
          if (stmt == relation)
            for (const auto& v : g.uses[stmt]) seen += v + "=" + exec::describe(env.at(v), interp.heap()) + ";";
          return true;
        };
        auto run = interp.run_test(x.body, in.args, hooks);
        o.push_back(seen + std::string(run.end == exec::TestRun::End::Exception ? "!" + run.message : ""));
      }
      return o;
    };
    auto base = observe(mr);
    for (std::size_t drop = 0; drop + 1 < mr.body.statements.size(); ++drop) {
      CodifiedMR cut = mr;
      cut.body.statements.erase(cut.body.statements.begin() + static_cast<std::ptrdiff_t>(drop));
      renumber(cut.body);
      auto g = dataflow::build_def_use(cut.body);
      bool undefined = false;
      for (const auto& [stmt, vars] : g.uses)
        for (const auto& v : vars) undefined = undefined || g.reaching_def(stmt, v) == dataflow::kUndefined;
      if (undefined) continue;
      EXPECT_NE(observe(cut), base) << mr.name << " without statement " << drop;
    }
  }
}

TEST(Render, EmptyParamsRejected) {
  CodifiedMR mr = only_mr("simulateWidth");
  mr.body.params.clear();
  EXPECT_THROW(render(mr), std::logic_error);
}

TEST(Names, Format) {
  EXPECT_EQ(mr_name("pushPop", 0), "pushPop_MR0");
  EXPECT_EQ(to_string(Refusal::NoTransformation), "no-transformation");
  EXPECT_EQ(parse_status("high_quality"), Status::HighQuality);
  EXPECT_FALSE(parse_status("great").has_value());
}
