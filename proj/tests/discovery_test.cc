#include <gtest/gtest.h>

#include "json.hpp"
#include "mrmine/dataflow.h"
#include "mrmine/discovery.h"
#include "oracle.h"
#include "test_support.h"

using namespace mrmine;
using namespace mrmine::ir;
using namespace mrmine::discovery;
namespace t = mrmine::testing;

namespace {

struct Fixture {
  ProjectModel model = t::corpus_model();
  dataflow::Summaries sums = dataflow::method_writes_summary(model, 3);

  dataflow::TestAnalysis analysis(const std::string& test,
                                  dataflow::Policy p = dataflow::Policy::Conservative) const {
    return dataflow::analyze_test(t::find_test(model, test), model, sums, p);
  }
  DiscoveryResult discover(const std::string& test, dataflow::Policy p = dataflow::Policy::Conservative) const {
    return discover_mtc(t::find_test(model, test), model, sums, p);
  }
};

const Fixture& fx() {
  static const Fixture f;
  return f;
}

DiscoveryResult discover_inline(const std::string& body) {
  auto m = t::model_with(t::test_source(body));
  auto sums = dataflow::method_writes_summary(m, 3);
  return discover_mtc(t::find_test(m, "t"), m, sums, dataflow::Policy::Conservative);
}

}  // namespace

TEST(Invocations, BoldWidthTest) {
  const auto& tc = t::find_test(fx().model, "simulateWidth");
  auto cuts = identify_method_invocations(tc, fx().model);
  ASSERT_TRUE(cuts.by_class.count("com.demo.layout.TextRenderer"));
  EXPECT_TRUE(cuts.p1("com.demo.layout.TextRenderer"));
  EXPECT_EQ(cuts.by_class.at("com.demo.layout.TextRenderer").front(), (InvocationId{"simulateWidth", 1, 0}));
  EXPECT_FALSE(cuts.by_class.count("string"));
}

TEST(Invocations, SingleCallFailsP1) {
  auto cuts = identify_method_invocations(t::find_test(fx().model, "absOfNegative"), fx().model);
  EXPECT_FALSE(cuts.p1("com.demo.math.MathUtil"));
}

TEST(Invocations, ExternalOnlyHasNoCut) {
  auto cuts = identify_method_invocations(t::find_test(fx().model, "thirdPartyMax"), fx().model);
  EXPECT_TRUE(cuts.by_class.empty());
}

TEST(Discover, BoldWidthIsBoolAssert) {
  auto r = fx().discover("simulateWidth");
  ASSERT_TRUE(r.is_mtc);
  ASSERT_EQ(r.instances.size(), 1u);
  const auto& a = r.instances[0].alpha;
  EXPECT_EQ(a.pattern, Pattern::BoolAssert);
  EXPECT_EQ(a.op, "<=");
  EXPECT_EQ(a.mi1.stmt, 1);
  EXPECT_EQ(a.mi2.stmt, 3);
  EXPECT_EQ(a.e1.kind, dataflow::ElementKind::ReturnValue);
  EXPECT_EQ(a.e2.kind, dataflow::ElementKind::ReturnValue);
  EXPECT_EQ(r.instances[0].cut, "com.demo.layout.TextRenderer");
  EXPECT_EQ(r.instances[0].MI.size(), 2u);
}

TEST(Discover, StackUsesPushedLiteral) {
  auto r = fx().discover("pushPop");
  ASSERT_EQ(r.instances.size(), 1u);
  const auto& a = r.instances[0].alpha;
  EXPECT_EQ(a.pattern, Pattern::CompAssert);
  EXPECT_EQ(a.e1.kind, dataflow::ElementKind::ArgLiteral);
  EXPECT_EQ(a.e2.kind, dataflow::ElementKind::ReturnValue);
  EXPECT_EQ(r.instances[0].MI, (std::vector<InvocationId>{{"pushPop", 1, 0}, {"pushPop", 3, 0}}));
}

TEST(Discover, ReassignmentTrapRejected) {
  EXPECT_FALSE(fx().discover("minMaxOverwrite").is_mtc);
  EXPECT_FALSE(fx().discover("overwriteInBranch").is_mtc);
  EXPECT_FALSE(fx().discover("overwrittenRead").is_mtc);
}

TEST(Discover, LogicalOperatorsRejected) {
  EXPECT_FALSE(fx().discover("bothEmpty").is_mtc);
  EXPECT_FALSE(fx().discover("monotoneTwice").is_mtc);
  EXPECT_FALSE(fx().discover("orEquals").is_mtc);
  EXPECT_FALSE(fx().discover("notWider").is_mtc);
}

TEST(Discover, ConstantAssertionsRejected) {
  EXPECT_FALSE(discover_inline(R"(
    Counter c = new Counter();
    int y0 = c.get();
    c.increment();
    int y1 = c.get();
    assertEquals(5, y1);)")
                   .is_mtc);
}

TEST(Discover, BooleanMethodConnective) {
  auto r = fx().discover("negationNotGreater");
  ASSERT_EQ(r.instances.size(), 1u);
  EXPECT_EQ(r.instances[0].alpha.op, "isGreater");
  EXPECT_EQ(r.instances[0].MI.size(), 2u);
}

TEST(Discover, MultipleInstancesOrderedByPair) {
  auto r = fx().discover("evenSteps");
  ASSERT_EQ(r.instances.size(), 2u);
  EXPECT_LT(std::tie(r.instances[0].alpha.mi1, r.instances[0].alpha.mi2),
            std::tie(r.instances[1].alpha.mi1, r.instances[1].alpha.mi2));
  for (const auto& i : r.instances) EXPECT_EQ(i.MI.size(), 3u);
}

TEST(Discover, PolicyFlipsUnresolvableCallee) {
  EXPECT_FALSE(fx().discover("flushKeepsData", dataflow::Policy::Conservative).is_mtc);
  EXPECT_TRUE(fx().discover("flushKeepsData", dataflow::Policy::AssumeMutated).is_mtc);
}

TEST(Discover, NotEqualsCountsAsComparison) {
  auto r = discover_inline(R"(
    Counter c = new Counter();
    int a = c.get();
    c.increment();
    int b = c.get();
    assertNotEquals(a, b);)");
  ASSERT_TRUE(r.is_mtc);
  EXPECT_EQ(r.instances[0].alpha.pattern, Pattern::CompAssert);
}

TEST(Discover, AssertionBeforeSecondCallDoesNotSeeIt) {
  EXPECT_FALSE(discover_inline(R"(
    Counter c = new Counter();
    int a = c.get();
    assertTrue(a >= 0);
    c.increment();
    int b = c.get();)")
                   .is_mtc);
}

TEST(Discover, LabelsMatch) {
  auto labels = nlohmann::json::parse(t::slurp(t::corpus_path("labels.json")));
  std::size_t pos = 0, neg = 0;
  for (const auto& e : labels.at("tests")) {
    std::string test = e.at("test");
    bool want = e.at("mtc");
    EXPECT_EQ(fx().discover(test).is_mtc, want) << test;
    (want ? pos : neg)++;
  }
  EXPECT_GE(pos, 20u);
  EXPECT_GE(neg, 20u);
}

TEST(Discover, OrderInvariant) {
  for (const auto& ref : all_tests(fx().model)) {
    const auto& tc = fx().model.test_suites[ref.suite].test_cases[ref.test];
    for (const auto& i : fx().discover(tc.name).instances) {
      EXPECT_LT(i.alpha.mi1.stmt, i.alpha.mi2.stmt) << tc.name;
      EXPECT_GE(i.MI.size(), 2u);
      EXPECT_TRUE(std::binary_search(i.MI.begin(), i.MI.end(), i.alpha.mi1));
      EXPECT_TRUE(std::binary_search(i.MI.begin(), i.MI.end(), i.alpha.mi2));
    }
  }
}

TEST(Discover, MatchesBruteForceOnSmallTests) {
  std::size_t compared = 0;
  for (const auto& ref : all_tests(fx().model)) {
    const auto& tc = fx().model.test_suites[ref.suite].test_cases[ref.test];
    if (tc.statements.size() > 8) continue;
    auto a = fx().analysis(tc.name);
    EXPECT_EQ(t::discovered_instances(discover_mtc(a, fx().model)), t::brute_force_instances(a, fx().model))
        << tc.name;
    ++compared;
  }
  EXPECT_GE(compared, 40u);
}

TEST(Discover, ParallelMatchesSerial) {
  auto par = discover_all(fx().model, fx().sums, dataflow::Policy::Conservative);
  auto ser = discover_all_serial(fx().model, fx().sums, dataflow::Policy::Conservative);
  ASSERT_EQ(par.size(), ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) {
    EXPECT_EQ(par[i].is_mtc, ser[i].is_mtc);
    EXPECT_EQ(t::discovered_instances(par[i]), t::discovered_instances(ser[i]));
  }
}

TEST(Pattern, Names) {
  EXPECT_EQ(to_string(Pattern::BoolAssert), "A1_BoolAssert");
  EXPECT_EQ(to_string(Pattern::CompAssert), "A2_CompAssert");
}
