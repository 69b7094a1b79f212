// Detection of MR-encoded test cases: at least two invocations of one
// internal class (P1) plus an assertion relating an input or output of one
// invocation to an output of a later one (P2).
#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mrmine/dataflow.h"
#include "mrmine/ir.h"

namespace mrmine::discovery {

struct CutInvocations {
  // Internal classes only, invocations in evaluation order.
  std::map<std::string, std::vector<ir::InvocationId>> by_class;

  bool p1(const std::string& class_fqn) const;
};

CutInvocations identify_method_invocations(const ir::TestCaseIR& tc, const ir::ProjectModel& model);

enum class Pattern { BoolAssert, CompAssert };

std::string_view to_string(Pattern p);

struct RelationAssertionMatch {
  ir::AssertionId assertion;
  Pattern pattern = Pattern::BoolAssert;
  dataflow::Element e1;
  dataflow::Element e2;
  ir::InvocationId mi1;
  ir::InvocationId mi2;
  // Comparison operator for BoolAssert over a comparison, the method name for
  // a boolean CUT method, otherwise the assertion API name.
  std::string op;
};

struct MRInstance {
  RelationAssertionMatch alpha;
  std::vector<ir::InvocationId> MI;  // sorted
  std::string cut;
};

// Value identities reachable from one side of a relation assertion.
// nullopt when any variable on the way has no known value.
using Atoms = std::optional<std::vector<std::string>>;

// The two sides a relation assertion compares, or nullopt when the assertion
// does not fit either pattern. `connective` is the invocation used as A1
// connective, if any.
struct Sides {
  Pattern pattern = Pattern::BoolAssert;
  std::string op;
  std::vector<std::string> lhs;
  std::vector<std::string> rhs;
  std::optional<ir::InvocationId> connective;
};

std::optional<Sides> assertion_sides(const ir::Assertion& a, const dataflow::TestAnalysis& analysis,
                                     const ir::ProjectModel& model);

// All matches of one assertion, one per (mi1, mi2) pair, ordered by the
// statement indices of mi1 then mi2. Empty when the assertion is not a
// relation assertion.
std::vector<RelationAssertionMatch> classify_assertion(const ir::Assertion& a,
                                                       const dataflow::TestAnalysis& analysis,
                                                       const CutInvocations& cuts,
                                                       const ir::ProjectModel& model);

struct DiscoveryResult {
  bool is_mtc = false;
  std::vector<MRInstance> instances;
};

DiscoveryResult discover_mtc(const dataflow::TestAnalysis& analysis, const ir::ProjectModel& model);
DiscoveryResult discover_mtc(const ir::TestCaseIR& tc, const ir::ProjectModel& model,
                             const dataflow::Summaries& summaries,
                             dataflow::Policy policy = dataflow::Policy::Conservative);

// Position of a test case inside model.test_suites.
struct TestRef {
  std::size_t suite = 0;
  std::size_t test = 0;
};

std::vector<TestRef> all_tests(const ir::ProjectModel& model);

// Discovery over every test case of the model, in all_tests order. The
// parallel version splits test cases across OpenMP threads; the serial one is
// the reference it is tested against.
std::vector<DiscoveryResult> discover_all(const ir::ProjectModel& model, const dataflow::Summaries& summaries,
                                          dataflow::Policy policy);
std::vector<DiscoveryResult> discover_all_serial(const ir::ProjectModel& model,
                                                 const dataflow::Summaries& summaries,
                                                 dataflow::Policy policy);

}  // namespace mrmine::discovery
