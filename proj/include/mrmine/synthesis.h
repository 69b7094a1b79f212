// Turns MR instances with two invocations and an explicit input
// transformation into parameterized "codified MR" test methods.
#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mrmine/dataflow.h"
#include "mrmine/discovery.h"
#include "mrmine/ir.h"

namespace mrmine::synthesis {

struct MRConstituents {
  std::vector<std::pair<std::string, std::string>> target_methods;  // (class, method)
  std::vector<dataflow::Element> source_input;                      // X(mi1)
  std::vector<dataflow::Element> followup_input;                    // X(mi2)
  std::vector<int> transform_chain;                                 // statement indices
  std::vector<dataflow::Element> source_output;                     // Y(mi1)
  std::vector<dataflow::Element> followup_output;                   // Y(mi2)
  ir::AssertionId relation_assertion;
  ir::InvocationId mi1;
  ir::InvocationId mi2;
};

enum class Refusal { Arity, NoTransformation, Slice };

// "arity", "no-transformation", "slice"
std::string_view to_string(Refusal r);

struct Deduction {
  std::optional<MRConstituents> constituents;
  Refusal reason = Refusal::Arity;  // meaningful when constituents is empty
  std::string detail;
};

Deduction deduce_constituents(const discovery::MRInstance& instance, const dataflow::TestAnalysis& analysis);

class SliceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Status { Candidate, HighQuality, LowQuality, Undetermined };

std::string_view to_string(Status s);
std::optional<Status> parse_status(std::string_view text);

// Where a parameter's value comes from in the origin test, evaluated just
// before mi1's statement.
struct ParamSource {
  std::string param;
  std::optional<std::string> variable;
  std::optional<ir::Literal> literal;
};

struct CodifiedMR {
  std::string name;
  std::vector<ir::Param> params;
  ir::TestCaseIR body;  // carries the same params
  std::string origin_suite;
  std::string origin_test;
  std::size_t instance_index = 0;
  std::string cut;
  Status status = Status::Candidate;
  int origin_stmt = 0;  // statement of mi1 in the origin test
  std::vector<ParamSource> sources;
};

// `<test>_MR<index>`
std::string mr_name(const std::string& test, std::size_t instance_index);

// Throws SliceError when the body cannot be cut out of the origin test.
CodifiedMR codify(const ir::TestCaseIR& tc, const MRConstituents& c, const dataflow::TestAnalysis& analysis,
                  const ir::ProjectModel& model, const std::string& origin_suite, std::size_t instance_index);

// A standalone MiniTest file holding the MR as a parameterized test method.
// Requires non-empty params.
std::string render(const CodifiedMR& mr);
// Name of the class render() wraps the method in.
std::string render_class_name(const CodifiedMR& mr);

// Per-instance outcome of synthesis for one test case.
struct SynthesisOutcome {
  std::size_t instance_index = 0;
  std::optional<CodifiedMR> mr;
  std::optional<Refusal> refusal;
  std::string detail;
  std::optional<MRConstituents> constituents;
};

std::vector<SynthesisOutcome> synthesize_test(const ir::TestCaseIR& tc, const std::string& origin_suite,
                                              const dataflow::TestAnalysis& analysis,
                                              const discovery::DiscoveryResult& discovered,
                                              const ir::ProjectModel& model);

}  // namespace mrmine::synthesis
