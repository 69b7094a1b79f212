// Input generation, execution of codified MRs and the quality filter.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrmine/interpreter.h"
#include "mrmine/synthesis.h"

namespace mrmine::exec {

struct GenConfig {
  std::uint64_t seed = 0;
  std::size_t attempts = 200;
  std::int64_t int_lo = -100;
  std::int64_t int_hi = 100;
  double float_lo = -100.0;
  double float_hi = 100.0;
  std::string alphabet = "abcdefgXYZ0123 <>-_.";
  std::size_t max_string_length = 8;
  int depth_limit = 4;  // nesting depth of generated objects, parameters at depth 1
  // Probability of each boundary value (0, -1, 1, the empty string).
  double boundary_probability = 0.1;
  // Probability that an optional field is filled instead of left at its
  // zero value.
  double fill_probability = 0.75;
};

// Parameter values for one execution; object arguments live in `heap`.
struct InputTuple {
  Heap heap;
  std::vector<Value> args;
};

class UnconstructibleType : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// True when a value of type `t` can be built at `depth` without exceeding
// cfg.depth_limit.
bool constructible(const ir::Type& t, const ir::ProjectModel& model, int depth_limit, int depth = 1);

// Exactly cfg.attempts tuples, fully determined by (cfg.seed, mr.name).
// Throws UnconstructibleType before generating anything if a parameter type
// cannot be built.
std::vector<InputTuple> generate_inputs(const synthesis::CodifiedMR& mr, const ir::ProjectModel& model,
                                        const GenConfig& cfg);

struct Outcome {
  enum class Kind { Pass, RelationViolated, InvalidInput, EngineError };
  Kind kind = Kind::Pass;
  ir::AssertionId assertion;  // RelationViolated
  std::string lhs;
  std::string rhs;
  std::string message;  // exception or engine error text
  int stmt = -1;        // InvalidInput: statement that raised
};

std::string_view to_string(Outcome::Kind k);

Outcome execute_mr(const synthesis::CodifiedMR& mr, const InputTuple& input, const ir::ProjectModel& model,
                   std::uint64_t step_budget = kDefaultStepBudget);

struct FilterConfig {
  GenConfig gen;
  double threshold = 0.95;
  std::size_t min_valid = 5;
  std::uint64_t step_budget = kDefaultStepBudget;
};

struct FilterVerdict {
  std::string name;
  std::size_t generated = 0;
  std::size_t valid = 0;
  std::size_t invalid = 0;
  std::size_t engine_errors = 0;
  std::size_t passed = 0;
  std::size_t violated = 0;
  // passed / valid; 0 when nothing was valid.
  double pass_ratio = 0.0;
  synthesis::Status status = synthesis::Status::Undetermined;
  std::string note;
};

// Status from counts alone.
synthesis::Status classify(std::size_t valid, std::size_t passed, double threshold, std::size_t min_valid);

// Executions of one MR's inputs spread over OpenMP threads; the serial
// version is the reference. Both return identical verdicts.
FilterVerdict filter_mr(const synthesis::CodifiedMR& mr, const ir::ProjectModel& model, const FilterConfig& cfg);
FilterVerdict filter_mr_serial(const synthesis::CodifiedMR& mr, const ir::ProjectModel& model,
                               const FilterConfig& cfg);

// Verdicts in MR-name order; sets each MR's status.
std::vector<FilterVerdict> filter_mrs(std::vector<synthesis::CodifiedMR>& mrs, const ir::ProjectModel& model,
                                      const FilterConfig& cfg);

}  // namespace mrmine::exec
