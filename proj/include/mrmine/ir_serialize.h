// Canonical `.mrir` text form of a ProjectModel (JSON, `ir_version: 1`).
// The schema is documented in docs/ir_schema.md.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mrmine/ir.h"

namespace mrmine::ir {

inline constexpr int kIrVersion = 1;

// Raised by parse_ir. `path()` is a JSONPath-like location such as
// `$.test_suites[0].test_cases[1].statements[3].index`.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

std::string serialize_ir(const ProjectModel& model);
ProjectModel parse_ir(std::string_view text);

// Type invariants of the IR; empty when the model is valid. Each message
// starts with the path of the offending node.
std::vector<std::string> validate_model(const ProjectModel& model);

// Single test case in the same encoding, used for codified MR bodies.
std::string serialize_test_case(const TestCaseIR& tc);
TestCaseIR parse_test_case(std::string_view text);

}  // namespace mrmine::ir
