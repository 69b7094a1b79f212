// MiniTest frontend: parses `.mt` source files into IR fragments and links
// fragments into a ProjectModel. The grammar is described in docs/minitest.md.
#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mrmine/ir.h"

namespace mrmine::frontend {

struct SourceFile {
  std::string path;
  std::string text;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string path;
  int line = 0;
  int column = 0;
  std::string message;

  // `path:line:col: severity: message`
  std::string str() const;
};

struct FrontendOptions {
  // Hoist calls nested in arguments and assertion operands into `$tN`
  // temporaries. Calls used as receivers of other calls are always hoisted.
  bool lift_nested_calls = true;
};

struct Fragment {
  std::string path;
  std::string package;
  std::vector<ir::ClassDecl> classes;
  std::vector<ir::TestSuite> suites;
};

struct ParseResult {
  Fragment fragment;
  std::vector<Diagnostic> diagnostics;
  bool has_errors() const;
};

// Never throws on malformed input. A declaration with an error is left out of
// the fragment; everything else in the file is still returned.
ParseResult parse_source(const SourceFile& file, const FrontendOptions& options = {});

class LinkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Joins fragments, resolves receiver classes and `var` types, and computes
// `writes_fields`. Throws LinkError on duplicate class names.
ir::ProjectModel link_project(std::vector<Fragment> fragments,
                              std::vector<std::string> internal_prefixes);

// Type resolution for a test case parsed separately from `model`, e.g. a
// rendered codified MR. Idempotent.
void resolve_test_case(ir::TestCaseIR& tc, const ir::ProjectModel& model);

}  // namespace mrmine::frontend
