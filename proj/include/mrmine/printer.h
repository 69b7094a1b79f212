// MiniTest pretty-printer. Output re-parses to the same IR.
#pragma once

#include <string>
#include <vector>

#include "mrmine/ir.h"

namespace mrmine::printer {

std::string print_literal(const ir::Literal& lit);
std::string print_expression(const ir::Expression& e);
// One statement without trailing newline. Bodies of `if`/`while` span
// several lines, indented relative to `indent`.
std::string print_statement(const ir::Statement& s, int indent = 0);
// `@Test` method with its body, every line indented by `indent` spaces.
std::string print_test_case(const ir::TestCaseIR& tc, int indent = 2);
// Class declaration using its simple name; member types are printed fully
// qualified so the text does not depend on the enclosing package.
std::string print_class(const ir::ClassDecl& c);
// A whole source file: optional package line, classes, then test classes.
std::string print_file(const std::string& package, const std::vector<ir::ClassDecl>& classes,
                       const std::vector<ir::TestSuite>& suites);

}  // namespace mrmine::printer
