// Built-in library available to MiniTest programs: instance methods on
// `string` values and static methods on the `Math` class. Builtins are pure.
#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "mrmine/ir.h"

namespace mrmine::builtins {

inline constexpr std::string_view kStringClass = "string";
inline constexpr std::string_view kMathClass = "Math";

bool is_builtin_class(std::string_view name);

// Result type of a builtin call, or nullopt if no such builtin exists.
// `Var` argument types are accepted where a numeric type is expected.
std::optional<ir::Type> result_type(std::string_view class_name, std::string_view method,
                                    const std::vector<ir::Type>& arg_types);

bool is_builtin_method(std::string_view class_name, std::string_view method, std::size_t arity);

}  // namespace mrmine::builtins
