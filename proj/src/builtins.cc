#include "mrmine/builtins.h"

#include <array>

namespace mrmine::builtins {

namespace {

struct Sig {
  std::string_view cls;
  std::string_view method;
  std::size_t arity;
  ir::BaseType result;  // Var: same as the numeric join of the arguments
};

constexpr std::array<Sig, 16> kSigs{{
    {kStringClass, "length", 0, ir::BaseType::Int},
    {kStringClass, "charAt", 1, ir::BaseType::String},
    {kStringClass, "equals", 1, ir::BaseType::Bool},
    {kStringClass, "isEmpty", 0, ir::BaseType::Bool},
    {kStringClass, "concat", 1, ir::BaseType::String},
    {kStringClass, "substring", 2, ir::BaseType::String},
    {kStringClass, "contains", 1, ir::BaseType::Bool},
    {kStringClass, "indexOf", 1, ir::BaseType::Int},
    {kStringClass, "toUpperCase", 0, ir::BaseType::String},
    {kStringClass, "toLowerCase", 0, ir::BaseType::String},
    {kStringClass, "isAlphanumeric", 0, ir::BaseType::Bool},
    {kMathClass, "abs", 1, ir::BaseType::Var},
    {kMathClass, "min", 2, ir::BaseType::Var},
    {kMathClass, "max", 2, ir::BaseType::Var},
    {kMathClass, "sqrt", 1, ir::BaseType::Float},
    {kMathClass, "floor", 1, ir::BaseType::Int},
}};

}  // namespace

bool is_builtin_class(std::string_view name) { return name == kStringClass || name == kMathClass; }

bool is_builtin_method(std::string_view class_name, std::string_view method, std::size_t arity) {
  for (const auto& s : kSigs)
    if (s.cls == class_name && s.method == method && s.arity == arity) return true;
  return false;
}

std::optional<ir::Type> result_type(std::string_view class_name, std::string_view method,
                                    const std::vector<ir::Type>& arg_types) {
  for (const auto& s : kSigs) {
    if (s.cls != class_name || s.method != method || s.arity != arg_types.size()) continue;
    if (s.result != ir::BaseType::Var) return ir::Type{s.result, {}};
    bool any_float = false;
    bool any_unknown = false;
    for (const auto& t : arg_types) {
      any_float |= t.base == ir::BaseType::Float;
      any_unknown |= t.base == ir::BaseType::Var;
    }
    if (any_float) return ir::Type::Float();
    if (any_unknown) return ir::Type::Var();
    return ir::Type::Int();
  }
  return std::nullopt;
}

}  // namespace mrmine::builtins
