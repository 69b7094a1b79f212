#include "mrmine/ir.h"

#include <array>
#include <stdexcept>

namespace mrmine::ir {

std::string Type::str() const {
  switch (base) {
    case BaseType::Int:
      return "int";
    case BaseType::Float:
      return "float";
    case BaseType::Bool:
      return "bool";
    case BaseType::String:
      return "string";
    case BaseType::Var:
      return "var";
    case BaseType::Object:
      return class_fqn;
  }
  return "var";
}

Type Type::parse(std::string_view text) {
  if (text == "int") return Int();
  if (text == "float") return Float();
  if (text == "bool") return Bool();
  if (text == "string") return String();
  if (text == "var") return Var();
  if (text.empty()) throw std::invalid_argument("empty type name");
  return Object(std::string(text));
}

namespace {

constexpr std::array<std::pair<BinOp, std::string_view>, 12> kBinOps{{
    {BinOp::Add, "+"},
    {BinOp::Sub, "-"},
    {BinOp::Mul, "*"},
    {BinOp::Div, "/"},
    {BinOp::Eq, "=="},
    {BinOp::Ne, "!="},
    {BinOp::Lt, "<"},
    {BinOp::Gt, ">"},
    {BinOp::Le, "<="},
    {BinOp::Ge, ">="},
    {BinOp::And, "&&"},
    {BinOp::Or, "||"},
}};

constexpr std::array<std::pair<AssertApi, std::string_view>, 7> kAsserts{{
    {AssertApi::AssertTrue, "assertTrue"},
    {AssertApi::AssertFalse, "assertFalse"},
    {AssertApi::AssertEquals, "assertEquals"},
    {AssertApi::AssertNotEquals, "assertNotEquals"},
    {AssertApi::AssertSame, "assertSame"},
    {AssertApi::AssertNotSame, "assertNotSame"},
    {AssertApi::AssertArrayEquals, "assertArrayEquals"},
}};

}  // namespace

std::string_view to_string(BinOp op) {
  for (const auto& [o, s] : kBinOps)
    if (o == op) return s;
  return "?";
}

std::string_view to_string(UnOp op) { return op == UnOp::Neg ? "-" : "!"; }

std::optional<BinOp> parse_binop(std::string_view text) {
  for (const auto& [o, s] : kBinOps)
    if (s == text) return o;
  return std::nullopt;
}

bool is_comparison(BinOp op) {
  switch (op) {
    case BinOp::Eq:
    case BinOp::Ne:
    case BinOp::Lt:
    case BinOp::Gt:
    case BinOp::Le:
    case BinOp::Ge:
      return true;
    default:
      return false;
  }
}

bool is_logical(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

std::string_view to_string(AssertApi api) {
  for (const auto& [a, s] : kAsserts)
    if (a == api) return s;
  return "?";
}

std::optional<AssertApi> parse_assert_api(std::string_view text) {
  for (const auto& [a, s] : kAsserts)
    if (s == text) return a;
  return std::nullopt;
}

std::size_t assert_arity(AssertApi api) {
  return (api == AssertApi::AssertTrue || api == AssertApi::AssertFalse) ? 1 : 2;
}

const FieldDecl* ClassDecl::find_field(std::string_view name) const {
  for (const auto& f : fields)
    if (f.name == name) return &f;
  return nullptr;
}

const MethodDecl* ClassDecl::find_method(std::string_view name, std::size_t arity) const {
  for (const auto& m : methods)
    if (m.name == name && m.params.size() == arity) return &m;
  return nullptr;
}

const ClassDecl* ProjectModel::find_class(std::string_view fqn) const {
  for (const auto& c : classes)
    if (c.fqn == fqn) return &c;
  return nullptr;
}

bool matches_prefix(std::string_view fqn, std::string_view prefix) {
  if (prefix.empty() || fqn.size() < prefix.size()) return false;
  if (fqn.substr(0, prefix.size()) != prefix) return false;
  return fqn.size() == prefix.size() || prefix.back() == '.' || fqn[prefix.size()] == '.';
}

bool ProjectModel::is_internal(std::string_view fqn) const {
  if (find_class(fqn) == nullptr) return false;
  for (const auto& p : internal_prefixes)
    if (matches_prefix(fqn, p)) return true;
  return false;
}

bool structurally_equal(const TestCaseIR& a, const TestCaseIR& b) {
  return a.name == b.name && a.params == b.params && a.statements == b.statements;
}

Expression make_var(std::string name) { return Expression{VarRef{std::move(name)}}; }

Expression make_literal(Literal lit) { return Expression{std::move(lit)}; }

Expression make_call(MethodInvocation mi) { return Expression{CallExpr{std::move(mi)}}; }

std::optional<std::string> root_variable(const Expression& e) {
  if (const auto* v = std::get_if<VarRef>(&e.node)) return v->name;
  if (const auto* f = std::get_if<FieldAccess>(&e.node)) return root_variable(*f->base);
  return std::nullopt;
}

void collect_vars(const Expression& e, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VarRef>) {
          out.push_back(n.name);
        } else if constexpr (std::is_same_v<N, FieldAccess>) {
          collect_vars(*n.base, out);
        } else if constexpr (std::is_same_v<N, BinaryExpr>) {
          collect_vars(*n.lhs, out);
          collect_vars(*n.rhs, out);
        } else if constexpr (std::is_same_v<N, UnaryExpr>) {
          collect_vars(*n.operand, out);
        } else if constexpr (std::is_same_v<N, NewExpr>) {
          for (const auto& a : n.args) collect_vars(a, out);
        } else if constexpr (std::is_same_v<N, CallExpr>) {
          if (n.call->receiver) collect_vars(*n.call->receiver, out);
          for (const auto& a : n.call->args) collect_vars(a, out);
        }
      },
      e.node);
}

const MethodInvocation* top_invocation(const Statement& s) {
  return top_invocation(const_cast<Statement&>(s));
}

MethodInvocation* top_invocation(Statement& s) {
  if (auto* inv = std::get_if<InvocationStmt>(&s.node)) return &inv->call;
  if (auto* d = std::get_if<VarDecl>(&s.node)) {
    if (auto* c = std::get_if<CallExpr>(&d->init.node)) return &*c->call;
  }
  if (auto* a = std::get_if<Assignment>(&s.node)) {
    if (std::holds_alternative<VarRef>(a->target.node)) {
      if (auto* c = std::get_if<CallExpr>(&a->value.node)) return &*c->call;
    }
  }
  return nullptr;
}

std::optional<std::string> defined_variable(const Statement& s) {
  if (const auto* d = std::get_if<VarDecl>(&s.node)) return d->name;
  if (const auto* a = std::get_if<Assignment>(&s.node)) {
    if (const auto* v = std::get_if<VarRef>(&a->target.node)) return v->name;
  }
  return std::nullopt;
}

void renumber(TestCaseIR& tc) {
  for (std::size_t i = 0; i < tc.statements.size(); ++i) {
    Statement& s = tc.statements[i];
    s.index = static_cast<int>(i);
    int pos = 0;
    for_each_invocation(s, [&](const MethodInvocation& cmi) {
      auto& mi = const_cast<MethodInvocation&>(cmi);
      mi.id = InvocationId{tc.name, s.index, pos++};
      mi.return_binding.reset();
    });
    if (auto* a = std::get_if<AssertionStmt>(&s.node)) a->assertion.id = AssertionId{tc.name, s.index};
    if (MethodInvocation* top = top_invocation(s)) {
      if (!std::holds_alternative<InvocationStmt>(s.node)) top->return_binding = defined_variable(s);
    }
  }
}

}  // namespace mrmine::ir
