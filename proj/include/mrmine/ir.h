// Language-neutral intermediate representation of subject classes and unit
// tests. Every analysis in mrmine works on these values; they are plain
// value types and are not mutated once a model has been linked.
#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mrmine::ir {

// Heap cell with value semantics, used to break recursion between
// expression and invocation nodes.
template <typename T>
class Box {
 public:
  Box() = delete;
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  const T& operator*() const { return *ptr_; }
  T& operator*() { return *ptr_; }
  const T* operator->() const { return ptr_.get(); }
  T* operator->() { return ptr_.get(); }

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

enum class BaseType { Int, Float, Bool, String, Object, Var };

// Semantic type of a variable, field, parameter or return value. `Var` is
// an unresolved type (lifted temporaries, `var` declarations) that linking
// fills in when it can.
struct Type {
  BaseType base = BaseType::Int;
  std::string class_fqn;  // Object only

  static Type Int() { return {BaseType::Int, {}}; }
  static Type Float() { return {BaseType::Float, {}}; }
  static Type Bool() { return {BaseType::Bool, {}}; }
  static Type String() { return {BaseType::String, {}}; }
  static Type Var() { return {BaseType::Var, {}}; }
  static Type Object(std::string fqn) { return {BaseType::Object, std::move(fqn)}; }

  bool is_object() const { return base == BaseType::Object; }
  // "int", "float", "bool", "string", "var" or the class name.
  std::string str() const;
  static Type parse(std::string_view text);

  bool operator==(const Type&) const = default;
};

struct NullLit {
  bool operator==(const NullLit&) const = default;
};

struct Literal {
  std::variant<NullLit, std::int64_t, double, bool, std::string> value;
  bool operator==(const Literal&) const = default;
};

enum class BinOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Gt, Le, Ge, And, Or };
enum class UnOp { Neg, Not };

std::string_view to_string(BinOp op);
std::string_view to_string(UnOp op);
std::optional<BinOp> parse_binop(std::string_view text);
bool is_comparison(BinOp op);
bool is_logical(BinOp op);

struct Expression;
struct MethodInvocation;

struct VarRef {
  std::string name;
  bool operator==(const VarRef&) const = default;
};

struct FieldAccess {
  Box<Expression> base;
  std::string field;
  bool operator==(const FieldAccess&) const = default;
};

struct BinaryExpr {
  BinOp op;
  Box<Expression> lhs;
  Box<Expression> rhs;
  bool operator==(const BinaryExpr&) const = default;
};

struct UnaryExpr {
  UnOp op;
  Box<Expression> operand;
  bool operator==(const UnaryExpr&) const = default;
};

struct CallExpr {
  Box<MethodInvocation> call;
  bool operator==(const CallExpr&) const = default;
};

struct NewExpr {
  std::string class_fqn;
  std::vector<Expression> args;
  bool operator==(const NewExpr&) const;
};

struct Expression {
  std::variant<Literal, VarRef, FieldAccess, BinaryExpr, UnaryExpr, CallExpr, NewExpr> node;
  bool operator==(const Expression&) const = default;
};

inline bool NewExpr::operator==(const NewExpr&) const = default;

// Identifies a call site: owning test case, statement index, and the
// evaluation-order position of the call inside that statement.
struct InvocationId {
  std::string test;
  int stmt = 0;
  int pos = 0;
  auto operator<=>(const InvocationId&) const = default;
};

struct MethodInvocation {
  InvocationId id;
  // Receiver expression; empty for static calls and implicit `this` calls.
  std::optional<Expression> receiver;
  std::string class_fqn;
  std::string method;
  std::vector<Expression> args;
  std::optional<std::string> return_binding;
  bool operator==(const MethodInvocation&) const = default;
};

enum class AssertApi {
  AssertTrue,
  AssertFalse,
  AssertEquals,
  AssertNotEquals,
  AssertSame,
  AssertNotSame,
  AssertArrayEquals
};

std::string_view to_string(AssertApi api);
std::optional<AssertApi> parse_assert_api(std::string_view text);
std::size_t assert_arity(AssertApi api);

struct AssertionId {
  std::string test;
  int stmt = 0;
  auto operator<=>(const AssertionId&) const = default;
};

struct Assertion {
  AssertionId id;
  AssertApi api = AssertApi::AssertTrue;
  std::vector<Expression> operands;
  bool operator==(const Assertion&) const = default;
};

struct Statement;

struct VarDecl {
  std::string name;
  Type type;
  Expression init;
  bool operator==(const VarDecl&) const = default;
};

// Target is a VarRef or a FieldAccess chain.
struct Assignment {
  Expression target;
  Expression value;
  bool operator==(const Assignment&) const = default;
};

struct InvocationStmt {
  MethodInvocation call;
  bool operator==(const InvocationStmt&) const = default;
};

struct AssertionStmt {
  Assertion assertion;
  bool operator==(const AssertionStmt&) const = default;
};

// `throw IllegalArgument(message)`
struct ThrowStmt {
  Expression message;
  bool operator==(const ThrowStmt&) const = default;
};

// Control flow the frontend does not model inside test bodies.
struct OpaqueRegion {
  std::string text;
  bool operator==(const OpaqueRegion&) const = default;
};

// The remaining statement kinds only occur in subject method bodies.
struct ReturnStmt {
  std::optional<Expression> value;
  bool operator==(const ReturnStmt&) const = default;
};

struct IfStmt {
  Expression cond;
  std::vector<Statement> then_body;
  std::vector<Statement> else_body;
  bool operator==(const IfStmt&) const;
};

struct WhileStmt {
  Expression cond;
  std::vector<Statement> body;
  bool operator==(const WhileStmt&) const;
};

struct Statement {
  int index = 0;
  std::variant<VarDecl, Assignment, InvocationStmt, AssertionStmt, ThrowStmt, OpaqueRegion,
               ReturnStmt, IfStmt, WhileStmt>
      node;
  bool operator==(const Statement&) const = default;
};

inline bool IfStmt::operator==(const IfStmt&) const = default;
inline bool WhileStmt::operator==(const WhileStmt&) const = default;

struct Param {
  std::string name;
  Type type;
  bool operator==(const Param&) const = default;
};

struct FieldDecl {
  std::string name;
  Type type;
  // Object-typed fields marked `required` are never null in generated inputs.
  bool required = false;
  bool operator==(const FieldDecl&) const = default;
};

struct MethodDecl {
  std::string name;
  std::vector<Param> params;
  std::optional<Type> return_type;
  bool is_static = false;
  std::vector<Statement> body;
  // Computed at link time: the body directly assigns a receiver field.
  bool writes_fields = false;
  bool operator==(const MethodDecl&) const = default;
};

struct ClassDecl {
  std::string fqn;
  std::vector<FieldDecl> fields;
  std::vector<MethodDecl> methods;
  std::string file_id;

  const FieldDecl* find_field(std::string_view name) const;
  const MethodDecl* find_method(std::string_view name, std::size_t arity) const;
  bool operator==(const ClassDecl&) const = default;
};

struct SourceSpan {
  std::string file_id;
  int first_line = 0;
  int last_line = 0;
  bool operator==(const SourceSpan&) const = default;
};

struct TestCaseIR {
  std::string name;
  // Only codified MRs carry parameters.
  std::vector<Param> params;
  std::vector<Statement> statements;
  SourceSpan span;
  bool operator==(const TestCaseIR&) const = default;
};

struct TestSuite {
  std::string file_id;
  std::string name;
  std::vector<TestCaseIR> test_cases;
  bool operator==(const TestSuite&) const = default;
};

struct ProjectModel {
  std::vector<std::string> internal_prefixes;
  std::vector<ClassDecl> classes;
  std::vector<TestSuite> test_suites;

  const ClassDecl* find_class(std::string_view fqn) const;
  // Declared in the model and matching a configured prefix on a package
  // boundary.
  bool is_internal(std::string_view fqn) const;
  bool operator==(const ProjectModel&) const = default;
};

bool matches_prefix(std::string_view fqn, std::string_view prefix);

// Equality ignoring source spans.
bool structurally_equal(const TestCaseIR& a, const TestCaseIR& b);

// Expression helpers.
Expression make_var(std::string name);
Expression make_literal(Literal lit);
Expression make_call(MethodInvocation mi);

// Root variable of a VarRef / FieldAccess chain, if any.
std::optional<std::string> root_variable(const Expression& e);

// Calls each MethodInvocation reachable from the expression or statement, in
// evaluation order (receiver, arguments, then the call itself).
template <typename F>
void for_each_invocation(const Expression& e, F&& f);
template <typename F>
void for_each_invocation(const Statement& s, F&& f);

// Names of all VarRefs inside an expression, in left-to-right order.
void collect_vars(const Expression& e, std::vector<std::string>& out);

// Statement-level helpers used by dataflow and slicing.
const MethodInvocation* top_invocation(const Statement& s);
MethodInvocation* top_invocation(Statement& s);
std::optional<std::string> defined_variable(const Statement& s);

// Makes statement indices dense, assigns invocation and assertion ids from
// the test name and statement positions, and binds the return value of each
// top-level call in a declaration or assignment to its target variable.
void renumber(TestCaseIR& tc);

// ---------------------------------------------------------------------------

template <typename F>
void for_each_invocation(const Expression& e, F&& f) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, FieldAccess>) {
          for_each_invocation(*n.base, f);
        } else if constexpr (std::is_same_v<N, BinaryExpr>) {
          for_each_invocation(*n.lhs, f);
          for_each_invocation(*n.rhs, f);
        } else if constexpr (std::is_same_v<N, UnaryExpr>) {
          for_each_invocation(*n.operand, f);
        } else if constexpr (std::is_same_v<N, NewExpr>) {
          for (const auto& a : n.args) for_each_invocation(a, f);
        } else if constexpr (std::is_same_v<N, CallExpr>) {
          const MethodInvocation& mi = *n.call;
          if (mi.receiver) for_each_invocation(*mi.receiver, f);
          for (const auto& a : mi.args) for_each_invocation(a, f);
          f(mi);
        }
      },
      e.node);
}

template <typename F>
void for_each_invocation(const Statement& s, F&& f) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VarDecl>) {
          for_each_invocation(n.init, f);
        } else if constexpr (std::is_same_v<N, Assignment>) {
          for_each_invocation(n.target, f);
          for_each_invocation(n.value, f);
        } else if constexpr (std::is_same_v<N, InvocationStmt>) {
          if (n.call.receiver) for_each_invocation(*n.call.receiver, f);
          for (const auto& a : n.call.args) for_each_invocation(a, f);
          f(n.call);
        } else if constexpr (std::is_same_v<N, AssertionStmt>) {
          for (const auto& o : n.assertion.operands) for_each_invocation(o, f);
        } else if constexpr (std::is_same_v<N, ThrowStmt>) {
          for_each_invocation(n.message, f);
        } else if constexpr (std::is_same_v<N, ReturnStmt>) {
          if (n.value) for_each_invocation(*n.value, f);
        } else if constexpr (std::is_same_v<N, IfStmt>) {
          for_each_invocation(n.cond, f);
          for (const auto& t : n.then_body) for_each_invocation(t, f);
          for (const auto& t : n.else_body) for_each_invocation(t, f);
        } else if constexpr (std::is_same_v<N, WhileStmt>) {
          for_each_invocation(n.cond, f);
          for (const auto& t : n.body) for_each_invocation(t, f);
        }
      },
      s.node);
}

}  // namespace mrmine::ir
