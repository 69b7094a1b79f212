// Tree-walking interpreter for MiniTest subject classes and test bodies.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mrmine/ir.h"

namespace mrmine::exec {

inline constexpr std::uint64_t kDefaultStepBudget = 1'000'000;

struct Null {
  bool operator==(const Null&) const = default;
};

struct ObjRef {
  std::size_t id = 0;
  bool operator==(const ObjRef&) const = default;
};

using Value = std::variant<Null, std::int64_t, double, bool, std::string, ObjRef>;

struct Object {
  std::string class_fqn;
  std::vector<Value> fields;  // in declaration order
};

struct Heap {
  std::vector<Object> objects;

  ObjRef alloc(Object o);
  Object& at(ObjRef r) { return objects.at(r.id); }
  const Object& at(ObjRef r) const { return objects.at(r.id); }
};

// Default value of a field or variable of type `t`.
Value zero_value(const ir::Type& t);

// Structural equality: numbers by value, strings by content, objects field by
// field. Used by assertEquals.
bool values_equal(const Value& a, const Value& b, const Heap& heap);
// Identity for objects, value equality otherwise. Used by assertSame and ==.
bool values_identical(const Value& a, const Value& b);

// Human-readable rendering, objects shown with their fields up to `depth`.
std::string describe(const Value& v, const Heap& heap, int depth = 2);

// Fault of the interpreter or of the program's typing, never of the subject's
// behavior on its input.
class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exception raised by subject code: `throw IllegalArgument(...)`, null
// dereference, index out of range, integer division by zero.
class SubjectException : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Env = std::map<std::string, Value>;

struct Hooks {
  // Called before each top-level statement of a test body; returning false
  // stops the run.
  std::function<bool(int stmt, const Env& env)> before_statement;
  // Called on every field read or write.
  std::function<void(ObjRef obj, std::size_t field, bool write)> on_field;
};

struct AssertionFailure {
  ir::AssertionId id;
  std::string lhs;
  std::string rhs;
};

struct TestRun {
  enum class End { Completed, Stopped, AssertionFailed, Exception };
  End end = End::Completed;
  int stmt = -1;  // statement the run ended at; -1 when completed
  std::string message;
  std::optional<AssertionFailure> failure;
  Env env;
};

class Interpreter {
 public:
  explicit Interpreter(const ir::ProjectModel& model, std::uint64_t step_budget = kDefaultStepBudget);

  Heap& heap() { return heap_; }
  const Heap& heap() const { return heap_; }
  std::uint64_t steps() const { return steps_; }

  // Calls a declared method. Throws SubjectException or EngineError.
  // Returns Null for void methods.
  Value call(const std::string& class_fqn, const std::string& method, std::optional<Value> receiver,
             std::vector<Value> args);

  // Runs a test body with values bound to its parameters. SubjectException
  // and assertion failures end the run; EngineError propagates.
  TestRun run_test(const ir::TestCaseIR& tc, const std::vector<Value>& args, const Hooks& hooks = {});

 private:
  struct Frame;
  enum class Flow { Normal, Return };

  Value eval(const ir::Expression& e, Frame& f);
  Value invoke(const ir::MethodInvocation& mi, Frame& f);
  Value call_declared(const ir::ClassDecl& cls, const ir::MethodDecl& m, std::optional<Value> self,
                      std::vector<Value> args);
  Value builtin(const std::string& cls, const std::string& method, const std::optional<Value>& self,
                const std::vector<Value>& args);
  Value binary(ir::BinOp op, const ir::BinaryExpr& b, Frame& f);
  Value construct(const std::string& class_fqn, std::vector<Value> args);
  Flow exec(const ir::Statement& s, Frame& f);
  Flow exec_block(const std::vector<ir::Statement>& body, Frame& f);
  void assign(const ir::Expression& target, Value v, Frame& f);
  void check_assertion(const ir::Assertion& a, Frame& f);
  ObjRef deref(const Value& v, const char* what);
  std::size_t field_index(const ir::ClassDecl& cls, const std::string& field) const;
  const ir::ClassDecl& class_of(const std::string& fqn) const;
  void step();

  const ir::ProjectModel& model_;
  std::uint64_t budget_;
  std::uint64_t steps_ = 0;
  int depth_ = 0;
  Heap heap_;
  const Hooks* hooks_ = nullptr;
  std::optional<AssertionFailure> failure_;
};

// Single method call on a fresh heap, for tests and the CLI.
struct InterpretResult {
  std::optional<Value> value;
  std::optional<std::string> exception;  // subject-level exception message
  Heap heap;
};

InterpretResult interpret(const ir::ProjectModel& model, const std::string& class_fqn, const std::string& method,
                          std::optional<Value> receiver, std::vector<Value> args,
                          std::uint64_t step_budget = kDefaultStepBudget, Heap heap = {});

}  // namespace mrmine::exec
