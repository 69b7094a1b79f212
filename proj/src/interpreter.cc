#include "mrmine/interpreter.h"

#include <charconv>
#include <cmath>
#include <limits>
#include <set>

#include "mrmine/builtins.h"

namespace mrmine::exec {

using namespace mrmine::ir;

namespace {

constexpr int kMaxCallDepth = 2000;

std::string type_name(const Value& v) {
  switch (v.index()) {
    case 0:
      return "null";
    case 1:
      return "int";
    case 2:
      return "float";
    case 3:
      return "bool";
    case 4:
      return "string";
    default:
      return "object";
  }
}

std::string float_text(double d) {
  if (std::isnan(d)) return "NaN";
  if (std::isinf(d)) return d > 0 ? "Infinity" : "-Infinity";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

bool is_numeric(const Value& v) {
  return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

double as_double(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  return std::get<double>(v);
}

// Two's complement wrap-around, as in Java.
std::int64_t wrap_add(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) + static_cast<std::uint64_t>(b));
}
std::int64_t wrap_sub(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) - static_cast<std::uint64_t>(b));
}
std::int64_t wrap_mul(std::int64_t a, std::int64_t b) {
  return static_cast<std::int64_t>(static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b));
}

// Converts a value for storage in a slot of type `t`.
Value coerce(Value v, const Type& t, const char* what) {
  auto mismatch = [&]() {
    return EngineError(std::string("type mismatch in ") + what + ": expected " + t.str() + ", got " +
                       type_name(v));
  };
  switch (t.base) {
    case BaseType::Var:
      return v;
    case BaseType::Int:
      if (!std::holds_alternative<std::int64_t>(v)) throw mismatch();
      return v;
    case BaseType::Float:
      if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
      if (!std::holds_alternative<double>(v)) throw mismatch();
      return v;
    case BaseType::Bool:
      if (!std::holds_alternative<bool>(v)) throw mismatch();
      return v;
    case BaseType::String:
      if (!std::holds_alternative<std::string>(v) && !std::holds_alternative<Null>(v)) throw mismatch();
      return v;
    case BaseType::Object:
      if (!std::holds_alternative<ObjRef>(v) && !std::holds_alternative<Null>(v)) throw mismatch();
      return v;
  }
  return v;
}

bool truthy(const Value& v, const char* what) {
  if (const auto* b = std::get_if<bool>(&v)) return *b;
  throw EngineError(std::string(what) + " is not a bool but " + type_name(v));
}

std::int64_t as_int(const Value& v, const char* what) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return *i;
  throw EngineError(std::string(what) + " is not an int but " + type_name(v));
}

const std::string& as_string(const Value& v, const char* what) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (std::holds_alternative<Null>(v)) throw SubjectException(std::string("null dereference in ") + what);
  throw EngineError(std::string(what) + " is not a string but " + type_name(v));
}

bool equal_rec(const Value& a, const Value& b, const Heap& heap, std::set<std::pair<std::size_t, std::size_t>>& seen) {
  if (is_numeric(a) && is_numeric(b)) return as_double(a) == as_double(b);
  if (a.index() != b.index()) return false;
  const auto* ra = std::get_if<ObjRef>(&a);
  if (!ra) return a == b;
  const auto& rb = std::get<ObjRef>(b);
  if (ra->id == rb.id) return true;
  if (!seen.insert({ra->id, rb.id}).second) return true;
  const Object& oa = heap.at(*ra);
  const Object& ob = heap.at(rb);
  if (oa.class_fqn != ob.class_fqn || oa.fields.size() != ob.fields.size()) return false;
  for (std::size_t i = 0; i < oa.fields.size(); ++i)
    if (!equal_rec(oa.fields[i], ob.fields[i], heap, seen)) return false;
  return true;
}

}  // namespace

ObjRef Heap::alloc(Object o) {
  objects.push_back(std::move(o));
  return ObjRef{objects.size() - 1};
}

Value zero_value(const Type& t) {
  switch (t.base) {
    case BaseType::Int:
      return std::int64_t{0};
    case BaseType::Float:
      return 0.0;
    case BaseType::Bool:
      return false;
    case BaseType::String:
      return std::string();
    default:
      return Null{};
  }
}

bool values_equal(const Value& a, const Value& b, const Heap& heap) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  return equal_rec(a, b, heap, seen);
}

bool values_identical(const Value& a, const Value& b) {
  if (is_numeric(a) && is_numeric(b)) return as_double(a) == as_double(b);
  return a == b;
}

std::string describe(const Value& v, const Heap& heap, int depth) {
  return std::visit(
      [&](const auto& x) -> std::string {
        using X = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<X, Null>) {
          return "null";
        } else if constexpr (std::is_same_v<X, std::int64_t>) {
          return std::to_string(x);
        } else if constexpr (std::is_same_v<X, double>) {
          return float_text(x);
        } else if constexpr (std::is_same_v<X, bool>) {
          return x ? "true" : "false";
        } else if constexpr (std::is_same_v<X, std::string>) {
          return "\"" + x + "\"";
        } else {
          const Object& o = heap.at(x);
          std::string out = o.class_fqn;
          if (depth <= 0) return out + "{...}";
          out += "{";
          for (std::size_t i = 0; i < o.fields.size(); ++i) {
            if (i) out += ", ";
            out += describe(o.fields[i], heap, depth - 1);
          }
          return out + "}";
        }
      },
      v);
}

// ---------------------------------------------------------------------------

struct Interpreter::Frame {
  const ClassDecl* cls = nullptr;
  std::optional<Value> self;
  Env locals;
  Value ret = Null{};
};

Interpreter::Interpreter(const ProjectModel& model, std::uint64_t step_budget)
    : model_(model), budget_(step_budget) {}

void Interpreter::step() {
  if (++steps_ > budget_) throw EngineError("budget");
}

const ClassDecl& Interpreter::class_of(const std::string& fqn) const {
  const ClassDecl* c = model_.find_class(fqn);
  if (!c) throw EngineError("call into undeclared class '" + fqn + "'");
  return *c;
}

std::size_t Interpreter::field_index(const ClassDecl& cls, const std::string& field) const {
  for (std::size_t i = 0; i < cls.fields.size(); ++i)
    if (cls.fields[i].name == field) return i;
  throw EngineError("class '" + cls.fqn + "' has no field '" + field + "'");
}

ObjRef Interpreter::deref(const Value& v, const char* what) {
  if (const auto* r = std::get_if<ObjRef>(&v)) return *r;
  if (std::holds_alternative<Null>(v)) throw SubjectException(std::string("null dereference in ") + what);
  throw EngineError(std::string(what) + " on a " + type_name(v) + " value");
}

Value Interpreter::construct(const std::string& class_fqn, std::vector<Value> args) {
  const ClassDecl& cls = class_of(class_fqn);
  if (args.size() > cls.fields.size())
    throw EngineError("too many arguments to new " + class_fqn);
  Object o;
  o.class_fqn = cls.fqn;
  for (std::size_t i = 0; i < cls.fields.size(); ++i) {
    o.fields.push_back(i < args.size() ? coerce(std::move(args[i]), cls.fields[i].type, "constructor argument")
                                       : zero_value(cls.fields[i].type));
  }
  return heap_.alloc(std::move(o));
}

Value Interpreter::binary(BinOp op, const BinaryExpr& b, Frame& f) {
  if (op == BinOp::And || op == BinOp::Or) {
    bool l = truthy(eval(*b.lhs, f), "operand of logical operator");
    if (op == BinOp::And && !l) return false;
    if (op == BinOp::Or && l) return true;
    return truthy(eval(*b.rhs, f), "operand of logical operator");
  }
  Value l = eval(*b.lhs, f);
  Value r = eval(*b.rhs, f);
  if (op == BinOp::Eq) return values_identical(l, r);
  if (op == BinOp::Ne) return !values_identical(l, r);
  if (op == BinOp::Add && (std::holds_alternative<std::string>(l) || std::holds_alternative<std::string>(r))) {
    auto text = [&](const Value& v) -> std::string {
      if (const auto* s = std::get_if<std::string>(&v)) return *s;
      if (std::holds_alternative<ObjRef>(v)) throw EngineError("string concatenation with an object");
      return describe(v, heap_);
    };
    return text(l) + text(r);
  }
  if (!is_numeric(l) || !is_numeric(r))
    throw EngineError("operator " + std::string(to_string(op)) + " on " + type_name(l) + " and " + type_name(r));
  if (is_comparison(op)) {
    double x = as_double(l);
    double y = as_double(r);
    if (std::holds_alternative<std::int64_t>(l) && std::holds_alternative<std::int64_t>(r)) {
      auto i = std::get<std::int64_t>(l);
      auto j = std::get<std::int64_t>(r);
      switch (op) {
        case BinOp::Lt:
          return i < j;
        case BinOp::Gt:
          return i > j;
        case BinOp::Le:
          return i <= j;
        default:
          return i >= j;
      }
    }
    switch (op) {
      case BinOp::Lt:
        return x < y;
      case BinOp::Gt:
        return x > y;
      case BinOp::Le:
        return x <= y;
      default:
        return x >= y;
    }
  }
  if (std::holds_alternative<std::int64_t>(l) && std::holds_alternative<std::int64_t>(r)) {
    auto i = std::get<std::int64_t>(l);
    auto j = std::get<std::int64_t>(r);
    switch (op) {
      case BinOp::Add:
        return wrap_add(i, j);
      case BinOp::Sub:
        return wrap_sub(i, j);
      case BinOp::Mul:
        return wrap_mul(i, j);
      default:
        if (j == 0) throw SubjectException("division by zero");
        if (i == std::numeric_limits<std::int64_t>::min() && j == -1) return i;
        return i / j;
    }
  }
  double x = as_double(l);
  double y = as_double(r);
  switch (op) {
    case BinOp::Add:
      return x + y;
    case BinOp::Sub:
      return x - y;
    case BinOp::Mul:
      return x * y;
    default:
      return x / y;
  }
}

Value Interpreter::eval(const Expression& e, Frame& f) {
  step();
  return std::visit(
      [&](const auto& n) -> Value {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Literal>) {
          return std::visit(
              [](const auto& x) -> Value {
                using X = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<X, NullLit>) {
                  return Null{};
                } else {
                  return x;
                }
              },
              n.value);
        } else if constexpr (std::is_same_v<N, VarRef>) {
          if (n.name == "this") {
            if (!f.self) throw EngineError("'this' outside an instance method");
            return *f.self;
          }
          auto it = f.locals.find(n.name);
          if (it == f.locals.end()) throw EngineError("undefined variable '" + n.name + "'");
          return it->second;
        } else if constexpr (std::is_same_v<N, FieldAccess>) {
          ObjRef r = deref(eval(*n.base, f), "field read");
          std::size_t idx = field_index(class_of(heap_.at(r).class_fqn), n.field);
          if (hooks_ && hooks_->on_field) hooks_->on_field(r, idx, false);
          return heap_.at(r).fields[idx];
        } else if constexpr (std::is_same_v<N, BinaryExpr>) {
          return binary(n.op, n, f);
        } else if constexpr (std::is_same_v<N, UnaryExpr>) {
          Value v = eval(*n.operand, f);
          if (n.op == UnOp::Not) return !truthy(v, "operand of '!'");
          if (const auto* i = std::get_if<std::int64_t>(&v)) return wrap_sub(0, *i);
          if (const auto* d = std::get_if<double>(&v)) return -*d;
          throw EngineError("negation of a " + type_name(v));
        } else if constexpr (std::is_same_v<N, CallExpr>) {
          return invoke(*n.call, f);
        } else {
          std::vector<Value> args;
          for (const auto& a : n.args) args.push_back(eval(a, f));
          return construct(n.class_fqn, std::move(args));
        }
      },
      e.node);
}

Value Interpreter::invoke(const MethodInvocation& mi, Frame& f) {
  std::optional<Value> self;
  if (mi.receiver) self = eval(*mi.receiver, f);
  std::vector<Value> args;
  for (const auto& a : mi.args) args.push_back(eval(a, f));

  if (self) {
    if (std::holds_alternative<std::string>(*self))
      return builtin(std::string(builtins::kStringClass), mi.method, self, args);
    ObjRef r = deref(*self, ("call of " + mi.method).c_str());
    const ClassDecl& cls = class_of(heap_.at(r).class_fqn);
    const MethodDecl* m = cls.find_method(mi.method, args.size());
    if (!m) throw EngineError("class '" + cls.fqn + "' has no method '" + mi.method + "'");
    if (m->is_static) throw EngineError("static method '" + mi.method + "' called on an object");
    return call_declared(cls, *m, self, std::move(args));
  }
  if (builtins::is_builtin_class(mi.class_fqn)) return builtin(mi.class_fqn, mi.method, std::nullopt, args);
  const ClassDecl& cls = class_of(mi.class_fqn);
  const MethodDecl* m = cls.find_method(mi.method, args.size());
  if (!m) throw EngineError("class '" + cls.fqn + "' has no method '" + mi.method + "'");
  if (!m->is_static) {
    // Unqualified call to an instance method of the enclosing class.
    if (!f.self || f.cls != &cls) throw EngineError("instance method '" + mi.method + "' called without receiver");
    self = f.self;
  }
  return call_declared(cls, *m, self, std::move(args));
}

Value Interpreter::call_declared(const ClassDecl& cls, const MethodDecl& m, std::optional<Value> self,
                                 std::vector<Value> args) {
  if (++depth_ > kMaxCallDepth) {
    --depth_;
    throw EngineError("call depth exceeded");
  }
  struct DepthReset {
    int& d;
    ~DepthReset() { --d; }
  } reset{depth_};
  if (args.size() != m.params.size()) throw EngineError("arity mismatch calling " + m.name);
  Frame frame;
  frame.cls = &cls;
  if (!m.is_static) frame.self = std::move(self);
  for (std::size_t i = 0; i < args.size(); ++i)
    frame.locals[m.params[i].name] = coerce(std::move(args[i]), m.params[i].type, "argument");
  exec_block(m.body, frame);
  if (!m.return_type) return Null{};
  return coerce(std::move(frame.ret), *m.return_type, "return value");
}

Value Interpreter::builtin(const std::string& cls, const std::string& method, const std::optional<Value>& self,
                           const std::vector<Value>& args) {
  if (!builtins::is_builtin_method(cls, method, args.size()))
    throw EngineError("unknown builtin " + cls + "." + method + "/" + std::to_string(args.size()));
  if (cls == builtins::kStringClass) {
    const std::string& s = as_string(*self, "string method");
    auto index = [&](const Value& v, std::size_t limit) {
      std::int64_t i = as_int(v, "string index");
      if (i < 0 || static_cast<std::size_t>(i) > limit) throw SubjectException("string index out of range");
      return static_cast<std::size_t>(i);
    };
    if (method == "length") return static_cast<std::int64_t>(s.size());
    if (method == "isEmpty") return s.empty();
    if (method == "charAt") {
      if (s.empty()) throw SubjectException("string index out of range");
      return std::string(1, s[index(args[0], s.size() - 1)]);
    }
    if (method == "equals") {
      const auto* o = std::get_if<std::string>(&args[0]);
      return o != nullptr && *o == s;
    }
    if (method == "concat") return s + as_string(args[0], "concat argument");
    if (method == "substring") {
      std::size_t b = index(args[0], s.size());
      std::size_t e = index(args[1], s.size());
      if (b > e) throw SubjectException("string index out of range");
      return s.substr(b, e - b);
    }
    if (method == "contains") return s.find(as_string(args[0], "contains argument")) != std::string::npos;
    if (method == "indexOf") {
      auto pos = s.find(as_string(args[0], "indexOf argument"));
      return pos == std::string::npos ? std::int64_t{-1} : static_cast<std::int64_t>(pos);
    }
    if (method == "toUpperCase" || method == "toLowerCase") {
      std::string out = s;
      for (char& c : out) {
        if (method == "toUpperCase" && c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        if (method == "toLowerCase" && c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      }
      return out;
    }
    // isAlphanumeric
    if (s.empty()) return false;
    for (char c : s) {
      bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
      if (!alnum) return false;
    }
    return true;
  }
  // Math
  for (const auto& a : args)
    if (!is_numeric(a)) throw EngineError("Math." + method + " on a " + type_name(a));
  bool all_int = true;
  for (const auto& a : args) all_int = all_int && std::holds_alternative<std::int64_t>(a);
  if (method == "abs") {
    if (all_int) {
      auto i = std::get<std::int64_t>(args[0]);
      return i < 0 ? wrap_sub(0, i) : i;
    }
    return std::fabs(as_double(args[0]));
  }
  if (method == "min" || method == "max") {
    bool mn = method == "min";
    if (all_int) {
      auto a = std::get<std::int64_t>(args[0]);
      auto b = std::get<std::int64_t>(args[1]);
      return mn ? std::min(a, b) : std::max(a, b);
    }
    double a = as_double(args[0]);
    double b = as_double(args[1]);
    if (std::isnan(a) || std::isnan(b)) return std::nan("");
    return mn ? std::min(a, b) : std::max(a, b);
  }
  if (method == "sqrt") return std::sqrt(as_double(args[0]));
  // floor, saturating like a Java long cast
  double d = std::floor(as_double(args[0]));
  if (std::isnan(d)) return std::int64_t{0};
  if (d >= 9.2233720368547758e18) return std::numeric_limits<std::int64_t>::max();
  if (d <= -9.2233720368547758e18) return std::numeric_limits<std::int64_t>::min();
  return static_cast<std::int64_t>(d);
}

void Interpreter::assign(const Expression& target, Value v, Frame& f) {
  if (const auto* var = std::get_if<VarRef>(&target.node)) {
    auto it = f.locals.find(var->name);
    if (it == f.locals.end()) throw EngineError("assignment to undeclared variable '" + var->name + "'");
    // Keep the slot's numeric kind: an int stored into a float variable
    // widens.
    if (std::holds_alternative<double>(it->second) && std::holds_alternative<std::int64_t>(v))
      v = static_cast<double>(std::get<std::int64_t>(v));
    it->second = std::move(v);
    return;
  }
  const auto& fa = std::get<FieldAccess>(target.node);
  ObjRef r = deref(eval(*fa.base, f), "field write");
  const ClassDecl& cls = class_of(heap_.at(r).class_fqn);
  std::size_t idx = field_index(cls, fa.field);
  Value stored = coerce(std::move(v), cls.fields[idx].type, "field assignment");
  if (hooks_ && hooks_->on_field) hooks_->on_field(r, idx, true);
  heap_.at(r).fields[idx] = std::move(stored);
}

void Interpreter::check_assertion(const Assertion& a, Frame& f) {
  std::vector<Value> vals;
  for (const auto& o : a.operands) vals.push_back(eval(o, f));
  bool ok = false;
  switch (a.api) {
    case AssertApi::AssertTrue:
      ok = truthy(vals.at(0), "assertTrue operand");
      break;
    case AssertApi::AssertFalse:
      ok = !truthy(vals.at(0), "assertFalse operand");
      break;
    case AssertApi::AssertEquals:
    case AssertApi::AssertArrayEquals:
      ok = values_equal(vals.at(0), vals.at(1), heap_);
      break;
    case AssertApi::AssertNotEquals:
      ok = !values_equal(vals.at(0), vals.at(1), heap_);
      break;
    case AssertApi::AssertSame:
      ok = values_identical(vals.at(0), vals.at(1));
      break;
    case AssertApi::AssertNotSame:
      ok = !values_identical(vals.at(0), vals.at(1));
      break;
  }
  if (ok) return;
  AssertionFailure fail;
  fail.id = a.id;
  fail.lhs = describe(vals.at(0), heap_);
  if (vals.size() > 1) fail.rhs = describe(vals[1], heap_);
  failure_ = std::move(fail);
}

Interpreter::Flow Interpreter::exec(const Statement& s, Frame& f) {
  step();
  return std::visit(
      [&](const auto& n) -> Flow {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VarDecl>) {
          f.locals[n.name] = coerce(eval(n.init, f), n.type, "declaration");
        } else if constexpr (std::is_same_v<N, Assignment>) {
          assign(n.target, eval(n.value, f), f);
        } else if constexpr (std::is_same_v<N, InvocationStmt>) {
          invoke(n.call, f);
        } else if constexpr (std::is_same_v<N, AssertionStmt>) {
          check_assertion(n.assertion, f);
        } else if constexpr (std::is_same_v<N, ThrowStmt>) {
          Value msg = eval(n.message, f);
          const auto* text = std::get_if<std::string>(&msg);
          throw SubjectException("IllegalArgument: " + (text ? *text : describe(msg, heap_)));
        } else if constexpr (std::is_same_v<N, OpaqueRegion>) {
          throw EngineError("cannot execute opaque region");
        } else if constexpr (std::is_same_v<N, ReturnStmt>) {
          f.ret = n.value ? eval(*n.value, f) : Value{Null{}};
          return Flow::Return;
        } else if constexpr (std::is_same_v<N, IfStmt>) {
          if (truthy(eval(n.cond, f), "if condition")) return exec_block(n.then_body, f);
          return exec_block(n.else_body, f);
        } else if constexpr (std::is_same_v<N, WhileStmt>) {
          while (truthy(eval(n.cond, f), "while condition")) {
            if (exec_block(n.body, f) == Flow::Return) return Flow::Return;
          }
        }
        return Flow::Normal;
      },
      s.node);
}

Interpreter::Flow Interpreter::exec_block(const std::vector<Statement>& body, Frame& f) {
  // Block-scoped locals: declarations inside the block vanish on exit.
  std::set<std::string> outer;
  for (const auto& [k, v] : f.locals) outer.insert(k);
  Flow flow = Flow::Normal;
  for (const auto& s : body) {
    if (exec(s, f) == Flow::Return) {
      flow = Flow::Return;
      break;
    }
  }
  for (auto it = f.locals.begin(); it != f.locals.end();) {
    it = outer.count(it->first) ? std::next(it) : f.locals.erase(it);
  }
  return flow;
}

Value Interpreter::call(const std::string& class_fqn, const std::string& method, std::optional<Value> receiver,
                        std::vector<Value> args) {
  if (builtins::is_builtin_class(class_fqn)) return builtin(class_fqn, method, receiver, args);
  const ClassDecl& cls = class_of(class_fqn);
  const MethodDecl* m = cls.find_method(method, args.size());
  if (!m) throw EngineError("class '" + class_fqn + "' has no method '" + method + "'");
  if (!m->is_static && !receiver) throw EngineError("instance method '" + method + "' needs a receiver");
  return call_declared(cls, *m, std::move(receiver), std::move(args));
}

TestRun Interpreter::run_test(const TestCaseIR& tc, const std::vector<Value>& args, const Hooks& hooks) {
  hooks_ = &hooks;
  struct HookReset {
    const Hooks*& h;
    ~HookReset() { h = nullptr; }
  } reset{hooks_};
  if (args.size() != tc.params.size()) throw EngineError("test '" + tc.name + "' expects " +
                                                        std::to_string(tc.params.size()) + " arguments");
  Frame frame;
  for (std::size_t i = 0; i < args.size(); ++i)
    frame.locals[tc.params[i].name] = coerce(args[i], tc.params[i].type, "test argument");
  TestRun run;
  failure_.reset();
  for (std::size_t i = 0; i < tc.statements.size(); ++i) {
    int idx = static_cast<int>(i);
    if (hooks.before_statement && !hooks.before_statement(idx, frame.locals)) {
      run.end = TestRun::End::Stopped;
      run.stmt = idx;
      run.env = frame.locals;
      return run;
    }
    try {
      exec(tc.statements[i], frame);
    } catch (const SubjectException& e) {
      run.end = TestRun::End::Exception;
      run.stmt = idx;
      run.message = e.what();
      run.env = frame.locals;
      return run;
    }
    if (failure_) {
      run.end = TestRun::End::AssertionFailed;
      run.stmt = idx;
      run.failure = std::move(failure_);
      failure_.reset();
      run.env = frame.locals;
      return run;
    }
  }
  run.env = std::move(frame.locals);
  return run;
}

InterpretResult interpret(const ProjectModel& model, const std::string& class_fqn, const std::string& method,
                          std::optional<Value> receiver, std::vector<Value> args, std::uint64_t step_budget,
                          Heap heap) {
  Interpreter interp(model, step_budget);
  interp.heap() = std::move(heap);
  InterpretResult out;
  try {
    out.value = interp.call(class_fqn, method, std::move(receiver), std::move(args));
  } catch (const SubjectException& e) {
    out.exception = e.what();
  }
  out.heap = std::move(interp.heap());
  return out;
}

}  // namespace mrmine::exec
