#include "mrmine/printer.h"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace mrmine::printer {

namespace {

using namespace mrmine::ir;

constexpr int kPrecPostfix = 8;
constexpr int kPrecUnary = 7;

int precedence(BinOp op) {
  switch (op) {
    case BinOp::Or:
      return 1;
    case BinOp::And:
      return 2;
    case BinOp::Eq:
    case BinOp::Ne:
      return 3;
    case BinOp::Lt:
    case BinOp::Gt:
    case BinOp::Le:
    case BinOp::Ge:
      return 4;
    case BinOp::Add:
    case BinOp::Sub:
      return 5;
    case BinOp::Mul:
    case BinOp::Div:
      return 6;
  }
  return 0;
}

int precedence(const Expression& e) {
  if (const auto* b = std::get_if<BinaryExpr>(&e.node)) return precedence(b->op);
  if (std::holds_alternative<UnaryExpr>(e.node)) return kPrecUnary;
  if (const auto* l = std::get_if<Literal>(&e.node)) {
    // A negative number prints with a leading minus sign.
    if (const auto* i = std::get_if<std::int64_t>(&l->value); i && *i < 0) return kPrecUnary;
    if (const auto* d = std::get_if<double>(&l->value); d && std::signbit(*d)) return kPrecUnary;
  }
  return kPrecPostfix + 1;
}

bool is_number(const Expression& e) {
  const auto* l = std::get_if<Literal>(&e.node);
  return l && (std::holds_alternative<std::int64_t>(l->value) ||
               std::holds_alternative<double>(l->value));
}

std::string print_float(double d) {
  if (std::isnan(d)) return "(0.0 / 0.0)";
  if (std::isinf(d)) return d > 0 ? "(1.0 / 0.0)" : "(-1.0 / 0.0)";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (unsigned char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        if (c < 0x20 || c == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\x%02x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out + "\"";
}

void emit(const Expression& e, std::string& out);

void emit_at(const Expression& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    emit(e, out);
    out += ')';
  } else {
    emit(e, out);
  }
}

void emit_args(const std::vector<Expression>& args, std::string& out) {
  out += '(';
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    emit(args[i], out);
  }
  out += ')';
}

void emit_call(const MethodInvocation& mi, std::string& out) {
  if (mi.receiver) {
    emit_at(*mi.receiver, kPrecPostfix, out);
  } else {
    out += mi.class_fqn;
  }
  out += '.';
  out += mi.method;
  emit_args(mi.args, out);
}

void emit(const Expression& e, std::string& out) {
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Literal>) {
          out += print_literal(n);
        } else if constexpr (std::is_same_v<N, VarRef>) {
          out += n.name;
        } else if constexpr (std::is_same_v<N, FieldAccess>) {
          emit_at(*n.base, kPrecPostfix, out);
          out += '.';
          out += n.field;
        } else if constexpr (std::is_same_v<N, BinaryExpr>) {
          int p = precedence(n.op);
          emit_at(*n.lhs, p, out);
          out += ' ';
          out += to_string(n.op);
          out += ' ';
          emit_at(*n.rhs, p + 1, out);
        } else if constexpr (std::is_same_v<N, UnaryExpr>) {
          out += to_string(n.op);
          // `-5` would re-parse as a single negative literal.
          if (n.op == UnOp::Neg && is_number(*n.operand)) {
            out += '(';
            emit(*n.operand, out);
            out += ')';
          } else {
            emit_at(*n.operand, kPrecUnary, out);
          }
        } else if constexpr (std::is_same_v<N, CallExpr>) {
          emit_call(*n.call, out);
        } else if constexpr (std::is_same_v<N, NewExpr>) {
          out += "new ";
          out += n.class_fqn;
          emit_args(n.args, out);
        }
      },
      e.node);
}

std::string pad(int n) { return std::string(static_cast<std::size_t>(n > 0 ? n : 0), ' '); }

void emit_block(const std::vector<Statement>& body, int indent, std::string& out) {
  out += "{\n";
  for (const auto& s : body) {
    out += pad(indent + 2);
    out += print_statement(s, indent + 2);
    out += '\n';
  }
  out += pad(indent);
  out += '}';
}

void emit_params(const std::vector<Param>& params, std::string& out) {
  out += '(';
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) out += ", ";
    out += params[i].type.str();
    out += ' ';
    out += params[i].name;
  }
  out += ')';
}

std::string simple_name(const std::string& fqn) {
  auto dot = fqn.rfind('.');
  return dot == std::string::npos ? fqn : fqn.substr(dot + 1);
}

}  // namespace

std::string print_literal(const Literal& lit) {
  return std::visit(
      [](const auto& v) -> std::string {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, NullLit>) {
          return "null";
        } else if constexpr (std::is_same_v<V, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<V, double>) {
          return print_float(v);
        } else if constexpr (std::is_same_v<V, bool>) {
          return v ? "true" : "false";
        } else {
          return quote(v);
        }
      },
      lit.value);
}

std::string print_expression(const Expression& e) {
  std::string out;
  emit(e, out);
  return out;
}

std::string print_statement(const Statement& s, int indent) {
  std::string out;
  std::visit(
      [&](const auto& n) {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VarDecl>) {
          out += n.type.str() + " " + n.name + " = ";
          emit(n.init, out);
          out += ';';
        } else if constexpr (std::is_same_v<N, Assignment>) {
          emit(n.target, out);
          out += " = ";
          emit(n.value, out);
          out += ';';
        } else if constexpr (std::is_same_v<N, InvocationStmt>) {
          emit_call(n.call, out);
          out += ';';
        } else if constexpr (std::is_same_v<N, AssertionStmt>) {
          out += to_string(n.assertion.api);
          emit_args(n.assertion.operands, out);
          out += ';';
        } else if constexpr (std::is_same_v<N, ThrowStmt>) {
          out += "throw IllegalArgument(";
          emit(n.message, out);
          out += ");";
        } else if constexpr (std::is_same_v<N, OpaqueRegion>) {
          out += n.text;
        } else if constexpr (std::is_same_v<N, ReturnStmt>) {
          out += "return";
          if (n.value) {
            out += ' ';
            emit(*n.value, out);
          }
          out += ';';
        } else if constexpr (std::is_same_v<N, IfStmt>) {
          out += "if (";
          emit(n.cond, out);
          out += ") ";
          emit_block(n.then_body, indent, out);
          if (!n.else_body.empty()) {
            out += " else ";
            emit_block(n.else_body, indent, out);
          }
        } else if constexpr (std::is_same_v<N, WhileStmt>) {
          out += "while (";
          emit(n.cond, out);
          out += ") ";
          emit_block(n.body, indent, out);
        }
      },
      s.node);
  return out;
}

std::string print_test_case(const TestCaseIR& tc, int indent) {
  std::string out = pad(indent) + "@Test\n" + pad(indent) + "void " + tc.name;
  emit_params(tc.params, out);
  out += ' ';
  emit_block(tc.statements, indent, out);
  out += '\n';
  return out;
}

std::string print_class(const ClassDecl& c) {
  std::string out = "class " + simple_name(c.fqn) + " {\n";
  for (const auto& f : c.fields) {
    out += "  ";
    if (f.required) out += "required ";
    out += f.type.str() + " " + f.name + ";\n";
  }
  for (const auto& m : c.methods) {
    if (&m != &c.methods.front() || !c.fields.empty()) out += '\n';
    out += "  ";
    if (m.is_static) out += "static ";
    out += m.return_type ? m.return_type->str() : std::string("void");
    out += ' ';
    out += m.name;
    emit_params(m.params, out);
    out += ' ';
    emit_block(m.body, 2, out);
    out += '\n';
  }
  out += "}\n";
  return out;
}

std::string print_file(const std::string& package, const std::vector<ClassDecl>& classes,
                       const std::vector<TestSuite>& suites) {
  std::string out;
  if (!package.empty()) out += "package " + package + ";\n\n";
  bool first = true;
  for (const auto& c : classes) {
    if (!first) out += '\n';
    first = false;
    out += print_class(c);
  }
  for (const auto& s : suites) {
    if (!first) out += '\n';
    first = false;
    out += "class " + simple_name(s.name) + " {\n";
    for (std::size_t i = 0; i < s.test_cases.size(); ++i) {
      if (i) out += '\n';
      out += print_test_case(s.test_cases[i], 2);
    }
    out += "}\n";
  }
  return out;
}

}  // namespace mrmine::printer
