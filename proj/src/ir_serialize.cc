#include "mrmine/ir_serialize.h"

#include <json.hpp>
#include <set>

namespace mrmine::ir {

using nlohmann::json;

namespace {

// ---- writing ---------------------------------------------------------------

json expr_to_json(const Expression& e);
json stmt_to_json(const Statement& s);

json invocation_to_json(const MethodInvocation& mi) {
  json args = json::array();
  for (const auto& a : mi.args) args.push_back(expr_to_json(a));
  return json{
      {"id", {{"test", mi.id.test}, {"stmt", mi.id.stmt}, {"pos", mi.id.pos}}},
      {"receiver", mi.receiver ? expr_to_json(*mi.receiver) : json(nullptr)},
      {"class", mi.class_fqn},
      {"method", mi.method},
      {"args", std::move(args)},
      {"return_binding", mi.return_binding ? json(*mi.return_binding) : json(nullptr)},
  };
}

json literal_to_json(const Literal& lit) {
  json j{{"kind", "literal"}};
  std::visit(
      [&](const auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, NullLit>) {
          j["type"] = "null";
          j["value"] = nullptr;
        } else if constexpr (std::is_same_v<V, std::int64_t>) {
          j["type"] = "int";
          j["value"] = v;
        } else if constexpr (std::is_same_v<V, double>) {
          j["type"] = "float";
          j["value"] = v;
        } else if constexpr (std::is_same_v<V, bool>) {
          j["type"] = "bool";
          j["value"] = v;
        } else {
          j["type"] = "string";
          j["value"] = v;
        }
      },
      lit.value);
  return j;
}

json expr_to_json(const Expression& e) {
  return std::visit(
      [](const auto& n) -> json {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, Literal>) {
          return literal_to_json(n);
        } else if constexpr (std::is_same_v<N, VarRef>) {
          return {{"kind", "var"}, {"name", n.name}};
        } else if constexpr (std::is_same_v<N, FieldAccess>) {
          return {{"kind", "field"}, {"base", expr_to_json(*n.base)}, {"field", n.field}};
        } else if constexpr (std::is_same_v<N, BinaryExpr>) {
          return {{"kind", "binary"},
                  {"op", std::string(to_string(n.op))},
                  {"lhs", expr_to_json(*n.lhs)},
                  {"rhs", expr_to_json(*n.rhs)}};
        } else if constexpr (std::is_same_v<N, UnaryExpr>) {
          return {{"kind", "unary"},
                  {"op", std::string(to_string(n.op))},
                  {"operand", expr_to_json(*n.operand)}};
        } else if constexpr (std::is_same_v<N, CallExpr>) {
          return {{"kind", "call"}, {"call", invocation_to_json(*n.call)}};
        } else {
          json args = json::array();
          for (const auto& a : n.args) args.push_back(expr_to_json(a));
          return {{"kind", "new"}, {"class", n.class_fqn}, {"args", std::move(args)}};
        }
      },
      e.node);
}

json body_to_json(const std::vector<Statement>& body) {
  json out = json::array();
  for (const auto& s : body) out.push_back(stmt_to_json(s));
  return out;
}

json stmt_to_json(const Statement& s) {
  json j = std::visit(
      [](const auto& n) -> json {
        using N = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<N, VarDecl>) {
          return {{"kind", "var_decl"},
                  {"name", n.name},
                  {"type", n.type.str()},
                  {"init", expr_to_json(n.init)}};
        } else if constexpr (std::is_same_v<N, Assignment>) {
          return {{"kind", "assign"},
                  {"target", expr_to_json(n.target)},
                  {"value", expr_to_json(n.value)}};
        } else if constexpr (std::is_same_v<N, InvocationStmt>) {
          return {{"kind", "invocation"}, {"call", invocation_to_json(n.call)}};
        } else if constexpr (std::is_same_v<N, AssertionStmt>) {
          json ops = json::array();
          for (const auto& o : n.assertion.operands) ops.push_back(expr_to_json(o));
          return {{"kind", "assertion"},
                  {"id", {{"test", n.assertion.id.test}, {"stmt", n.assertion.id.stmt}}},
                  {"api", std::string(to_string(n.assertion.api))},
                  {"operands", std::move(ops)}};
        } else if constexpr (std::is_same_v<N, ThrowStmt>) {
          return {{"kind", "throw"}, {"message", expr_to_json(n.message)}};
        } else if constexpr (std::is_same_v<N, OpaqueRegion>) {
          return {{"kind", "opaque"}, {"text", n.text}};
        } else if constexpr (std::is_same_v<N, ReturnStmt>) {
          return {{"kind", "return"},
                  {"value", n.value ? expr_to_json(*n.value) : json(nullptr)}};
        } else if constexpr (std::is_same_v<N, IfStmt>) {
          return {{"kind", "if"},
                  {"cond", expr_to_json(n.cond)},
                  {"then", body_to_json(n.then_body)},
                  {"else", body_to_json(n.else_body)}};
        } else {
          return {{"kind", "while"}, {"cond", expr_to_json(n.cond)}, {"body", body_to_json(n.body)}};
        }
      },
      s.node);
  j["index"] = s.index;
  return j;
}

json params_to_json(const std::vector<Param>& params) {
  json out = json::array();
  for (const auto& p : params) out.push_back({{"name", p.name}, {"type", p.type.str()}});
  return out;
}

json test_case_to_json(const TestCaseIR& tc) {
  return {{"name", tc.name},
          {"params", params_to_json(tc.params)},
          {"span",
           {{"file", tc.span.file_id},
            {"first_line", tc.span.first_line},
            {"last_line", tc.span.last_line}}},
          {"statements", body_to_json(tc.statements)}};
}

json model_to_json(const ProjectModel& m) {
  json classes = json::array();
  for (const auto& c : m.classes) {
    json fields = json::array();
    for (const auto& f : c.fields)
      fields.push_back({{"name", f.name}, {"type", f.type.str()}, {"required", f.required}});
    json methods = json::array();
    for (const auto& md : c.methods) {
      methods.push_back({{"name", md.name},
                         {"params", params_to_json(md.params)},
                         {"return_type", md.return_type ? json(md.return_type->str()) : json(nullptr)},
                         {"static", md.is_static},
                         {"writes_fields", md.writes_fields},
                         {"body", body_to_json(md.body)}});
    }
    classes.push_back({{"fqn", c.fqn},
                       {"file", c.file_id},
                       {"fields", std::move(fields)},
                       {"methods", std::move(methods)}});
  }
  json suites = json::array();
  for (const auto& s : m.test_suites) {
    json cases = json::array();
    for (const auto& tc : s.test_cases) cases.push_back(test_case_to_json(tc));
    suites.push_back({{"file", s.file_id}, {"name", s.name}, {"test_cases", std::move(cases)}});
  }
  return {{"ir_version", kIrVersion},
          {"internal_prefixes", m.internal_prefixes},
          {"classes", std::move(classes)},
          {"test_suites", std::move(suites)}};
}

// ---- reading ---------------------------------------------------------------

class Node {
 public:
  Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& raw() const { return j_; }

  [[noreturn]] void fail(const std::string& msg) const { throw SchemaError(path_, msg); }

  Node field(const char* key) const {
    if (!j_.is_object()) fail("expected object");
    auto it = j_.find(key);
    if (it == j_.end()) throw SchemaError(path_ + "." + key, "missing field");
    return Node(*it, path_ + "." + key);
  }
  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }
  bool is_null() const { return j_.is_null(); }

  std::string str() const {
    if (!j_.is_string()) fail("expected string");
    return j_.get<std::string>();
  }
  int integer() const {
    if (!j_.is_number_integer()) fail("expected integer");
    return j_.get<int>();
  }
  bool boolean() const {
    if (!j_.is_boolean()) fail("expected boolean");
    return j_.get<bool>();
  }
  std::vector<Node> items() const {
    if (!j_.is_array()) fail("expected array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_.size(); ++i)
      out.emplace_back(j_[i], path_ + "[" + std::to_string(i) + "]");
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

Expression read_expr(const Node& n);
Statement read_stmt(const Node& n);

Type read_type(const Node& n) {
  std::string s = n.str();
  if (s.empty()) n.fail("empty type");
  return Type::parse(s);
}

MethodInvocation read_invocation(const Node& n) {
  MethodInvocation mi;
  Node id = n.field("id");
  mi.id.test = id.field("test").str();
  mi.id.stmt = id.field("stmt").integer();
  mi.id.pos = id.field("pos").integer();
  Node recv = n.field("receiver");
  if (!recv.is_null()) mi.receiver = read_expr(recv);
  mi.class_fqn = n.field("class").str();
  mi.method = n.field("method").str();
  for (const auto& a : n.field("args").items()) mi.args.push_back(read_expr(a));
  Node rb = n.field("return_binding");
  if (!rb.is_null()) mi.return_binding = rb.str();
  return mi;
}

Literal read_literal(const Node& n) {
  std::string type = n.field("type").str();
  Node v = n.field("value");
  if (type == "null") {
    if (!v.is_null()) v.fail("expected null");
    return Literal{NullLit{}};
  }
  if (type == "int") {
    if (!v.raw().is_number_integer()) v.fail("expected integer");
    return Literal{v.raw().get<std::int64_t>()};
  }
  if (type == "float") {
    if (!v.raw().is_number()) v.fail("expected number");
    return Literal{v.raw().get<double>()};
  }
  if (type == "bool") return Literal{v.boolean()};
  if (type == "string") return Literal{v.str()};
  n.field("type").fail("unknown literal type '" + type + "'");
}

Expression read_expr(const Node& n) {
  std::string kind = n.field("kind").str();
  if (kind == "literal") return Expression{read_literal(n)};
  if (kind == "var") return make_var(n.field("name").str());
  if (kind == "field") return Expression{FieldAccess{read_expr(n.field("base")), n.field("field").str()}};
  if (kind == "binary") {
    Node opn = n.field("op");
    auto op = parse_binop(opn.str());
    if (!op) opn.fail("unknown binary operator");
    return Expression{BinaryExpr{*op, read_expr(n.field("lhs")), read_expr(n.field("rhs"))}};
  }
  if (kind == "unary") {
    Node opn = n.field("op");
    std::string op = opn.str();
    if (op != "-" && op != "!") opn.fail("unknown unary operator");
    return Expression{UnaryExpr{op == "-" ? UnOp::Neg : UnOp::Not, read_expr(n.field("operand"))}};
  }
  if (kind == "call") return make_call(read_invocation(n.field("call")));
  if (kind == "new") {
    NewExpr ne;
    ne.class_fqn = n.field("class").str();
    for (const auto& a : n.field("args").items()) ne.args.push_back(read_expr(a));
    return Expression{std::move(ne)};
  }
  n.field("kind").fail("unknown expression kind '" + kind + "'");
}

std::vector<Statement> read_body(const Node& n) {
  std::vector<Statement> out;
  for (const auto& s : n.items()) out.push_back(read_stmt(s));
  return out;
}

Statement read_stmt(const Node& n) {
  Statement s;
  s.index = n.field("index").integer();
  std::string kind = n.field("kind").str();
  if (kind == "var_decl") {
    s.node = VarDecl{n.field("name").str(), read_type(n.field("type")), read_expr(n.field("init"))};
  } else if (kind == "assign") {
    s.node = Assignment{read_expr(n.field("target")), read_expr(n.field("value"))};
  } else if (kind == "invocation") {
    s.node = InvocationStmt{read_invocation(n.field("call"))};
  } else if (kind == "assertion") {
    Assertion a;
    Node id = n.field("id");
    a.id.test = id.field("test").str();
    a.id.stmt = id.field("stmt").integer();
    Node apin = n.field("api");
    auto api = parse_assert_api(apin.str());
    if (!api) apin.fail("unknown assertion api");
    a.api = *api;
    for (const auto& o : n.field("operands").items()) a.operands.push_back(read_expr(o));
    s.node = AssertionStmt{std::move(a)};
  } else if (kind == "throw") {
    s.node = ThrowStmt{read_expr(n.field("message"))};
  } else if (kind == "opaque") {
    s.node = OpaqueRegion{n.field("text").str()};
  } else if (kind == "return") {
    Node v = n.field("value");
    ReturnStmt r;
    if (!v.is_null()) r.value = read_expr(v);
    s.node = std::move(r);
  } else if (kind == "if") {
    s.node = IfStmt{read_expr(n.field("cond")), read_body(n.field("then")), read_body(n.field("else"))};
  } else if (kind == "while") {
    s.node = WhileStmt{read_expr(n.field("cond")), read_body(n.field("body"))};
  } else {
    n.field("kind").fail("unknown statement kind '" + kind + "'");
  }
  return s;
}

std::vector<Param> read_params(const Node& n) {
  std::vector<Param> out;
  for (const auto& p : n.items()) out.push_back({p.field("name").str(), read_type(p.field("type"))});
  return out;
}

TestCaseIR read_test_case(const Node& n) {
  TestCaseIR tc;
  tc.name = n.field("name").str();
  tc.params = read_params(n.field("params"));
  Node span = n.field("span");
  tc.span.file_id = span.field("file").str();
  tc.span.first_line = span.field("first_line").integer();
  tc.span.last_line = span.field("last_line").integer();
  tc.statements = read_body(n.field("statements"));
  return tc;
}

ProjectModel read_model(const Node& root) {
  Node version = root.field("ir_version");
  if (version.integer() != kIrVersion) version.fail("unsupported ir_version");
  ProjectModel m;
  for (const auto& p : root.field("internal_prefixes").items()) m.internal_prefixes.push_back(p.str());
  for (const auto& cn : root.field("classes").items()) {
    ClassDecl c;
    c.fqn = cn.field("fqn").str();
    c.file_id = cn.field("file").str();
    for (const auto& fn : cn.field("fields").items())
      c.fields.push_back({fn.field("name").str(), read_type(fn.field("type")), fn.field("required").boolean()});
    for (const auto& mn : cn.field("methods").items()) {
      MethodDecl md;
      md.name = mn.field("name").str();
      md.params = read_params(mn.field("params"));
      Node rt = mn.field("return_type");
      if (!rt.is_null()) md.return_type = read_type(rt);
      md.is_static = mn.field("static").boolean();
      md.writes_fields = mn.field("writes_fields").boolean();
      md.body = read_body(mn.field("body"));
      c.methods.push_back(std::move(md));
    }
    m.classes.push_back(std::move(c));
  }
  for (const auto& sn : root.field("test_suites").items()) {
    TestSuite s;
    s.file_id = sn.field("file").str();
    s.name = sn.field("name").str();
    for (const auto& tn : sn.field("test_cases").items()) s.test_cases.push_back(read_test_case(tn));
    m.test_suites.push_back(std::move(s));
  }
  return m;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("malformed document: ") + e.what());
  }
}

// ---- invariants ------------------------------------------------------------

void check_assertion_arity(const Statement& s, const std::string& path, std::vector<std::string>& errors) {
  if (const auto* a = std::get_if<AssertionStmt>(&s.node)) {
    std::size_t want = assert_arity(a->assertion.api);
    if (a->assertion.operands.size() != want) {
      errors.push_back(path + ": assertion " + a->assertion.id.test + "@" +
                       std::to_string(a->assertion.id.stmt) + " (" +
                       std::string(to_string(a->assertion.api)) + ") expects " +
                       std::to_string(want) + " operand(s), found " +
                       std::to_string(a->assertion.operands.size()));
    }
  }
}

void check_body(const std::vector<Statement>& body, const std::string& path, bool dense,
                std::vector<std::string>& errors) {
  for (std::size_t i = 0; i < body.size(); ++i) {
    std::string p = path + "[" + std::to_string(i) + "]";
    if (dense && body[i].index != static_cast<int>(i))
      errors.push_back(p + ".index: statement indices must be dense 0..n-1");
    check_assertion_arity(body[i], p, errors);
    if (const auto* is = std::get_if<IfStmt>(&body[i].node)) {
      check_body(is->then_body, p + ".then", false, errors);
      check_body(is->else_body, p + ".else", false, errors);
    } else if (const auto* ws = std::get_if<WhileStmt>(&body[i].node)) {
      check_body(ws->body, p + ".body", false, errors);
    }
  }
}

}  // namespace

std::vector<std::string> validate_model(const ProjectModel& model) {
  std::vector<std::string> errors;
  std::set<std::string> fqns;
  for (std::size_t ci = 0; ci < model.classes.size(); ++ci) {
    const auto& c = model.classes[ci];
    std::string cp = "$.classes[" + std::to_string(ci) + "]";
    if (!fqns.insert(c.fqn).second) errors.push_back(cp + ".fqn: duplicate class '" + c.fqn + "'");
    std::set<std::pair<std::string, std::size_t>> sigs;
    for (std::size_t mi = 0; mi < c.methods.size(); ++mi) {
      const auto& m = c.methods[mi];
      std::string mp = cp + ".methods[" + std::to_string(mi) + "]";
      if (!sigs.insert({m.name, m.params.size()}).second)
        errors.push_back(mp + ": duplicate method '" + m.name + "/" + std::to_string(m.params.size()) + "'");
      check_body(m.body, mp + ".body", false, errors);
    }
  }
  for (std::size_t si = 0; si < model.test_suites.size(); ++si) {
    const auto& s = model.test_suites[si];
    std::string sp = "$.test_suites[" + std::to_string(si) + "]";
    std::set<std::string> names;
    for (std::size_t ti = 0; ti < s.test_cases.size(); ++ti) {
      const auto& tc = s.test_cases[ti];
      std::string tp = sp + ".test_cases[" + std::to_string(ti) + "]";
      if (!names.insert(tc.name).second) errors.push_back(tp + ".name: duplicate test case '" + tc.name + "'");
      for (const auto& st : tc.statements) {
        if (std::holds_alternative<ReturnStmt>(st.node) || std::holds_alternative<IfStmt>(st.node) ||
            std::holds_alternative<WhileStmt>(st.node))
          errors.push_back(tp + ".statements[" + std::to_string(st.index) +
                           "]: control flow in a test case must be an opaque region");
      }
      check_body(tc.statements, tp + ".statements", true, errors);
    }
  }
  return errors;
}

std::string serialize_ir(const ProjectModel& model) { return model_to_json(model).dump(2) + "\n"; }

ProjectModel parse_ir(std::string_view text) {
  json j = parse_json(text);
  ProjectModel m = read_model(Node(j, "$"));
  auto errors = validate_model(m);
  if (!errors.empty()) {
    const std::string& first = errors.front();
    auto colon = first.find(": ");
    throw SchemaError(first.substr(0, colon), first.substr(colon + 2));
  }
  return m;
}

std::string serialize_test_case(const TestCaseIR& tc) { return test_case_to_json(tc).dump(2) + "\n"; }

TestCaseIR parse_test_case(std::string_view text) {
  json j = parse_json(text);
  return read_test_case(Node(j, "$"));
}

}  // namespace mrmine::ir
