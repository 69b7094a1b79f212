#include "mrmine/frontend.h"

#include <charconv>
#include <set>
#include <string_view>

namespace mrmine::frontend {

using namespace mrmine::ir;

std::string Diagnostic::str() const {
  return path + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
         (severity == Severity::Error ? "error" : "warning") + ": " + message;
}

bool ParseResult::has_errors() const {
  for (const auto& d : diagnostics)
    if (d.severity == Severity::Error) return true;
  return false;
}

namespace {

// ---------------------------------------------------------------------------
// Lexer

enum class Tok { Ident, Int, Float, String, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;  // decoded value for strings
  int line = 1;
  int col = 1;
  std::size_t begin = 0;
  std::size_t end = 0;
};

bool ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$';
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool ident_char(char c) { return ident_start(c) || is_digit(c); }

int hex_value(char c) {
  if (is_digit(c)) return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

class Lexer {
 public:
  Lexer(std::string_view src, std::string path, std::vector<Diagnostic>& diags)
      : src_(src), path_(std::move(path)), diags_(diags) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.col = col_;
      t.begin = i_;
      if (i_ >= src_.size()) {
        t.kind = Tok::End;
        t.end = i_;
        out.push_back(t);
        return out;
      }
      char c = src_[i_];
      if (ident_start(c)) {
        while (i_ < src_.size() && ident_char(src_[i_])) advance();
        t.kind = Tok::Ident;
        t.text = std::string(src_.substr(t.begin, i_ - t.begin));
      } else if (is_digit(c)) {
        lex_number(t);
      } else if (c == '"') {
        lex_string(t);
      } else {
        lex_punct(t);
      }
      t.end = i_;
      out.push_back(std::move(t));
    }
  }

 private:
  void advance() {
    if (src_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void error(int line, int col, std::string msg) {
    diags_.push_back({Severity::Error, path_, line, col, std::move(msg)});
  }

  void skip_space() {
    while (i_ < src_.size()) {
      char c = src_[i_];
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '/') {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else if (c == '/' && i_ + 1 < src_.size() && src_[i_ + 1] == '*') {
        int line = line_, col = col_;
        advance();
        advance();
        while (i_ < src_.size() && !(src_[i_] == '*' && i_ + 1 < src_.size() && src_[i_ + 1] == '/'))
          advance();
        if (i_ >= src_.size()) {
          error(line, col, "unterminated block comment");
          return;
        }
        advance();
        advance();
      } else {
        return;
      }
    }
  }

  void lex_number(Token& t) {
    t.kind = Tok::Int;
    while (i_ < src_.size() && is_digit(src_[i_])) advance();
    if (i_ + 1 < src_.size() && src_[i_] == '.' && is_digit(src_[i_ + 1])) {
      t.kind = Tok::Float;
      advance();
      while (i_ < src_.size() && is_digit(src_[i_])) advance();
    }
    if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
      std::size_t j = i_ + 1;
      if (j < src_.size() && (src_[j] == '+' || src_[j] == '-')) ++j;
      if (j < src_.size() && is_digit(src_[j])) {
        t.kind = Tok::Float;
        while (i_ < j) advance();
        while (i_ < src_.size() && is_digit(src_[i_])) advance();
      }
    }
    t.text = std::string(src_.substr(t.begin, i_ - t.begin));
    if (i_ < src_.size() && ident_start(src_[i_])) {
      error(line_, col_, "invalid character after number");
      while (i_ < src_.size() && ident_char(src_[i_])) advance();
    }
  }

  void lex_string(Token& t) {
    t.kind = Tok::String;
    advance();
    while (true) {
      if (i_ >= src_.size() || src_[i_] == '\n') {
        error(t.line, t.col, "unterminated string literal");
        return;
      }
      char c = src_[i_];
      if (c == '"') {
        advance();
        return;
      }
      if (c != '\\') {
        t.text += c;
        advance();
        continue;
      }
      int line = line_, col = col_;
      advance();
      if (i_ >= src_.size()) continue;
      char e = src_[i_];
      advance();
      switch (e) {
        case 'n':
          t.text += '\n';
          break;
        case 't':
          t.text += '\t';
          break;
        case 'r':
          t.text += '\r';
          break;
        case '"':
        case '\\':
          t.text += e;
          break;
        case 'x': {
          int hi = i_ < src_.size() ? hex_value(src_[i_]) : -1;
          int lo = i_ + 1 < src_.size() ? hex_value(src_[i_ + 1]) : -1;
          if (hi < 0 || lo < 0) {
            error(line, col, "invalid \\x escape");
          } else {
            t.text += static_cast<char>(hi * 16 + lo);
            advance();
            advance();
          }
          break;
        }
        default:
          error(line, col, std::string("unknown escape sequence '\\") + e + "'");
      }
    }
  }

  void lex_punct(Token& t) {
    t.kind = Tok::Punct;
    static constexpr std::string_view kTwo[] = {"==", "!=", "<=", ">=", "&&", "||"};
    for (auto two : kTwo) {
      if (src_.substr(i_, 2) == two) {
        t.text = std::string(two);
        advance();
        advance();
        return;
      }
    }
    t.text = std::string(1, src_[i_]);
    advance();
  }

  std::string_view src_;
  std::string path_;
  std::vector<Diagnostic>& diags_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// ---------------------------------------------------------------------------
// Parser

struct ParseFailure {};

constexpr int kMaxNesting = 256;

bool is_type_keyword(std::string_view s) {
  return s == "int" || s == "float" || s == "bool" || s == "string" || s == "var";
}

bool is_reserved(std::string_view s) {
  static const std::set<std::string_view> kWords = {
      "package", "class", "required", "static", "void",  "new",  "throw",  "return",
      "if",      "else",  "while",    "for",    "do",    "try",  "catch",  "finally",
      "true",    "false", "null",     "int",    "float", "bool", "string", "var"};
  return kWords.count(s) > 0;
}

std::optional<AssertApi> mapped_assert_api(std::string_view name) {
  if (name == "assertThat" || name == "assertIterableEquals" || name == "assertLinesMatch" ||
      name == "failNotEqual")
    return AssertApi::AssertEquals;
  if (name == "failNotSame") return AssertApi::AssertSame;
  return std::nullopt;
}

bool looks_like_assertion(std::string_view name) {
  return name.substr(0, 6) == "assert" || name.substr(0, 4) == "fail";
}

bool is_path(const Expression& e) {
  if (std::holds_alternative<VarRef>(e.node)) return true;
  if (const auto* f = std::get_if<FieldAccess>(&e.node)) return is_path(*f->base);
  return false;
}

struct MemberHeader {
  bool is_test = false;
  bool is_static = false;
  std::string name;
  std::vector<Param> params;
  std::optional<Type> return_type;
  std::size_t body_begin = 0;  // token range of the body, braces excluded
  std::size_t body_end = 0;
  int first_line = 0;
  int last_line = 0;
  const Token* start = nullptr;
};

struct Scope {
  bool subject = false;
  std::string class_fqn;
  const std::vector<FieldDecl>* fields = nullptr;
  std::set<std::string> locals;

  bool has_field(const std::string& n) const {
    if (!fields) return false;
    for (const auto& f : *fields)
      if (f.name == n) return true;
    return false;
  }
};

class Parser {
 public:
  Parser(const SourceFile& file, const FrontendOptions& opts, std::vector<Token> toks,
         std::vector<Diagnostic>& diags)
      : file_(file), opts_(opts), toks_(std::move(toks)), diags_(diags) {
    limit_ = toks_.size() - 1;
  }

  Fragment run() {
    Fragment frag;
    frag.path = file_.path;
    if (is_kw("package")) {
      try {
        next();
        package_ = parse_qname();
        expect(";");
      } catch (const ParseFailure&) {
        skip_to_class_keyword();
      }
    }
    frag.package = package_;
    while (!at_end()) {
      if (!is_kw("class")) {
        error(peek(), "expected 'class', found " + describe(peek()));
        next();
        skip_to_class_keyword();
        continue;
      }
      parse_class(frag);
    }
    return frag;
  }

 private:
  // --- token helpers -------------------------------------------------------

  const Token& peek(std::size_t k = 0) const {
    std::size_t i = pos_ + k;
    return i < limit_ ? toks_[i] : end_token();
  }
  const Token& end_token() const {
    // Inside a body range, the closing brace acts as end of input.
    return limit_ < toks_.size() ? toks_[limit_] : toks_.back();
  }
  bool at_end() const { return pos_ >= limit_; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < limit_) ++pos_;
    return t;
  }
  bool is_punct(std::string_view p, std::size_t k = 0) const {
    const Token& t = peek(k);
    return pos_ + k < limit_ && t.kind == Tok::Punct && t.text == p;
  }
  bool is_kw(std::string_view w, std::size_t k = 0) const {
    const Token& t = peek(k);
    return pos_ + k < limit_ && t.kind == Tok::Ident && t.text == w;
  }
  bool is_ident(std::size_t k = 0) const {
    const Token& t = peek(k);
    return pos_ + k < limit_ && t.kind == Tok::Ident && !is_reserved(t.text);
  }
  bool accept(std::string_view p) {
    if (is_punct(p)) {
      next();
      return true;
    }
    return false;
  }
  bool accept_kw(std::string_view w) {
    if (is_kw(w)) {
      next();
      return true;
    }
    return false;
  }
  bool at_test_annotation(std::size_t i) const {
    return i + 1 < toks_.size() && toks_[i].kind == Tok::Punct && toks_[i].text == "@" &&
           toks_[i + 1].kind == Tok::Ident && toks_[i + 1].text == "Test";
  }
  bool is_class_kw(std::size_t i) const {
    return toks_[i].kind == Tok::Ident && toks_[i].text == "class";
  }

  std::string describe(const Token& t) const {
    if (t.kind == Tok::End || pos_ >= limit_) return "end of input";
    if (t.kind == Tok::String) return "string literal";
    return "'" + t.text + "'";
  }

  [[noreturn]] void fail(const Token& t, const std::string& msg) {
    error(t, msg);
    throw ParseFailure{};
  }
  void error(const Token& t, std::string msg) {
    diags_.push_back({Severity::Error, file_.path, t.line, t.col, std::move(msg)});
  }
  void warning(const Token& t, std::string msg) {
    diags_.push_back({Severity::Warning, file_.path, t.line, t.col, std::move(msg)});
  }

  void expect(std::string_view p) {
    if (!accept(p)) fail(peek(), "expected '" + std::string(p) + "', found " + describe(peek()));
  }
  std::string expect_ident(const char* what) {
    if (!is_ident()) fail(peek(), std::string("expected ") + what + ", found " + describe(peek()));
    return next().text;
  }

  void skip_to_class_keyword() {
    while (!at_end() && !is_kw("class")) next();
  }

  std::string qualify(const std::string& name) const {
    if (name.find('.') != std::string::npos || name == "Math" || package_.empty()) return name;
    return package_ + "." + name;
  }

  std::string parse_qname() {
    std::string name = expect_ident("name");
    while (is_punct(".") && is_ident(1)) {
      next();
      name += "." + next().text;
    }
    return name;
  }

  Type parse_type() {
    if (is_kw("int") || is_kw("float") || is_kw("bool") || is_kw("string") || is_kw("var"))
      return Type::parse(next().text);
    return Type::Object(qualify(parse_qname()));
  }

  // Index of the '}' matching the '{' at `open`. Stops at tokens that can only
  // start a new member, so a missing brace does not swallow the rest of the file.
  std::size_t match_brace(std::size_t open) {
    int depth = 0;
    for (std::size_t i = open; i < limit_; ++i) {
      const Token& t = toks_[i];
      if (i > open && (at_test_annotation(i) || is_class_kw(i))) break;
      if (t.kind != Tok::Punct) continue;
      if (t.text == "{") ++depth;
      if (t.text == "}" && --depth == 0) return i;
    }
    fail(toks_[open], "unbalanced braces: '{' is never closed");
  }

  // --- declarations --------------------------------------------------------

  void parse_class(Fragment& frag) {
    next();
    std::string name;
    try {
      name = expect_ident("class name");
      expect("{");
    } catch (const ParseFailure&) {
      skip_to_class_keyword();
      return;
    }
    ClassDecl cls;
    cls.fqn = qualify(name);
    cls.file_id = file_.path;
    std::vector<MemberHeader> methods;
    std::vector<std::pair<FieldDecl, const Token*>> fields;
    while (true) {
      if (accept("}")) break;
      if (at_end() || is_kw("class")) {
        error(at_end() ? end_token() : peek(), "expected '}' to close class '" + name + "'");
        break;
      }
      std::size_t start = pos_;
      try {
        parse_member(methods, fields);
      } catch (const ParseFailure&) {
        recover(start);
      }
    }

    bool is_suite = false;
    for (const auto& m : methods) is_suite |= m.is_test;

    if (is_suite) {
      TestSuite suite;
      suite.file_id = file_.path;
      suite.name = cls.fqn;
      for (const auto& [f, tok] : fields) warning(*tok, "field '" + f.name + "' in test class ignored");
      std::set<std::string> names;
      for (const auto& m : methods) {
        if (!m.is_test) {
          warning(*m.start, "method '" + m.name + "' in test class ignored");
          continue;
        }
        if (!names.insert(m.name).second) {
          error(*m.start, "duplicate test '" + m.name + "'");
          continue;
        }
        if (auto tc = parse_test_body(m)) suite.test_cases.push_back(std::move(*tc));
      }
      frag.suites.push_back(std::move(suite));
      return;
    }

    for (auto& [f, tok] : fields) {
      if (cls.find_field(f.name)) {
        error(*tok, "duplicate field '" + f.name + "'");
        continue;
      }
      cls.fields.push_back(f);
    }
    for (const auto& m : methods) {
      if (cls.find_method(m.name, m.params.size())) {
        error(*m.start, "duplicate method '" + m.name + "/" + std::to_string(m.params.size()) + "'");
        continue;
      }
      if (auto md = parse_method_body(m, cls)) cls.methods.push_back(std::move(*md));
    }
    frag.classes.push_back(std::move(cls));
  }

  void parse_member(std::vector<MemberHeader>& methods,
                    std::vector<std::pair<FieldDecl, const Token*>>& fields) {
    MemberHeader h;
    h.start = &peek();
    h.first_line = peek().line;
    if (accept("@")) {
      if (!is_kw("Test")) fail(peek(), "unsupported annotation " + describe(peek()));
      next();
      h.is_test = true;
    }
    bool required = accept_kw("required");
    h.is_static = accept_kw("static");
    bool is_void = accept_kw("void");
    std::optional<Type> type;
    if (!is_void) type = parse_type();
    const Token& name_tok = peek();
    h.name = expect_ident("member name");
    if (accept(";")) {
      if (h.is_test) fail(name_tok, "@Test applies to methods only");
      if (is_void) fail(name_tok, "field '" + h.name + "' cannot be void");
      fields.push_back({FieldDecl{h.name, *type, required}, h.start});
      return;
    }
    if (!is_punct("(")) {
      if (is_punct("=")) fail(peek(), "field initializers are not supported");
      fail(peek(), "expected ';' or '(' after '" + h.name + "'");
    }
    if (required) fail(*h.start, "'required' applies to fields only");
    next();
    std::set<std::string> seen;
    if (!is_punct(")")) {
      do {
        Type pt = parse_type();
        const Token& pn = peek();
        std::string pname = expect_ident("parameter name");
        if (!seen.insert(pname).second) fail(pn, "duplicate parameter '" + pname + "'");
        h.params.push_back(Param{pname, pt});
      } while (accept(","));
    }
    expect(")");
    h.return_type = type;
    if (h.is_test && type) fail(name_tok, "test '" + h.name + "' must return void");
    if (!is_punct("{")) fail(peek(), "expected '{' to start the body of '" + h.name + "'");
    std::size_t close = match_brace(pos_);
    h.body_begin = pos_ + 1;
    h.body_end = close;
    h.last_line = toks_[close].line;
    pos_ = close + 1;
    methods.push_back(std::move(h));
  }

  void recover(std::size_t start) {
    pos_ = start;
    int depth = 0;
    while (!at_end()) {
      if (pos_ != start && (at_test_annotation(pos_) || is_class_kw(pos_))) return;
      const Token& t = peek();
      if (t.kind == Tok::Punct) {
        if (t.text == "{") {
          ++depth;
        } else if (t.text == "}") {
          if (depth == 0) return;
          if (--depth == 0) {
            next();
            return;
          }
        } else if (t.text == ";" && depth == 0) {
          next();
          return;
        }
      }
      next();
    }
  }

  // Runs `body` with the token window narrowed to [begin, end).
  template <typename F>
  auto with_range(std::size_t begin, std::size_t end, F&& body) {
    std::size_t saved_pos = pos_, saved_limit = limit_;
    pos_ = begin;
    limit_ = end;
    struct Restore {
      Parser* p;
      std::size_t pos, limit;
      ~Restore() {
        p->pos_ = pos;
        p->limit_ = limit;
      }
    } restore{this, saved_pos, saved_limit};
    return body();
  }

  std::optional<MethodDecl> parse_method_body(const MemberHeader& h, const ClassDecl& cls) {
    Scope scope;
    scope.subject = true;
    scope.class_fqn = cls.fqn;
    scope.fields = &cls.fields;
    for (const auto& p : h.params) scope.locals.insert(p.name);
    try {
      MethodDecl md;
      md.name = h.name;
      md.params = h.params;
      md.return_type = h.return_type;
      md.is_static = h.is_static;
      md.body = with_range(h.body_begin, h.body_end, [&] { return parse_block_contents(scope); });
      return md;
    } catch (const ParseFailure&) {
      return std::nullopt;
    }
  }

  std::optional<TestCaseIR> parse_test_body(const MemberHeader& h) {
    Scope scope;
    scope.subject = false;
    for (const auto& p : h.params) scope.locals.insert(p.name);
    temp_counter_ = 0;
    for (std::size_t i = h.body_begin; i < h.body_end; ++i) {
      const std::string& t = toks_[i].text;
      if (toks_[i].kind == Tok::Ident && t.size() > 2 && t[0] == '$' && t[1] == 't') {
        int n = 0;
        auto [p, ec] = std::from_chars(t.data() + 2, t.data() + t.size(), n);
        if (ec == std::errc() && p == t.data() + t.size() && n >= temp_counter_) temp_counter_ = n + 1;
      }
    }
    try {
      TestCaseIR tc;
      tc.name = h.name;
      tc.params = h.params;
      tc.span = SourceSpan{file_.path, h.first_line, h.last_line};
      tc.statements = with_range(h.body_begin, h.body_end, [&] {
        std::vector<Statement> out;
        while (!at_end()) parse_test_statement(scope, out);
        return out;
      });
      renumber(tc);
      return tc;
    } catch (const ParseFailure&) {
      return std::nullopt;
    }
  }

  // --- statements ----------------------------------------------------------

  static Statement stmt(decltype(Statement::node) node) { return Statement{0, std::move(node)}; }

  std::vector<Statement> parse_block_contents(Scope& scope) {
    std::vector<Statement> out;
    while (!at_end()) out.push_back(parse_subject_statement(scope));
    for (std::size_t i = 0; i < out.size(); ++i) out[i].index = static_cast<int>(i);
    return out;
  }

  std::vector<Statement> parse_braced_block(Scope& scope) {
    DepthGuard guard(this);
    if (!is_punct("{")) fail(peek(), "expected '{', found " + describe(peek()));
    std::size_t close = match_brace(pos_);
    std::size_t begin = pos_ + 1;
    auto body = with_range(begin, close, [&] { return parse_block_contents(scope); });
    pos_ = close + 1;
    return body;
  }

  Statement parse_subject_statement(Scope& scope) {
    const Token& t = peek();
    if (accept_kw("if")) {
      IfStmt s{paren_condition(scope), {}, {}};
      s.then_body = parse_braced_block(scope);
      if (accept_kw("else")) {
        if (is_kw("if")) {
          s.else_body.push_back(parse_subject_statement(scope));
        } else {
          s.else_body = parse_braced_block(scope);
        }
      }
      return stmt(std::move(s));
    }
    if (accept_kw("while")) {
      WhileStmt s{paren_condition(scope), {}};
      s.body = parse_braced_block(scope);
      return stmt(std::move(s));
    }
    if (accept_kw("return")) {
      ReturnStmt r;
      if (!accept(";")) {
        r.value = parse_expr(scope);
        expect(";");
      }
      return stmt(std::move(r));
    }
    if (is_kw("for") || is_kw("do") || is_kw("try") || is_punct("{"))
      fail(t, "unsupported statement " + describe(t) + " in method body");
    if (t.kind == Tok::Ident && looks_like_assertion(t.text) && is_punct("(", 1) &&
        !scope.locals.count(t.text))
      fail(t, "assertions are only allowed in test methods");
    return parse_simple_statement(scope);
  }

  Expression paren_condition(Scope& scope) {
    expect("(");
    Expression e = parse_expr(scope);
    expect(")");
    return e;
  }

  // Declarations, assignments, calls and throw; shared by tests and methods.
  Statement parse_simple_statement(Scope& scope) {
    const Token& t = peek();
    if (accept_kw("throw")) {
      if (!is_kw("IllegalArgument")) fail(peek(), "only 'throw IllegalArgument(message)' is supported");
      next();
      expect("(");
      Expression msg = parse_expr(scope);
      expect(")");
      expect(";");
      return stmt(ThrowStmt{std::move(msg)});
    }
    if (is_decl_start()) {
      Type type = parse_type();
      const Token& name_tok = peek();
      std::string name = expect_ident("variable name");
      if (!accept("=")) fail(name_tok, "declaration of '" + name + "' needs an initializer");
      Expression init = parse_expr(scope);
      expect(";");
      scope.locals.insert(name);
      return stmt(VarDecl{std::move(name), std::move(type), std::move(init)});
    }
    if (t.kind == Tok::Punct && t.text != "(" && t.text != "-" && t.text != "!")
      fail(t, "expected statement, found " + describe(t));
    Expression e = parse_expr(scope);
    if (accept("=")) {
      if (!is_path(e)) fail(t, "left side of assignment must be a variable or field");
      Expression value = parse_expr(scope);
      expect(";");
      return stmt(Assignment{std::move(e), std::move(value)});
    }
    expect(";");
    auto* call = std::get_if<CallExpr>(&e.node);
    if (!call) fail(t, "expression is not a statement");
    return stmt(InvocationStmt{std::move(*call->call)});
  }

  bool is_decl_start() const {
    const Token& t = peek();
    if (t.kind != Tok::Ident) return false;
    if (is_type_keyword(t.text)) return true;
    if (is_reserved(t.text)) return false;
    std::size_t k = 1;
    while (is_punct(".", k) && is_ident(k + 1)) k += 2;
    return is_ident(k) && (is_punct("=", k + 1) || is_punct(";", k + 1));
  }

  void parse_test_statement(Scope& scope, std::vector<Statement>& out) {
    const Token& t = peek();
    if (is_kw("if") || is_kw("while") || is_kw("for") || is_kw("do") || is_kw("try") ||
        is_kw("return") || is_punct("{")) {
      out.push_back(capture_opaque(scope));
      return;
    }
    if (t.kind == Tok::Ident && is_punct("(", 1) && !scope.locals.count(t.text) &&
        (parse_assert_api(t.text) || mapped_assert_api(t.text) || looks_like_assertion(t.text))) {
      parse_assertion(scope, out);
      return;
    }
    Statement s = parse_simple_statement(scope);
    lift_statement(s, out);
    out.push_back(std::move(s));
  }

  void parse_assertion(Scope& scope, std::vector<Statement>& out) {
    const Token& name_tok = next();
    const std::string& name = name_tok.text;
    std::vector<Expression> args = parse_args(scope);
    expect(";");
    std::optional<AssertApi> api = parse_assert_api(name);
    if (!api) {
      api = mapped_assert_api(name);
      if (!api) {
        warning(name_tok, "unsupported assertion '" + name + "' ignored");
        return;
      }
      if (args.size() != 2) {
        warning(name_tok, "'" + name + "' with " + std::to_string(args.size()) +
                              " operands ignored; only the two-operand form is supported");
        return;
      }
    }
    std::size_t arity = assert_arity(*api);
    auto is_message = [](const Expression& e) {
      const auto* l = std::get_if<Literal>(&e.node);
      return l && std::holds_alternative<std::string>(l->value);
    };
    if (args.size() == arity + 1) {
      if (is_message(args.front())) {
        args.erase(args.begin());
      } else if (is_message(args.back())) {
        args.pop_back();
      }
    }
    if (args.size() != arity)
      fail(name_tok, "'" + name + "' expects " + std::to_string(arity) + " operand(s), got " +
                         std::to_string(args.size()));
    Statement s = stmt(AssertionStmt{Assertion{{}, *api, std::move(args)}});
    lift_statement(s, out);
    out.push_back(std::move(s));
  }

  // --- opaque regions (test bodies) ----------------------------------------

  Statement capture_opaque(Scope& scope) {
    std::size_t first = pos_;
    skip_construct();
    std::size_t last = pos_ - 1;
    for (std::size_t i = first; i < last; ++i) {
      // Names assigned inside the region stay known as variables afterwards.
      if (toks_[i].kind == Tok::Ident && !is_reserved(toks_[i].text) &&
          toks_[i + 1].kind == Tok::Punct && toks_[i + 1].text == "=")
        scope.locals.insert(toks_[i].text);
    }
    std::size_t b = toks_[first].begin, e = toks_[last].end;
    return stmt(OpaqueRegion{file_.text.substr(b, e - b)});
  }

  void skip_parens() {
    if (!is_punct("(")) fail(peek(), "expected '(', found " + describe(peek()));
    int depth = 0;
    const Token& open = peek();
    while (!at_end()) {
      const Token& t = next();
      if (t.kind != Tok::Punct) continue;
      if (t.text == "(") ++depth;
      if (t.text == ")" && --depth == 0) return;
    }
    fail(open, "unbalanced parentheses");
  }

  void skip_braces() {
    if (!is_punct("{")) fail(peek(), "expected '{', found " + describe(peek()));
    pos_ = match_brace(pos_) + 1;
  }

  void skip_construct() {
    DepthGuard guard(this);
    if (accept_kw("if")) {
      skip_parens();
      skip_body();
      if (accept_kw("else")) skip_body();
    } else if (accept_kw("while") || accept_kw("for")) {
      skip_parens();
      skip_body();
    } else if (accept_kw("do")) {
      skip_body();
      if (!accept_kw("while")) fail(peek(), "expected 'while' after do-body");
      skip_parens();
      expect(";");
    } else if (accept_kw("try")) {
      if (is_punct("(")) skip_parens();
      skip_braces();
      bool handler = false;
      while (accept_kw("catch")) {
        skip_parens();
        skip_braces();
        handler = true;
      }
      if (accept_kw("finally")) {
        skip_braces();
        handler = true;
      }
      if (!handler) fail(peek(), "expected 'catch' or 'finally'");
    } else if (is_punct("{")) {
      skip_braces();
    } else {
      skip_simple();
    }
  }

  void skip_body() {
    if (is_kw("if") || is_kw("while") || is_kw("for") || is_kw("do") || is_kw("try") ||
        is_punct("{")) {
      skip_construct();
    } else {
      skip_simple();
    }
  }

  void skip_simple() {
    const Token& start = peek();
    int depth = 0;
    while (!at_end()) {
      const Token& t = next();
      if (t.kind != Tok::Punct) continue;
      if (t.text == "(") ++depth;
      if (t.text == ")") --depth;
      if (t.text == ";" && depth <= 0) return;
    }
    fail(start, "expected ';'");
  }

  // --- expressions ---------------------------------------------------------

  struct DepthGuard {
    Parser* p;
    explicit DepthGuard(Parser* parser) : p(parser) {
      if (p->depth_ >= kMaxNesting) p->fail(p->peek(), "nesting too deep");
      ++p->depth_;
    }
    ~DepthGuard() { --p->depth_; }
  };

  Expression parse_expr(Scope& scope) { return parse_binary(scope, 1); }

  static std::optional<std::pair<BinOp, int>> binary_op(const Token& t) {
    if (t.kind != Tok::Punct) return std::nullopt;
    auto op = parse_binop(t.text);
    if (!op) return std::nullopt;
    switch (*op) {
      case BinOp::Or:
        return std::pair{*op, 1};
      case BinOp::And:
        return std::pair{*op, 2};
      case BinOp::Eq:
      case BinOp::Ne:
        return std::pair{*op, 3};
      case BinOp::Lt:
      case BinOp::Gt:
      case BinOp::Le:
      case BinOp::Ge:
        return std::pair{*op, 4};
      case BinOp::Add:
      case BinOp::Sub:
        return std::pair{*op, 5};
      case BinOp::Mul:
      case BinOp::Div:
        return std::pair{*op, 6};
    }
    return std::nullopt;
  }

  Expression parse_binary(Scope& scope, int min_prec) {
    DepthGuard guard(this);
    Expression lhs = parse_unary(scope);
    while (pos_ < limit_) {
      auto op = binary_op(peek());
      if (!op || op->second < min_prec) break;
      next();
      Expression rhs = parse_binary(scope, op->second + 1);
      lhs = Expression{BinaryExpr{op->first, std::move(lhs), std::move(rhs)}};
    }
    return lhs;
  }

  Expression parse_unary(Scope& scope) {
    DepthGuard guard(this);
    if (is_punct("-")) {
      next();
      const Token& t = peek();
      if (pos_ < limit_ && (t.kind == Tok::Int || t.kind == Tok::Float)) {
        next();
        return parse_postfix(scope, number_literal(t, true));
      }
      return Expression{UnaryExpr{UnOp::Neg, parse_unary(scope)}};
    }
    if (accept("!")) return Expression{UnaryExpr{UnOp::Not, parse_unary(scope)}};
    return parse_postfix(scope, parse_primary(scope));
  }

  Expression number_literal(const Token& t, bool negative) {
    if (t.kind == Tok::Float) {
      double d = 0;
      std::from_chars(t.text.data(), t.text.data() + t.text.size(), d);
      return make_literal(Literal{negative ? -d : d});
    }
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    constexpr std::uint64_t kMax = static_cast<std::uint64_t>(INT64_MAX);
    if (ec != std::errc() || v > kMax + (negative ? 1 : 0))
      fail(t, "integer literal " + t.text + " out of range");
    std::int64_t s = negative ? static_cast<std::int64_t>(0 - v) : static_cast<std::int64_t>(v);
    return make_literal(Literal{s});
  }

  std::vector<Expression> parse_args(Scope& scope) {
    expect("(");
    std::vector<Expression> args;
    if (!is_punct(")")) {
      do {
        args.push_back(parse_expr(scope));
      } while (accept(","));
    }
    expect(")");
    return args;
  }

  Expression parse_postfix(Scope& scope, Expression e) {
    while (is_punct(".")) {
      next();
      std::string member = expect_ident("member name");
      if (is_punct("(")) {
        MethodInvocation mi;
        mi.receiver = std::move(e);
        mi.method = std::move(member);
        mi.args = parse_args(scope);
        e = make_call(std::move(mi));
      } else {
        e = Expression{FieldAccess{std::move(e), std::move(member)}};
      }
    }
    return e;
  }

  Expression parse_primary(Scope& scope) {
    const Token& t = peek();
    if (pos_ >= limit_) fail(t, "expected expression, found end of input");
    switch (t.kind) {
      case Tok::Int:
      case Tok::Float:
        next();
        return number_literal(t, false);
      case Tok::String:
        next();
        return make_literal(Literal{t.text});
      case Tok::Punct:
        if (accept("(")) {
          Expression e = parse_expr(scope);
          expect(")");
          return e;
        }
        fail(t, "expected expression, found " + describe(t));
      case Tok::End:
        fail(t, "expected expression, found end of input");
      case Tok::Ident:
        break;
    }
    if (accept_kw("true")) return make_literal(Literal{true});
    if (accept_kw("false")) return make_literal(Literal{false});
    if (accept_kw("null")) return make_literal(Literal{NullLit{}});
    if (accept_kw("new")) {
      std::string cls = qualify(parse_qname());
      return Expression{NewExpr{std::move(cls), parse_args(scope)}};
    }
    if (is_kw("this")) {
      if (!scope.subject) fail(t, "'this' outside a method body");
      next();
      return make_var("this");
    }
    if (!is_ident()) fail(t, "expected expression, found " + describe(t));
    const std::string& name = t.text;
    if (scope.locals.count(name)) {
      next();
      return make_var(name);
    }
    if (is_punct("(", 1)) {
      if (!scope.subject) fail(t, "call to '" + name + "' needs a receiver or class name");
      next();
      MethodInvocation mi;
      mi.class_fqn = scope.class_fqn;
      mi.method = name;
      mi.args = parse_args(scope);
      return make_call(std::move(mi));
    }
    if (scope.subject && scope.has_field(name)) {
      next();
      return Expression{FieldAccess{make_var("this"), name}};
    }
    // `a.b.C.m(...)` with an unknown root names a static method.
    std::size_t k = 1;
    while (is_punct(".", k) && is_ident(k + 1) && !is_punct("(", k + 2)) k += 2;
    if (k > 0 && is_punct(".", k) && is_ident(k + 1) && is_punct("(", k + 2)) {
      std::string cls = next().text;
      while (pos_ + 1 < limit_ && !is_punct("(", 2)) {
        next();
        cls += "." + next().text;
      }
      next();
      MethodInvocation mi;
      mi.class_fqn = qualify(cls);
      mi.method = next().text;
      mi.args = parse_args(scope);
      return make_call(std::move(mi));
    }
    next();
    return make_var(name);
  }

  // --- lifting -------------------------------------------------------------

  Expression make_temp(Expression value, std::vector<Statement>& out) {
    std::string name = "$t" + std::to_string(temp_counter_++);
    out.push_back(stmt(VarDecl{name, Type::Var(), std::move(value)}));
    return make_var(name);
  }

  void lift_in(Expression& e, std::vector<Statement>& out) {
    std::visit(
        [&](auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, FieldAccess>) {
            lift_in(*n.base, out);
          } else if constexpr (std::is_same_v<N, BinaryExpr>) {
            lift_in(*n.lhs, out);
            lift_in(*n.rhs, out);
          } else if constexpr (std::is_same_v<N, UnaryExpr>) {
            lift_in(*n.operand, out);
          } else if constexpr (std::is_same_v<N, NewExpr>) {
            for (auto& a : n.args) lift_in(a, out);
          } else if constexpr (std::is_same_v<N, CallExpr>) {
            lift_call_parts(*n.call, out);
          }
        },
        e.node);
    if (opts_.lift_nested_calls && std::holds_alternative<CallExpr>(e.node))
      e = make_temp(std::move(e), out);
  }

  void lift_call_parts(MethodInvocation& mi, std::vector<Statement>& out) {
    if (mi.receiver && !is_path(*mi.receiver)) {
      lift_in(*mi.receiver, out);
      if (!is_path(*mi.receiver)) mi.receiver = make_temp(std::move(*mi.receiver), out);
    }
    for (auto& a : mi.args) lift_in(a, out);
  }

  // A top-level call keeps its place; everything below it is hoisted.
  void lift_top(Expression& e, std::vector<Statement>& out) {
    if (auto* c = std::get_if<CallExpr>(&e.node)) {
      lift_call_parts(*c->call, out);
    } else {
      lift_in(e, out);
    }
  }

  void lift_statement(Statement& s, std::vector<Statement>& out) {
    std::visit(
        [&](auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, VarDecl>) {
            lift_top(n.init, out);
          } else if constexpr (std::is_same_v<N, Assignment>) {
            lift_top(n.value, out);
          } else if constexpr (std::is_same_v<N, InvocationStmt>) {
            lift_call_parts(n.call, out);
          } else if constexpr (std::is_same_v<N, AssertionStmt>) {
            bool unary = assert_arity(n.assertion.api) == 1;
            for (auto& o : n.assertion.operands) {
              if (unary) {
                lift_top(o, out);
              } else {
                lift_in(o, out);
              }
            }
          } else if constexpr (std::is_same_v<N, ThrowStmt>) {
            lift_in(n.message, out);
          }
        },
        s.node);
  }

  const SourceFile& file_;
  const FrontendOptions& opts_;
  std::vector<Token> toks_;
  std::vector<Diagnostic>& diags_;
  std::size_t pos_ = 0;
  std::size_t limit_ = 0;
  std::string package_;
  int depth_ = 0;
  int temp_counter_ = 0;
};

}  // namespace

ParseResult parse_source(const SourceFile& file, const FrontendOptions& options) {
  ParseResult result;
  Lexer lexer(file.text, file.path, result.diagnostics);
  std::vector<Token> toks = lexer.run();
  Parser parser(file, options, std::move(toks), result.diagnostics);
  result.fragment = parser.run();
  return result;
}

}  // namespace mrmine::frontend
