#include <map>

#include "mrmine/builtins.h"
#include "mrmine/frontend.h"

namespace mrmine::frontend {

using namespace mrmine::ir;

namespace {

class TypeResolver {
 public:
  explicit TypeResolver(const ProjectModel& model) : model_(model) {}

  void method(MethodDecl& m, const std::string& owner) {
    env_.clear();
    if (!m.is_static) env_["this"] = Type::Object(owner);
    for (const auto& p : m.params) env_[p.name] = p.type;
    block(m.body);
  }

  void test_case(TestCaseIR& tc) {
    env_.clear();
    for (const auto& p : tc.params) env_[p.name] = p.type;
    block(tc.statements);
  }

 private:
  void block(std::vector<Statement>& body) {
    for (auto& s : body) statement(s);
  }

  void statement(Statement& s) {
    std::visit(
        [&](auto& n) {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, VarDecl>) {
            Type t = expr(n.init);
            if (n.type.base == BaseType::Var && t.base != BaseType::Var) n.type = t;
            env_[n.name] = n.type;
          } else if constexpr (std::is_same_v<N, Assignment>) {
            expr(n.target);
            expr(n.value);
          } else if constexpr (std::is_same_v<N, InvocationStmt>) {
            call(n.call);
          } else if constexpr (std::is_same_v<N, AssertionStmt>) {
            for (auto& o : n.assertion.operands) expr(o);
          } else if constexpr (std::is_same_v<N, ThrowStmt>) {
            expr(n.message);
          } else if constexpr (std::is_same_v<N, ReturnStmt>) {
            if (n.value) expr(*n.value);
          } else if constexpr (std::is_same_v<N, IfStmt>) {
            expr(n.cond);
            block(n.then_body);
            block(n.else_body);
          } else if constexpr (std::is_same_v<N, WhileStmt>) {
            expr(n.cond);
            block(n.body);
          }
        },
        s.node);
  }

  Type call(MethodInvocation& mi) {
    if (mi.receiver) {
      Type rt = expr(*mi.receiver);
      if (rt.is_object()) {
        mi.class_fqn = rt.class_fqn;
      } else if (rt.base == BaseType::String) {
        mi.class_fqn = std::string(builtins::kStringClass);
      } else {
        mi.class_fqn.clear();
      }
    }
    std::vector<Type> arg_types;
    for (auto& a : mi.args) arg_types.push_back(expr(a));
    if (const ClassDecl* c = model_.find_class(mi.class_fqn)) {
      if (const MethodDecl* m = c->find_method(mi.method, mi.args.size()))
        return m->return_type.value_or(Type::Var());
      return Type::Var();
    }
    return builtins::result_type(mi.class_fqn, mi.method, arg_types).value_or(Type::Var());
  }

  Type expr(Expression& e) {
    return std::visit(
        [&](auto& n) -> Type {
          using N = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<N, Literal>) {
            switch (n.value.index()) {
              case 1:
                return Type::Int();
              case 2:
                return Type::Float();
              case 3:
                return Type::Bool();
              case 4:
                return Type::String();
              default:
                return Type::Var();
            }
          } else if constexpr (std::is_same_v<N, VarRef>) {
            auto it = env_.find(n.name);
            return it == env_.end() ? Type::Var() : it->second;
          } else if constexpr (std::is_same_v<N, FieldAccess>) {
            Type bt = expr(*n.base);
            if (!bt.is_object()) return Type::Var();
            const ClassDecl* c = model_.find_class(bt.class_fqn);
            const FieldDecl* f = c ? c->find_field(n.field) : nullptr;
            return f ? f->type : Type::Var();
          } else if constexpr (std::is_same_v<N, BinaryExpr>) {
            Type l = expr(*n.lhs);
            Type r = expr(*n.rhs);
            if (is_comparison(n.op) || is_logical(n.op)) return Type::Bool();
            if (n.op == BinOp::Add && (l.base == BaseType::String || r.base == BaseType::String))
              return Type::String();
            if (l.base == BaseType::Float || r.base == BaseType::Float) return Type::Float();
            if (l.base == BaseType::Int && r.base == BaseType::Int) return Type::Int();
            return Type::Var();
          } else if constexpr (std::is_same_v<N, UnaryExpr>) {
            Type t = expr(*n.operand);
            return n.op == UnOp::Not ? Type::Bool() : t;
          } else if constexpr (std::is_same_v<N, CallExpr>) {
            return call(*n.call);
          } else {
            for (auto& a : n.args) expr(a);
            return Type::Object(n.class_fqn);
          }
        },
        e.node);
  }

  const ProjectModel& model_;
  std::map<std::string, Type> env_;
};

bool assigns_receiver_field(const std::vector<Statement>& body) {
  for (const auto& s : body) {
    if (const auto* a = std::get_if<Assignment>(&s.node)) {
      if (std::holds_alternative<FieldAccess>(a->target.node) && root_variable(a->target) == "this")
        return true;
    } else if (const auto* i = std::get_if<IfStmt>(&s.node)) {
      if (assigns_receiver_field(i->then_body) || assigns_receiver_field(i->else_body)) return true;
    } else if (const auto* w = std::get_if<WhileStmt>(&s.node)) {
      if (assigns_receiver_field(w->body)) return true;
    }
  }
  return false;
}

}  // namespace

ProjectModel link_project(std::vector<Fragment> fragments, std::vector<std::string> internal_prefixes) {
  ProjectModel model;
  model.internal_prefixes = std::move(internal_prefixes);
  std::map<std::string, std::string> owner;
  for (auto& f : fragments) {
    for (auto& c : f.classes) {
      auto [it, fresh] = owner.emplace(c.fqn, f.path);
      if (!fresh)
        throw LinkError("duplicate class '" + c.fqn + "' declared in " + it->second + " and " + f.path);
      model.classes.push_back(std::move(c));
    }
    for (auto& s : f.suites) model.test_suites.push_back(std::move(s));
  }
  // Resolution reads the class table while rewriting bodies, so it works on
  // copies and writes them back.
  TypeResolver resolver(model);
  std::vector<ClassDecl> classes = model.classes;
  for (auto& c : classes) {
    for (auto& m : c.methods) {
      resolver.method(m, c.fqn);
      m.writes_fields = assigns_receiver_field(m.body);
    }
  }
  std::vector<TestSuite> suites = model.test_suites;
  for (auto& s : suites)
    for (auto& tc : s.test_cases) resolver.test_case(tc);
  model.classes = std::move(classes);
  model.test_suites = std::move(suites);
  return model;
}

void resolve_test_case(TestCaseIR& tc, const ProjectModel& model) {
  TypeResolver(model).test_case(tc);
}

}  // namespace mrmine::frontend
