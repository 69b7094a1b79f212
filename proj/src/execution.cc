#include "mrmine/execution.h"

#include <algorithm>
#include <random>

namespace mrmine::exec {

using namespace mrmine::ir;
using synthesis::CodifiedMR;
using synthesis::Status;

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Draws are built directly from the engine output so that sequences do not
// depend on the standard library's distribution implementations.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}

  double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  std::int64_t between(std::int64_t lo, std::int64_t hi) {
    auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    std::uint64_t r = span == 0 ? rng_() : rng_() % span;
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + r);
  }

  bool coin() { return (rng_() >> 63) != 0; }

 private:
  std::mt19937_64 rng_;
};

class Generator {
 public:
  Generator(const ProjectModel& model, const GenConfig& cfg, std::uint64_t seed)
      : model_(model), cfg_(cfg), draw_(seed) {}

  Value value(const Type& t, Heap& heap, int depth) {
    switch (t.base) {
      case BaseType::Int:
        return gen_int();
      case BaseType::Float:
        return gen_float();
      case BaseType::Bool:
        return draw_.coin();
      case BaseType::String:
        return gen_string();
      case BaseType::Object:
        return object(t.class_fqn, heap, depth);
      case BaseType::Var:
        break;
    }
    throw UnconstructibleType("parameter of unresolved type");
  }

 private:
  std::int64_t gen_int() {
    double r = draw_.unit();
    double p = cfg_.boundary_probability;
    if (r < p) return 0;
    if (r < 2 * p) return -1;
    if (r < 3 * p) return 1;
    return draw_.between(cfg_.int_lo, cfg_.int_hi);
  }

  double gen_float() {
    double r = draw_.unit();
    double p = cfg_.boundary_probability;
    if (r < p) return 0.0;
    if (r < 2 * p) return -1.0;
    if (r < 3 * p) return 1.0;
    return cfg_.float_lo + draw_.unit() * (cfg_.float_hi - cfg_.float_lo);
  }

  std::string gen_string() {
    if (draw_.unit() < cfg_.boundary_probability || cfg_.alphabet.empty() || cfg_.max_string_length == 0)
      return "";
    auto len = static_cast<std::size_t>(draw_.between(1, static_cast<std::int64_t>(cfg_.max_string_length)));
    std::string out;
    for (std::size_t i = 0; i < len; ++i)
      out += cfg_.alphabet[static_cast<std::size_t>(
          draw_.between(0, static_cast<std::int64_t>(cfg_.alphabet.size()) - 1))];
    return out;
  }

  Value object(const std::string& fqn, Heap& heap, int depth) {
    const ClassDecl* cls = model_.find_class(fqn);
    if (!cls) throw UnconstructibleType("class '" + fqn + "' is not declared");
    if (depth > cfg_.depth_limit) throw UnconstructibleType("'" + fqn + "' exceeds the depth limit");
    Object o;
    o.class_fqn = cls->fqn;
    for (const auto& f : cls->fields) o.fields.push_back(zero_value(f.type));
    for (std::size_t i = 0; i < cls->fields.size(); ++i) {
      const FieldDecl& f = cls->fields[i];
      if (f.type.is_object()) {
        if (f.required) {
          o.fields[i] = object(f.type.class_fqn, heap, depth + 1);
        } else if (draw_.unit() < cfg_.fill_probability &&
                   constructible(f.type, model_, cfg_.depth_limit, depth + 1)) {
          o.fields[i] = object(f.type.class_fqn, heap, depth + 1);
        }
      } else if (f.type.base != BaseType::Var && draw_.unit() < cfg_.fill_probability) {
        o.fields[i] = value(f.type, heap, depth + 1);
      }
    }
    return heap.alloc(std::move(o));
  }

  const ProjectModel& model_;
  const GenConfig& cfg_;
  Draw draw_;
};

std::optional<int> assertion_stmt(const TestCaseIR& body) {
  for (const auto& s : body.statements)
    if (std::holds_alternative<AssertionStmt>(s.node)) return s.index;
  return std::nullopt;
}

FilterVerdict tally(const std::string& name, const std::vector<Outcome>& outcomes, const FilterConfig& cfg) {
  FilterVerdict v;
  v.name = name;
  v.generated = outcomes.size();
  for (const auto& o : outcomes) {
    switch (o.kind) {
      case Outcome::Kind::Pass:
        ++v.passed;
        break;
      case Outcome::Kind::RelationViolated:
        ++v.violated;
        break;
      case Outcome::Kind::InvalidInput:
        ++v.invalid;
        break;
      case Outcome::Kind::EngineError:
        ++v.engine_errors;
        if (v.note.empty()) v.note = o.message;
        break;
    }
  }
  v.valid = v.passed + v.violated;
  v.pass_ratio = v.valid ? static_cast<double>(v.passed) / static_cast<double>(v.valid) : 0.0;
  v.status = classify(v.valid, v.passed, cfg.threshold, cfg.min_valid);
  return v;
}

}  // namespace

bool constructible(const Type& t, const ProjectModel& model, int depth_limit, int depth) {
  if (t.base == BaseType::Var) return false;
  if (!t.is_object()) return true;
  if (depth > depth_limit) return false;
  const ClassDecl* cls = model.find_class(t.class_fqn);
  if (!cls) return false;
  for (const auto& f : cls->fields)
    if (f.required && f.type.is_object() && !constructible(f.type, model, depth_limit, depth + 1)) return false;
  return true;
}

std::vector<InputTuple> generate_inputs(const CodifiedMR& mr, const ProjectModel& model, const GenConfig& cfg) {
  if (cfg.attempts < 1) throw std::invalid_argument("attempts must be at least 1");
  if (cfg.depth_limit < 1) throw std::invalid_argument("depth limit must be at least 1");
  for (const auto& p : mr.params) {
    if (!constructible(p.type, model, cfg.depth_limit))
      throw UnconstructibleType("parameter '" + p.name + "' of type " + p.type.str() + " cannot be constructed");
  }
  Generator gen(model, cfg, splitmix64(cfg.seed ^ fnv1a(mr.name)));
  std::vector<InputTuple> out(cfg.attempts);
  for (auto& tuple : out)
    for (const auto& p : mr.params) tuple.args.push_back(gen.value(p.type, tuple.heap, 1));
  return out;
}

std::string_view to_string(Outcome::Kind k) {
  switch (k) {
    case Outcome::Kind::Pass:
      return "pass";
    case Outcome::Kind::RelationViolated:
      return "relation_violated";
    case Outcome::Kind::InvalidInput:
      return "invalid_input";
    case Outcome::Kind::EngineError:
      return "engine_error";
  }
  return "?";
}

Outcome execute_mr(const CodifiedMR& mr, const InputTuple& input, const ProjectModel& model,
                   std::uint64_t step_budget) {
  Outcome out;
  auto relation = assertion_stmt(mr.body);
  if (!relation) {
    out.kind = Outcome::Kind::EngineError;
    out.message = "codified MR has no relation assertion";
    return out;
  }
  try {
    Interpreter interp(model, step_budget);
    interp.heap() = input.heap;
    TestRun run = interp.run_test(mr.body, input.args);
    switch (run.end) {
      case TestRun::End::Completed:
      case TestRun::End::Stopped:
        out.kind = Outcome::Kind::Pass;
        break;
      case TestRun::End::AssertionFailed:
        out.kind = Outcome::Kind::RelationViolated;
        out.assertion = run.failure->id;
        out.lhs = run.failure->lhs;
        out.rhs = run.failure->rhs;
        break;
      case TestRun::End::Exception:
        out.message = run.message;
        out.stmt = run.stmt;
        // An exception while evaluating the relation assertion itself means
        // the relation could not be confirmed for a valid input.
        out.kind = run.stmt < *relation ? Outcome::Kind::InvalidInput : Outcome::Kind::RelationViolated;
        break;
    }
  } catch (const EngineError& e) {
    out.kind = Outcome::Kind::EngineError;
    out.message = e.what();
  }
  return out;
}

Status classify(std::size_t valid, std::size_t passed, double threshold, std::size_t min_valid) {
  if (valid < min_valid || valid == 0) return Status::Undetermined;
  double ratio = static_cast<double>(passed) / static_cast<double>(valid);
  return ratio >= threshold ? Status::HighQuality : Status::LowQuality;
}

FilterVerdict filter_mr(const CodifiedMR& mr, const ProjectModel& model, const FilterConfig& cfg) {
  std::vector<InputTuple> inputs;
  try {
    inputs = generate_inputs(mr, model, cfg.gen);
  } catch (const UnconstructibleType& e) {
    FilterVerdict v = tally(mr.name, {}, cfg);
    v.note = e.what();
    return v;
  }
  std::vector<Outcome> outcomes(inputs.size());
  const auto n = static_cast<std::int64_t>(inputs.size());
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < n; ++i) {
    auto k = static_cast<std::size_t>(i);
    outcomes[k] = execute_mr(mr, inputs[k], model, cfg.step_budget);
  }
  return tally(mr.name, outcomes, cfg);
}

FilterVerdict filter_mr_serial(const CodifiedMR& mr, const ProjectModel& model, const FilterConfig& cfg) {
  std::vector<InputTuple> inputs;
  try {
    inputs = generate_inputs(mr, model, cfg.gen);
  } catch (const UnconstructibleType& e) {
    FilterVerdict v = tally(mr.name, {}, cfg);
    v.note = e.what();
    return v;
  }
  std::vector<Outcome> outcomes;
  for (const auto& in : inputs) outcomes.push_back(execute_mr(mr, in, model, cfg.step_budget));
  return tally(mr.name, outcomes, cfg);
}

std::vector<FilterVerdict> filter_mrs(std::vector<CodifiedMR>& mrs, const ProjectModel& model,
                                      const FilterConfig& cfg) {
  std::vector<std::size_t> order(mrs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mrs[a].name < mrs[b].name; });
  std::vector<FilterVerdict> out;
  for (std::size_t i : order) {
    FilterVerdict v = filter_mr(mrs[i], model, cfg);
    mrs[i].status = v.status;
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace mrmine::exec
