// Runs a codified MR on the values its parameters had in the origin test:
// the origin test is interpreted up to the source invocation, the parameter
// values are read from that state, and the MR body runs on the same heap.
#pragma once

#include <stdexcept>
#include <string>

#include "mrmine/interpreter.h"
#include "mrmine/synthesis.h"

namespace mrmine::testing {

inline exec::Value literal_value(const ir::Literal& lit) {
  return std::visit(
      [](const auto& v) -> exec::Value {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, ir::NullLit>) {
          return exec::Null{};
        } else {
          return v;
        }
      },
      lit.value);
}

struct Replay {
  bool reached = false;  // origin test got to the source invocation
  exec::TestRun run;     // MR run
};

inline Replay replay_mr(const synthesis::CodifiedMR& mr, const ir::TestCaseIR& origin, const ir::ProjectModel& m) {
  Replay out;
  exec::Interpreter interp(m);
  exec::Env captured;
  exec::Hooks hooks;
  hooks.before_statement = [&](int stmt, const exec::Env& env) {
    if (stmt == mr.origin_stmt) {
      captured = env;
      out.reached = true;
      return false;
    }
    return true;
  };
  interp.run_test(origin, {}, hooks);
  if (!out.reached) return out;
  std::vector<exec::Value> args;
  for (const auto& src : mr.sources) {
    if (src.variable) {
      auto it = captured.find(*src.variable);
      if (it == captured.end()) throw std::runtime_error("no value for " + *src.variable);
      args.push_back(it->second);
    } else {
      args.push_back(literal_value(*src.literal));
    }
  }
  out.run = interp.run_test(mr.body, args);
  return out;
}

}  // namespace mrmine::testing
