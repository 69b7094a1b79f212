// Intraprocedural dataflow over test cases: reaching definitions, a value
// version analysis that tracks object mutation through calls, method
// read/write summaries, and per-invocation input/output sets.
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mrmine/ir.h"

namespace mrmine::dataflow {

// Reaching-definition markers besides statement indices.
inline constexpr int kUndefined = -1;  // no definition reaches, or lost in an opaque region
inline constexpr int kParamDef = -2;   // defined on entry as a test parameter

struct DefUseGraph {
  std::map<std::string, std::set<int>> defs;
  std::map<int, std::set<std::string>> uses;
  std::map<std::pair<int, std::string>, int> reaching;
  std::set<int> opaque_regions;

  // kUndefined when `var` is not used at `stmt` or nothing reaches it.
  int reaching_def(int stmt, const std::string& var) const;
};

DefUseGraph build_def_use(const ir::TestCaseIR& tc);

// Identifiers in raw source text, skipping string literals and comments.
std::set<std::string> opaque_identifiers(const std::string& text);

// --- method summaries ------------------------------------------------------

struct MethodSummary {
  bool reads_receiver = false;
  bool writes_receiver = false;
  std::vector<bool> writes_arg;
  bool inconclusive = false;

  bool operator==(const MethodSummary&) const = default;
};

// Keyed by summary_key(class, method, arity).
using Summaries = std::map<std::string, MethodSummary>;

std::string summary_key(const std::string& class_fqn, const std::string& method, std::size_t arity);

// Summaries for every declared method. Calls are followed up to `depth_k`
// levels; external calls, recursion and an exhausted depth make a summary
// inconclusive.
Summaries method_writes_summary(const ir::ProjectModel& model, int depth_k = 3);

const MethodSummary* find_summary(const Summaries& s, const ir::MethodInvocation& mi);

// --- value versions --------------------------------------------------------

enum class Policy { Conservative, AssumeMutated };

std::string_view to_string(Policy p);
std::optional<Policy> parse_policy(std::string_view text);

enum class VersionKind {
  Param,       // test parameter on entry
  Def,         // value computed by a declaration or assignment
  FieldStore,  // object state after a field assignment
  Ret,         // return value of an invocation
  RecvPost,    // receiver state after an invocation that writes it
  ArgPost,     // argument object state after an invocation that writes it
  Unknown      // lost precision; treated as undefined
};

struct Version {
  int id = 0;
  VersionKind kind = VersionKind::Unknown;
  int stmt = -1;           // producing statement (all kinds but Param)
  ir::InvocationId call;   // Ret, RecvPost, ArgPost
  int arg_pos = -1;        // ArgPost
  std::string var;         // Param, Def
};

struct InvocationFlow {
  ir::InvocationId id;
  const ir::MethodInvocation* call = nullptr;
  std::map<std::string, int> env_before;  // variable -> version just before the call
  std::optional<int> ret;
  std::optional<int> receiver_post;
  std::map<int, int> arg_post;
};

struct ValueFlow {
  std::vector<Version> versions;
  // env_before[i]: variable -> current version just before statement i;
  // env_before[n] is the state at the end of the test.
  std::vector<std::map<std::string, int>> env_before;
  std::vector<InvocationFlow> invocations;  // evaluation order

  const InvocationFlow* find(const ir::InvocationId& id) const;
  std::optional<int> version_at(int stmt, const std::string& var) const;
  bool is_unknown(int version) const { return versions.at(version).kind == VersionKind::Unknown; }
};

ValueFlow build_value_flow(const ir::TestCaseIR& tc, const ir::ProjectModel& model,
                           const Summaries& summaries, Policy policy);

// Canonical key of an expression's value: variables become their versions,
// calls their return versions. nullopt when any part is undefined or unknown.
std::optional<std::string> value_key(const ir::Expression& e, const std::map<std::string, int>& env,
                                     const ValueFlow& flow);
std::string version_key(int version);

// --- input / output sets ---------------------------------------------------

enum class ElementKind { ArgLiteral, ArgVar, ReceiverPre, ReceiverPost, ReturnValue, ArgObjectPost };

std::string_view to_string(ElementKind k);

struct Element {
  ElementKind kind = ElementKind::ArgVar;
  ir::InvocationId anchor;
  int position = -1;  // argument position; -1 for receiver and return value
  std::optional<std::string> variable;
  std::optional<std::string> key;  // value_key, empty when undefined
  std::optional<int> version;      // for elements bound to a single version
  std::optional<ir::Literal> literal;

  bool operator==(const Element& o) const {
    return kind == o.kind && anchor == o.anchor && position == o.position;
  }
};

struct IoSets {
  ir::InvocationId invocation;
  std::vector<Element> X;
  std::vector<Element> Y;
  // Inconclusive summary resolved by the assume-mutated policy.
  bool low_confidence = false;
};

IoSets compute_io_sets(const ir::MethodInvocation& mi, const ValueFlow& flow,
                       const Summaries& summaries, Policy policy, const ir::ProjectModel& model);

// Everything the later phases need about one test case.
struct TestAnalysis {
  const ir::TestCaseIR* tc = nullptr;
  DefUseGraph graph;
  ValueFlow flow;
  std::map<ir::InvocationId, IoSets> io;  // every invocation of a declared method
  Policy policy = Policy::Conservative;
};

TestAnalysis analyze_test(const ir::TestCaseIR& tc, const ir::ProjectModel& model,
                          const Summaries& summaries, Policy policy);

}  // namespace mrmine::dataflow
