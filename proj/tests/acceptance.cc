// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>

#include "json.hpp"
#include "mrmine/execution.h"
#include "mrmine/frontend.h"
#include "mrmine/ir_serialize.h"
#include "mrmine/pipeline.h"
#include "oracle.h"
#include "replay.h"
#include "test_support.h"

using namespace mrmine;
namespace pl = mrmine::pipeline;
namespace fs = std::filesystem;
namespace t = mrmine::testing;
using Clock = std::chrono::steady_clock;

namespace {

struct Result {
  bool ok = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

std::pair<int, std::string> shell(const std::string& cmd) {
  std::string out;
  FILE* p = ::popen((cmd + " 2>&1").c_str(), "r");
  if (!p) return {-1, ""};
  char buf[4096];
  while (std::fgets(buf, sizeof buf, p)) out += buf;
  int rc = ::pclose(p);
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, out};
}

// 1: labeled positives reported exactly, under 5 s.
Result discovery_correctness() {
  auto start = Clock::now();
  auto cfg = t::corpus_config();
  auto project = pl::load_project(cfg);
  auto report = pl::run_discovery(project, cfg);
  double elapsed = seconds_since(start);

  auto labels = nlohmann::json::parse(t::slurp(t::corpus_path("labels.json")));
  std::map<std::pair<std::string, std::string>, bool> want;
  std::size_t pos_files = 0, neg_files = 0;
  for (const auto& e : labels.at("tests")) {
    bool mtc = e.at("mtc");
    want[{e.at("suite"), e.at("test")}] = mtc;
    (mtc ? pos_files : neg_files)++;
  }
  std::size_t tp = 0, fp = 0, fn = 0, unlabeled = 0;
  for (const auto& td : report.tests) {
    auto it = want.find({td.suite, td.test});
    if (it == want.end()) {
      ++unlabeled;
      continue;
    }
    if (td.is_mtc && it->second) ++tp;
    if (td.is_mtc && !it->second) ++fp;
    if (!td.is_mtc && it->second) ++fn;
  }
  double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  Result r;
  r.ok = pos_files >= 20 && neg_files >= 20 && precision == 1.0 && recall == 1.0 && unlabeled == 0 &&
         report.tests.size() == want.size() && elapsed < 5.0;
  r.detail = std::to_string(pos_files) + " positive / " + std::to_string(neg_files) + " negative, precision " +
             std::to_string(precision) + " recall " + std::to_string(recall) + ", " + fmt_seconds(elapsed) +
             " (limit 5s)";
  return r;
}

// 2: discovery equals brute-force enumeration on tests with <= 8 statements.
Result oracle_equivalence() {
  const auto& p = t::corpus_project();
  std::size_t compared = 0, mismatched = 0, instances = 0;
  std::string first_bad;
  for (const auto& s : p.model.test_suites)
    for (const auto& tc : s.test_cases) {
      if (tc.statements.size() > 8) continue;
      auto a = dataflow::analyze_test(tc, p.model, p.summaries, dataflow::Policy::Conservative);
      auto got = t::discovered_instances(discovery::discover_mtc(a, p.model));
      auto want = t::brute_force_instances(a, p.model);
      ++compared;
      instances += want.size();
      if (got != want) {
        ++mismatched;
        if (first_bad.empty()) first_bad = tc.name;
      }
    }
  Result r;
  r.ok = compared > 0 && mismatched == 0;
  r.detail = std::to_string(compared) + " tests, " + std::to_string(instances) + " oracle instances, " +
             std::to_string(mismatched) + " mismatches" + (first_bad.empty() ? "" : " (first: " + first_bad + ")");
  return r;
}

// 3: the bold-width MR is codified as expected, matches its golden file, and
// every emitted MR survives render -> parse -> render unchanged.
Result codification_golden() {
  auto mrs = t::corpus_mrs();
  const auto& model = t::corpus_project().model;
  std::vector<std::string> problems;

  const auto& bold = t::mr_named(mrs, "simulateWidth_MR0");
  if (bold.params.size() != 1 || bold.params[0].name != "textRder") problems.push_back("parameter not introduced");
  int asserts = 0;
  bool source_decl = false, unrelated_call = false;
  for (const auto& st : bold.body.statements) {
    asserts += std::holds_alternative<ir::AssertionStmt>(st.node);
    source_decl = source_decl || ir::defined_variable(st) == std::optional<std::string>("textRder");
    ir::for_each_invocation(st, [&](const ir::MethodInvocation& mi) { unrelated_call |= mi.method == "equals"; });
  }
  if (source_decl) problems.push_back("source declaration kept");
  if (asserts != 1 || unrelated_call) problems.push_back("unrelated assertion kept");

  std::size_t goldens = 0;
  for (const auto& e : fs::directory_iterator(MRMINE_GOLDEN_DIR)) {
    std::string name = e.path().stem().string();
    ++goldens;
    if (synthesis::render(t::mr_named(mrs, name)) != t::slurp(e.path().string()))
      problems.push_back(name + " differs from golden");
  }

  std::size_t fixed = 0;
  for (const auto& mr : mrs) {
    std::string text = synthesis::render(mr);
    auto parsed = frontend::parse_source({"mr.mt", text});
    bool ok = !parsed.has_errors() && parsed.fragment.suites.size() == 1 &&
              parsed.fragment.suites[0].test_cases.size() == 1;
    if (ok) {
      ir::TestCaseIR back = parsed.fragment.suites[0].test_cases[0];
      frontend::resolve_test_case(back, model);
      synthesis::CodifiedMR again = mr;
      again.body = back;
      again.params = back.params;
      ok = ir::structurally_equal(back, mr.body) && synthesis::render(again) == text;
    }
    if (ok)
      ++fixed;
    else
      problems.push_back(mr.name + " is not a fixed point");
  }
  Result r;
  r.ok = problems.empty() && goldens >= 1;
  r.detail = std::to_string(goldens) + " golden files, " + std::to_string(fixed) + "/" + std::to_string(mrs.size()) +
             " fixed points";
  for (const auto& p : problems) r.detail += "; " + p;
  return r;
}

// 4: each MR passes when run on the values its origin test used.
Result semantics_preservation() {
  const auto& model = t::corpus_project().model;
  auto mrs = t::corpus_mrs();
  std::size_t violations = 0;
  std::string first_bad;
  for (const auto& mr : mrs) {
    const ir::TestCaseIR* origin = nullptr;
    for (const auto& s : model.test_suites)
      if (s.name == mr.origin_suite)
        for (const auto& tc : s.test_cases)
          if (tc.name == mr.origin_test) origin = &tc;
    bool ok = false;
    if (origin) {
      try {
        auto rep = t::replay_mr(mr, *origin, model);
        ok = rep.reached && rep.run.end == exec::TestRun::End::Completed;
      } catch (const std::exception&) {
      }
    }
    if (!ok) {
      ++violations;
      if (first_bad.empty()) first_bad = mr.name;
    }
  }
  Result r;
  r.ok = !mrs.empty() && violations == 0;
  r.detail = std::to_string(mrs.size()) + " MRs replayed, " + std::to_string(violations) + " violations" +
             (first_bad.empty() ? "" : " (first: " + first_bad + ")");
  return r;
}

// 5: filter verdicts with seed 0, 200 attempts, threshold 0.95, min_valid 5.
Result filtering_behavior() {
  auto start = Clock::now();
  auto mrs = t::corpus_mrs();
  exec::FilterConfig cfg;
  cfg.gen.seed = 0;
  cfg.gen.attempts = 200;
  cfg.threshold = 0.95;
  cfg.min_valid = 5;
  auto verdicts = exec::filter_mrs(mrs, t::corpus_project().model, cfg);
  double elapsed = seconds_since(start);
  auto find = [&](const std::string& name) -> const exec::FilterVerdict* {
    for (const auto& v : verdicts)
      if (v.name == name) return &v;
    return nullptr;
  };
  using synthesis::Status;
  auto high_at_one = [](const exec::FilterVerdict* v) {
    return v && v->status == Status::HighQuality && v->valid >= 5 && v->passed == v->valid && v->pass_ratio == 1.0;
  };
  const auto* bold = find("simulateWidth_MR0");
  const auto* stack = find("pushPop_MR0");
  const auto* strict = find("simulateWidthStrict_MR0");
  const auto* chain = find("prependHead_MR0");
  bool a = high_at_one(bold) && high_at_one(stack);
  bool b = strict && strict->status == Status::LowQuality;
  bool c = chain && chain->status == Status::Undetermined && chain->generated == 0;
  std::size_t engine_errors = 0;
  for (const auto& v : verdicts) engine_errors += v.engine_errors;
  auto ratio = [](const exec::FilterVerdict* v) {
    return v ? std::to_string(v->passed) + "/" + std::to_string(v->valid) : std::string("missing");
  };
  Result r;
  r.ok = a && b && c && engine_errors == 0 && elapsed < 30.0;
  r.detail = std::string("(a) ") + (a ? "ok" : "no") + " bold " + ratio(bold) + " stack " + ratio(stack) + ", (b) " +
             (b ? "ok" : "no") + " strict " + ratio(strict) + ", (c) " + (c ? "ok" : "no") + " chain " +
             (chain ? std::string(synthesis::to_string(chain->status)) : std::string("missing")) + ", " + fmt_seconds(elapsed) +
             " (limit 30s)";
  return r;
}

// 6: two `run` invocations produce byte-identical output trees.
Result determinism() {
  fs::path base = fs::temp_directory_path() / ("mrmine_accept_" + std::to_string(::getpid()));
  fs::remove_all(base);
  std::string a = (base / "a").string(), b = (base / "b").string();
  std::string args = " run " + t::corpus_path() + " --prefix com.demo --seed 0 --attempts 200 --out ";
  int ra = shell(std::string(MRMINE_CLI) + args + a).first;
  int rb = shell(std::string(MRMINE_CLI) + args + b).first;
  auto snap = [](const std::string& dir) {
    std::map<std::string, std::string> out;
    if (fs::exists(dir))
      for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = t::slurp(e.path().string());
    return out;
  };
  auto sa = snap(a), sb = snap(b);
  fs::remove_all(base);
  Result r;
  r.ok = ra == 0 && rb == 0 && !sa.empty() && sa == sb && sa.count("manifest.json") && sa.count("filter_report.json") &&
         sa.count("mtc_report.json");
  r.detail = std::to_string(sa.size()) + " files compared, exit codes " + std::to_string(ra) + "/" +
             std::to_string(rb) + (sa == sb ? ", identical" : ", different");
  return r;
}

// 7: the randomized invariant suite passes.
Result invariant_suite() {
  auto [rc, out] = shell(std::string(MRMINE_PROPERTIES) + " --gtest_filter=Property.*");
  bool all = out.find("[  PASSED  ] 5 tests.") != std::string::npos && out.find("FAILED") == std::string::npos;
  Result r;
  r.ok = rc == 0 && all;
  r.detail = all ? "5 properties x 200 cases, 0 failures" : "property suite failed (exit " + std::to_string(rc) + ")";
  return r;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Result()>>> criteria{
      {"1 discovery correctness", discovery_correctness},
      {"2 oracle equivalence", oracle_equivalence},
      {"3 codification golden", codification_golden},
      {"4 semantics preservation", semantics_preservation},
      {"5 filtering behavior", filtering_behavior},
      {"6 determinism", determinism},
      {"7 invariant suite", invariant_suite},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Result r;
    try {
      r = check();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    failed += !r.ok;
    std::cout << (r.ok ? "PASS " : "FAIL ") << name << ": " << r.detail << std::endl;
  }
  return failed ? 1 : 0;
}
