// Stage orchestration behind the command-line tool: loading inputs,
// discovery, synthesis, filtering and corpus statistics, plus the report and
// manifest files exchanged between stages.
#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrmine/dataflow.h"
#include "mrmine/discovery.h"
#include "mrmine/execution.h"
#include "mrmine/frontend.h"
#include "mrmine/synthesis.h"

namespace mrmine::pipeline {

enum class Format { Text, Structured };

struct RunConfig {
  std::vector<std::string> inputs;  // files or directories
  std::vector<std::string> prefixes;
  std::string out_dir;
  dataflow::Policy policy = dataflow::Policy::Conservative;
  int depth_k = 3;
  exec::FilterConfig filter;
  Format format = Format::Text;
  bool dump_summaries = false;
  bool emit_ir = false;  // write the linked model as <out>/model.mrir
};

// Invalid configuration or unusable input/output paths.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void validate(const RunConfig& cfg);

struct LoadedProject {
  ir::ProjectModel model;
  std::vector<frontend::Diagnostic> diagnostics;
  std::vector<std::string> files;         // in load order
  std::vector<std::string> failed_files;  // files with at least one error
  std::map<std::string, std::string> suite_file;  // suite name -> file
  dataflow::Summaries summaries;
};

// `.mt` files are parsed, `.mrir` files decoded; directories are walked
// recursively in sorted order. Throws ConfigError for missing paths, schema
// errors and duplicate classes.
LoadedProject load_project(const RunConfig& cfg);

bool all_inputs_failed(const LoadedProject& p);

struct InstanceInfo {
  discovery::MRInstance instance;
  bool transformation = false;  // |MI| = 2 with a transform chain
};

struct TestDiscovery {
  std::string suite;
  std::string file;
  std::string test;
  bool is_mtc = false;
  std::vector<InstanceInfo> instances;
};

struct DiscoveryReport {
  std::vector<TestDiscovery> tests;
};

DiscoveryReport run_discovery(const LoadedProject& p, const RunConfig& cfg);

struct SuiteStats {
  std::string suite;
  std::size_t tests = 0;
  std::size_t mtcs = 0;
  double mtc_percentage = 0.0;
  std::size_t instances = 0;
  std::map<std::size_t, std::size_t> mi_histogram;  // |MI| -> instance count
  std::size_t transformation_present = 0;            // among |MI| = 2
};

struct CorpusStats {
  std::vector<SuiteStats> suites;  // sorted by suite name
  SuiteStats total;
};

CorpusStats compute_stats(const DiscoveryReport& report);

struct Refusal {
  std::string suite;
  std::string test;
  std::size_t instance = 0;
  synthesis::Refusal reason = synthesis::Refusal::Arity;
  std::string detail;
};

struct SynthesisReport {
  std::vector<synthesis::CodifiedMR> mrs;
  std::vector<Refusal> refusals;
};

SynthesisReport run_synthesis(const LoadedProject& p, const RunConfig& cfg);

struct ManifestEntry {
  std::string name;
  std::string file;  // relative to the output directory
  std::string origin_suite;
  std::string origin_test;
  std::size_t instance = 0;
  std::string cut;
  synthesis::Status status = synthesis::Status::Candidate;
};

struct Manifest {
  std::vector<ManifestEntry> mrs;
  std::vector<Refusal> refusals;
};

Manifest make_manifest(const SynthesisReport& r);
std::string manifest_json(const Manifest& m);
Manifest parse_manifest(const std::string& text);

// Writes codified/<name>.mt and manifest.json.
void write_synthesis(const std::string& out_dir, const SynthesisReport& r);
Manifest read_manifest(const std::string& out_dir);

// Re-reads codified MR files listed in the manifest.
std::vector<synthesis::CodifiedMR> load_codified(const std::string& out_dir, const Manifest& m,
                                                 const ir::ProjectModel& model);

struct FilterReport {
  std::vector<exec::FilterVerdict> verdicts;  // MR-name order
};

// Runs the filter on the manifest in `out_dir` and writes statuses back.
FilterReport run_filter(const LoadedProject& p, const RunConfig& cfg);

// Report documents (structured form) and their text renderings.
std::string discovery_json(const DiscoveryReport& r, const CorpusStats& s, const RunConfig& cfg);
std::string discovery_text(const DiscoveryReport& r, const CorpusStats& s);
std::string stats_json(const CorpusStats& s);
std::string stats_text(const CorpusStats& s);
std::string synthesis_text(const SynthesisReport& r);
std::string filter_json(const FilterReport& r, const RunConfig& cfg);
std::string filter_text(const FilterReport& r);
std::string summaries_json(const dataflow::Summaries& s);
std::string summaries_text(const dataflow::Summaries& s);

void write_file(const std::string& path, const std::string& text);
std::string read_file(const std::string& path);

}  // namespace mrmine::pipeline
