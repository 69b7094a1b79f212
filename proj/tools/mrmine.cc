// Command-line driver: discover, synthesize, filter, stats and run.
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "mrmine/ir_serialize.h"
#include "mrmine/pipeline.h"

namespace {

namespace fs = std::filesystem;
namespace pl = mrmine::pipeline;

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kAllInputsFailed = 2;
constexpr int kEngineError = 3;

struct Options {
  pl::RunConfig cfg;
  std::string policy = "conservative";
  std::string format = "text";
};

void add_options(CLI::App* cmd, Options& o) {
  cmd->add_option("inputs", o.cfg.inputs, "Source files, .mrir files or directories")->required();
  cmd->add_option("--prefix", o.cfg.prefixes, "Internal package prefix (repeatable)");
  cmd->add_option("--out", o.cfg.out_dir, "Output directory");
  cmd->add_option("--seed", o.cfg.filter.gen.seed, "Generator seed");
  cmd->add_option("--attempts", o.cfg.filter.gen.attempts, "Generated inputs per MR");
  cmd->add_option("--threshold", o.cfg.filter.threshold, "Pass ratio needed for high quality");
  cmd->add_option("--min-valid", o.cfg.filter.min_valid, "Valid inputs needed for a verdict");
  cmd->add_option("--policy", o.policy, "Unknown-callee policy")
      ->check(CLI::IsMember({"conservative", "assume-mutated"}));
  cmd->add_option("--depth", o.cfg.depth_k, "Method summary depth");
  cmd->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"text", "structured"}));
  cmd->add_flag("--dump-summaries", o.cfg.dump_summaries, "Print method write summaries");
  cmd->add_flag("--emit-ir", o.cfg.emit_ir, "Write the linked model to <out>/model.mrir");
}

std::string out_path(const pl::RunConfig& cfg, const char* file) { return (fs::path(cfg.out_dir) / file).string(); }

void require_out(const pl::RunConfig& cfg) {
  if (cfg.out_dir.empty()) throw pl::ConfigError("--out is required for this command");
}

bool structured(const pl::RunConfig& cfg) { return cfg.format == pl::Format::Structured; }

// Loads inputs and reports diagnostics; returns false when every input failed.
bool load(const pl::RunConfig& cfg, pl::LoadedProject& p) {
  p = pl::load_project(cfg);
  for (const auto& d : p.diagnostics) std::cerr << d.str() << "\n";
  if (cfg.dump_summaries) {
    std::cerr << pl::summaries_text(p.summaries);
    if (!cfg.out_dir.empty()) pl::write_file(out_path(cfg, "summaries.json"), pl::summaries_json(p.summaries));
  }
  if (cfg.emit_ir) {
    require_out(cfg);
    pl::write_file(out_path(cfg, "model.mrir"), mrmine::ir::serialize_ir(p.model));
  }
  if (pl::all_inputs_failed(p)) {
    std::cerr << "error: no input file could be parsed\n";
    return false;
  }
  return true;
}

int cmd_discover(const pl::RunConfig& cfg, bool stats_only) {
  pl::LoadedProject p;
  if (!load(cfg, p)) return kAllInputsFailed;
  auto report = pl::run_discovery(p, cfg);
  auto stats = pl::compute_stats(report);
  std::string doc = stats_only ? pl::stats_json(stats) : pl::discovery_json(report, stats, cfg);
  if (!cfg.out_dir.empty()) pl::write_file(out_path(cfg, stats_only ? "stats.json" : "mtc_report.json"), doc);
  if (structured(cfg))
    std::cout << doc;
  else
    std::cout << (stats_only ? pl::stats_text(stats) : pl::discovery_text(report, stats));
  return kOk;
}

int cmd_synthesize(const pl::RunConfig& cfg) {
  require_out(cfg);
  pl::LoadedProject p;
  if (!load(cfg, p)) return kAllInputsFailed;
  auto report = pl::run_synthesis(p, cfg);
  pl::write_synthesis(cfg.out_dir, report);
  if (structured(cfg))
    std::cout << pl::manifest_json(pl::make_manifest(report));
  else
    std::cout << pl::synthesis_text(report);
  return kOk;
}

int filter_stage(const pl::RunConfig& cfg, const pl::LoadedProject& p) {
  auto report = pl::run_filter(p, cfg);
  std::string doc = pl::filter_json(report, cfg);
  pl::write_file(out_path(cfg, "filter_report.json"), doc);
  if (structured(cfg))
    std::cout << doc;
  else
    std::cout << pl::filter_text(report);
  for (const auto& v : report.verdicts)
    if (v.engine_errors > 0) {
      std::cerr << "error: engine error while executing " << v.name << ": " << v.note << "\n";
      return kEngineError;
    }
  return kOk;
}

int cmd_filter(const pl::RunConfig& cfg) {
  require_out(cfg);
  pl::LoadedProject p;
  if (!load(cfg, p)) return kAllInputsFailed;
  return filter_stage(cfg, p);
}

int cmd_run(const pl::RunConfig& cfg) {
  require_out(cfg);
  pl::LoadedProject p;
  if (!load(cfg, p)) return kAllInputsFailed;
  auto discovered = pl::run_discovery(p, cfg);
  auto stats = pl::compute_stats(discovered);
  pl::write_file(out_path(cfg, "mtc_report.json"), pl::discovery_json(discovered, stats, cfg));
  pl::write_file(out_path(cfg, "stats.json"), pl::stats_json(stats));
  auto synthesized = pl::run_synthesis(p, cfg);
  pl::write_synthesis(cfg.out_dir, synthesized);
  if (!structured(cfg)) std::cout << pl::stats_text(stats) << pl::synthesis_text(synthesized);
  return filter_stage(cfg, p);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mine metamorphic relations from unit tests"};
  app.require_subcommand(1);
  Options opts;
  std::string chosen;
  for (const char* name : {"discover", "synthesize", "filter", "stats", "run"}) {
    static const std::map<std::string, std::string> help{
        {"discover", "Find MR-encoded tests and their MR instances"},
        {"synthesize", "Codify MR instances as parameterized tests"},
        {"filter", "Execute codified MRs on generated inputs"},
        {"stats", "Corpus statistics"},
        {"run", "All stages"}};
    auto* sub = app.add_subcommand(name, help.at(name));
    add_options(sub, opts);
    sub->callback([&chosen, name] { chosen = name; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    opts.cfg.policy = *mrmine::dataflow::parse_policy(opts.policy);
    opts.cfg.format = opts.format == "structured" ? pl::Format::Structured : pl::Format::Text;
    pl::validate(opts.cfg);
    if (chosen == "discover") return cmd_discover(opts.cfg, false);
    if (chosen == "stats") return cmd_discover(opts.cfg, true);
    if (chosen == "synthesize") return cmd_synthesize(opts.cfg);
    if (chosen == "filter") return cmd_filter(opts.cfg);
    return cmd_run(opts.cfg);
  } catch (const pl::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const mrmine::exec::EngineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kEngineError;
  }
}
