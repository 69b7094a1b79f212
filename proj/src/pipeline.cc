#include "mrmine/pipeline.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "mrmine/ir_serialize.h"
#include "mrmine/printer.h"

namespace mrmine::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace mrmine::ir;

namespace {

constexpr const char* kManifestFile = "manifest.json";

std::string fixed(double v, int digits) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

json invocation_json(const InvocationId& id) { return json{{"stmt", id.stmt}, {"pos", id.pos}}; }

json element_json(const dataflow::Element& e) {
  json j{{"kind", std::string(dataflow::to_string(e.kind))}, {"invocation", invocation_json(e.anchor)}};
  if (e.position >= 0) j["position"] = e.position;
  if (e.variable) j["variable"] = *e.variable;
  if (e.literal) j["literal"] = printer::print_literal(*e.literal);
  return j;
}

json suite_stats_json(const SuiteStats& s) {
  json hist = json::object();
  for (const auto& [k, v] : s.mi_histogram) hist[std::to_string(k)] = v;
  return json{{"suite", s.suite},
              {"tests", s.tests},
              {"mtcs", s.mtcs},
              {"mtc_percentage", fixed(s.mtc_percentage, 2)},
              {"instances", s.instances},
              {"mi_histogram", hist},
              {"transformation_present", s.transformation_present}};
}

json refusal_json(const Refusal& r) {
  return json{{"suite", r.suite},
              {"test", r.test},
              {"instance", r.instance},
              {"reason", std::string(synthesis::to_string(r.reason))},
              {"detail", r.detail}};
}

void add_diagnostics(LoadedProject& p, const std::string& path, std::vector<frontend::Diagnostic> diags) {
  bool failed = false;
  for (auto& d : diags) {
    failed = failed || d.severity == frontend::Severity::Error;
    p.diagnostics.push_back(std::move(d));
  }
  if (failed) p.failed_files.push_back(path);
}

std::vector<std::string> collect_files(const std::vector<std::string>& inputs) {
  std::vector<std::string> out;
  for (const auto& in : inputs) {
    fs::path path(in);
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
      std::vector<std::string> found;
      for (auto it = fs::recursive_directory_iterator(path, ec); !ec && it != fs::recursive_directory_iterator();
           it.increment(ec)) {
        if (!it->is_regular_file()) continue;
        auto ext = it->path().extension().string();
        if (ext == ".mt" || ext == ".mrir") found.push_back(it->path().generic_string());
      }
      if (ec) throw ConfigError("cannot read directory " + in + ": " + ec.message());
      std::sort(found.begin(), found.end());
      out.insert(out.end(), found.begin(), found.end());
    } else if (fs::is_regular_file(path, ec)) {
      out.push_back(path.generic_string());
    } else {
      throw ConfigError("input path does not exist: " + in);
    }
  }
  return out;
}

}  // namespace

void write_file(const std::string& path, const std::string& text) {
  std::error_code ec;
  auto parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("cannot write " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void validate(const RunConfig& cfg) {
  if (!(cfg.filter.threshold > 0.0 && cfg.filter.threshold <= 1.0))
    throw ConfigError("threshold must be in (0, 1]");
  if (cfg.filter.gen.attempts < 1) throw ConfigError("attempts must be at least 1");
  if (cfg.depth_k < 0) throw ConfigError("depth must be non-negative");
  if (cfg.inputs.empty()) throw ConfigError("no input paths given");
}

LoadedProject load_project(const RunConfig& cfg) {
  LoadedProject p;
  p.files = collect_files(cfg.inputs);
  std::vector<frontend::Fragment> fragments;
  for (const auto& path : p.files) {
    std::string text = read_file(path);
    if (fs::path(path).extension() == ".mrir") {
      ProjectModel m;
      try {
        m = parse_ir(text);
      } catch (const SchemaError& e) {
        throw ConfigError(path + ": " + e.what());
      }
      frontend::Fragment f;
      f.path = path;
      f.classes = std::move(m.classes);
      f.suites = std::move(m.test_suites);
      fragments.push_back(std::move(f));
      continue;
    }
    auto r = frontend::parse_source({path, std::move(text)});
    add_diagnostics(p, path, std::move(r.diagnostics));
    fragments.push_back(std::move(r.fragment));
  }
  for (const auto& f : fragments)
    for (const auto& s : f.suites) p.suite_file.emplace(s.name, f.path);
  try {
    p.model = frontend::link_project(std::move(fragments), cfg.prefixes);
  } catch (const frontend::LinkError& e) {
    throw ConfigError(e.what());
  }
  p.summaries = dataflow::method_writes_summary(p.model, cfg.depth_k);
  return p;
}

bool all_inputs_failed(const LoadedProject& p) { return !p.files.empty() && p.failed_files.size() == p.files.size(); }

DiscoveryReport run_discovery(const LoadedProject& p, const RunConfig& cfg) {
  const auto refs = discovery::all_tests(p.model);
  auto results = discovery::discover_all(p.model, p.summaries, cfg.policy);
  DiscoveryReport report;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const TestSuite& suite = p.model.test_suites[refs[i].suite];
    const TestCaseIR& tc = suite.test_cases[refs[i].test];
    TestDiscovery td;
    td.suite = suite.name;
    auto f = p.suite_file.find(suite.name);
    td.file = f == p.suite_file.end() ? suite.file_id : f->second;
    td.test = tc.name;
    td.is_mtc = results[i].is_mtc;
    if (!results[i].instances.empty()) {
      auto analysis = dataflow::analyze_test(tc, p.model, p.summaries, cfg.policy);
      for (auto& inst : results[i].instances) {
        InstanceInfo info;
        info.transformation = synthesis::deduce_constituents(inst, analysis).constituents.has_value();
        info.instance = std::move(inst);
        td.instances.push_back(std::move(info));
      }
    }
    report.tests.push_back(std::move(td));
  }
  return report;
}

CorpusStats compute_stats(const DiscoveryReport& report) {
  std::map<std::string, SuiteStats> by_suite;
  CorpusStats out;
  out.total.suite = "total";
  auto count = [](SuiteStats& s, const TestDiscovery& t) {
    ++s.tests;
    if (t.is_mtc) ++s.mtcs;
    for (const auto& i : t.instances) {
      ++s.instances;
      ++s.mi_histogram[i.instance.MI.size()];
      if (i.instance.MI.size() == 2 && i.transformation) ++s.transformation_present;
    }
  };
  for (const auto& t : report.tests) {
    auto& s = by_suite[t.suite];
    s.suite = t.suite;
    count(s, t);
    count(out.total, t);
  }
  auto pct = [](SuiteStats& s) { s.mtc_percentage = s.tests ? 100.0 * s.mtcs / s.tests : 0.0; };
  for (auto& [name, s] : by_suite) {
    pct(s);
    out.suites.push_back(s);
  }
  pct(out.total);
  return out;
}

SynthesisReport run_synthesis(const LoadedProject& p, const RunConfig& cfg) {
  SynthesisReport report;
  std::set<std::string> names;
  for (const auto& ref : discovery::all_tests(p.model)) {
    const TestSuite& suite = p.model.test_suites[ref.suite];
    const TestCaseIR& tc = suite.test_cases[ref.test];
    auto analysis = dataflow::analyze_test(tc, p.model, p.summaries, cfg.policy);
    auto found = discovery::discover_mtc(analysis, p.model);
    for (auto& o : synthesis::synthesize_test(tc, suite.name, analysis, found, p.model)) {
      if (o.mr) {
        // Test names are only unique per suite; later duplicates get a suffix.
        std::string base = o.mr->name;
        for (int k = 2; names.count(o.mr->name); ++k) o.mr->name = base + "_" + std::to_string(k);
        if (o.mr->name != base) {
          o.mr->body.name = o.mr->name;
          renumber(o.mr->body);
        }
        names.insert(o.mr->name);
        report.mrs.push_back(std::move(*o.mr));
      } else {
        report.refusals.push_back(Refusal{suite.name, tc.name, o.instance_index, *o.refusal, o.detail});
      }
    }
  }
  return report;
}

Manifest make_manifest(const SynthesisReport& r) {
  Manifest m;
  for (const auto& mr : r.mrs) {
    m.mrs.push_back(ManifestEntry{mr.name, "codified/" + mr.name + ".mt", mr.origin_suite, mr.origin_test,
                                  mr.instance_index, mr.cut, mr.status});
  }
  m.refusals = r.refusals;
  return m;
}

std::string manifest_json(const Manifest& m) {
  json mrs = json::array();
  for (const auto& e : m.mrs) {
    mrs.push_back(json{{"name", e.name},
                       {"file", e.file},
                       {"origin", json{{"suite", e.origin_suite}, {"test", e.origin_test}, {"instance", e.instance}}},
                       {"cut", e.cut},
                       {"status", std::string(synthesis::to_string(e.status))}});
  }
  json refusals = json::array();
  std::map<std::string, std::size_t> counts;
  for (auto r : {synthesis::Refusal::Arity, synthesis::Refusal::NoTransformation, synthesis::Refusal::Slice})
    counts[std::string(synthesis::to_string(r))] = 0;
  for (const auto& r : m.refusals) {
    refusals.push_back(refusal_json(r));
    ++counts[std::string(synthesis::to_string(r.reason))];
  }
  json doc{{"ir_version", kIrVersion},
           {"kind", "manifest"},
           {"mrs", mrs},
           {"refusals", refusals},
           {"refusal_counts", counts}};
  return doc.dump(2) + "\n";
}

Manifest parse_manifest(const std::string& text) {
  Manifest m;
  try {
    json doc = json::parse(text);
    if (doc.at("kind").get<std::string>() != "manifest") throw ConfigError("not a manifest document");
    for (const auto& e : doc.at("mrs")) {
      ManifestEntry entry;
      entry.name = e.at("name").get<std::string>();
      entry.file = e.at("file").get<std::string>();
      entry.origin_suite = e.at("origin").at("suite").get<std::string>();
      entry.origin_test = e.at("origin").at("test").get<std::string>();
      entry.instance = e.at("origin").at("instance").get<std::size_t>();
      entry.cut = e.at("cut").get<std::string>();
      auto st = synthesis::parse_status(e.at("status").get<std::string>());
      if (!st) throw ConfigError("unknown status in manifest entry " + entry.name);
      entry.status = *st;
      m.mrs.push_back(std::move(entry));
    }
    for (const auto& r : doc.at("refusals")) {
      Refusal ref;
      ref.suite = r.at("suite").get<std::string>();
      ref.test = r.at("test").get<std::string>();
      ref.instance = r.at("instance").get<std::size_t>();
      std::string reason = r.at("reason").get<std::string>();
      bool known = false;
      for (auto k : {synthesis::Refusal::Arity, synthesis::Refusal::NoTransformation, synthesis::Refusal::Slice}) {
        if (synthesis::to_string(k) == reason) {
          ref.reason = k;
          known = true;
        }
      }
      if (!known) throw ConfigError("unknown refusal reason '" + reason + "'");
      ref.detail = r.at("detail").get<std::string>();
      m.refusals.push_back(std::move(ref));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  return m;
}

void write_synthesis(const std::string& out_dir, const SynthesisReport& r) {
  // Stale MR files from an earlier run would otherwise linger.
  std::error_code ec;
  fs::remove_all(fs::path(out_dir) / "codified", ec);
  for (const auto& mr : r.mrs) write_file((fs::path(out_dir) / "codified" / (mr.name + ".mt")).string(), synthesis::render(mr));
  write_file((fs::path(out_dir) / kManifestFile).string(), manifest_json(make_manifest(r)));
}

Manifest read_manifest(const std::string& out_dir) {
  auto path = fs::path(out_dir) / kManifestFile;
  if (!fs::is_regular_file(path)) throw ConfigError("missing manifest " + path.generic_string());
  return parse_manifest(read_file(path.string()));
}

std::vector<synthesis::CodifiedMR> load_codified(const std::string& out_dir, const Manifest& m,
                                                 const ProjectModel& model) {
  std::vector<synthesis::CodifiedMR> out;
  for (const auto& e : m.mrs) {
    auto path = (fs::path(out_dir) / e.file).generic_string();
    auto parsed = frontend::parse_source({path, read_file(path)});
    if (parsed.has_errors()) throw ConfigError(parsed.diagnostics.front().str());
    TestCaseIR* body = nullptr;
    for (auto& s : parsed.fragment.suites)
      for (auto& tc : s.test_cases)
        if (tc.name == e.name) body = &tc;
    if (!body) throw ConfigError(path + ": no test method named " + e.name);
    frontend::resolve_test_case(*body, model);
    synthesis::CodifiedMR mr;
    mr.name = e.name;
    mr.params = body->params;
    mr.body = std::move(*body);
    mr.origin_suite = e.origin_suite;
    mr.origin_test = e.origin_test;
    mr.instance_index = e.instance;
    mr.cut = e.cut;
    mr.status = e.status;
    out.push_back(std::move(mr));
  }
  return out;
}

FilterReport run_filter(const LoadedProject& p, const RunConfig& cfg) {
  Manifest m = read_manifest(cfg.out_dir);
  auto mrs = load_codified(cfg.out_dir, m, p.model);
  FilterReport report;
  report.verdicts = exec::filter_mrs(mrs, p.model, cfg.filter);
  std::map<std::string, synthesis::Status> status;
  for (const auto& mr : mrs) status[mr.name] = mr.status;
  for (auto& e : m.mrs) e.status = status.at(e.name);
  write_file((fs::path(cfg.out_dir) / kManifestFile).string(), manifest_json(m));
  return report;
}

std::string discovery_json(const DiscoveryReport& r, const CorpusStats& s, const RunConfig& cfg) {
  json tests = json::array();
  for (const auto& t : r.tests) {
    json insts = json::array();
    for (std::size_t i = 0; i < t.instances.size(); ++i) {
      const auto& inst = t.instances[i].instance;
      json mi = json::array();
      for (const auto& id : inst.MI) mi.push_back(invocation_json(id));
      insts.push_back(json{{"index", i},
                           {"cut", inst.cut},
                           {"pattern", std::string(discovery::to_string(inst.alpha.pattern))},
                           {"operator", inst.alpha.op},
                           {"assertion_stmt", inst.alpha.assertion.stmt},
                           {"mi1", invocation_json(inst.alpha.mi1)},
                           {"mi2", invocation_json(inst.alpha.mi2)},
                           {"e1", element_json(inst.alpha.e1)},
                           {"e2", element_json(inst.alpha.e2)},
                           {"MI", mi},
                           {"transformation", t.instances[i].transformation}});
    }
    tests.push_back(json{{"suite", t.suite}, {"test", t.test}, {"file", t.file}, {"is_mtc", t.is_mtc}, {"instances", insts}});
  }
  json suites = json::array();
  for (const auto& ss : s.suites) suites.push_back(suite_stats_json(ss));
  json doc{{"ir_version", kIrVersion},
           {"kind", "mtc_report"},
           {"policy", std::string(dataflow::to_string(cfg.policy))},
           {"tests", tests},
           {"stats", json{{"suites", suites}, {"total", suite_stats_json(s.total)}}}};
  return doc.dump(2) + "\n";
}

std::string discovery_text(const DiscoveryReport& r, const CorpusStats& s) {
  std::ostringstream os;
  for (const auto& t : r.tests) {
    if (!t.is_mtc) continue;
    os << "MTC " << t.suite << "." << t.test << " (" << t.file << ")\n";
    for (std::size_t i = 0; i < t.instances.size(); ++i) {
      const auto& inst = t.instances[i].instance;
      os << "  #" << i << " " << discovery::to_string(inst.alpha.pattern) << " '" << inst.alpha.op << "' on "
         << inst.cut << ": mi1 at stmt " << inst.alpha.mi1.stmt << ", mi2 at stmt " << inst.alpha.mi2.stmt
         << ", |MI|=" << inst.MI.size() << (t.instances[i].transformation ? ", transformation" : "") << "\n";
    }
  }
  os << stats_text(s);
  return os.str();
}

std::string stats_json(const CorpusStats& s) {
  json suites = json::array();
  for (const auto& ss : s.suites) suites.push_back(suite_stats_json(ss));
  json doc{{"ir_version", kIrVersion}, {"kind", "corpus_stats"}, {"suites", suites}, {"total", suite_stats_json(s.total)}};
  return doc.dump(2) + "\n";
}

std::string stats_text(const CorpusStats& s) {
  std::ostringstream os;
  auto line = [&](const SuiteStats& x) {
    os << x.suite << ": " << x.mtcs << "/" << x.tests << " MTCs (" << fixed(x.mtc_percentage, 2) << "%), "
       << x.instances << " instances, |MI|";
    if (x.mi_histogram.empty()) os << " -";
    for (const auto& [k, v] : x.mi_histogram) os << " " << k << ":" << v;
    os << ", transformation " << x.transformation_present << "\n";
  };
  for (const auto& x : s.suites) line(x);
  line(s.total);
  return os.str();
}

std::string synthesis_text(const SynthesisReport& r) {
  std::ostringstream os;
  for (const auto& mr : r.mrs) {
    os << "codified " << mr.name << "(";
    for (std::size_t i = 0; i < mr.params.size(); ++i)
      os << (i ? ", " : "") << mr.params[i].type.str() << " " << mr.params[i].name;
    os << ") from " << mr.origin_suite << "." << mr.origin_test << " #" << mr.instance_index << "\n";
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& x : r.refusals) {
    os << "refused " << x.suite << "." << x.test << " #" << x.instance << ": " << synthesis::to_string(x.reason)
       << " (" << x.detail << ")\n";
    ++counts[std::string(synthesis::to_string(x.reason))];
  }
  os << r.mrs.size() << " codified, " << r.refusals.size() << " refused";
  for (const auto& [k, v] : counts) os << ", " << k << " " << v;
  os << "\n";
  return os.str();
}

std::string filter_json(const FilterReport& r, const RunConfig& cfg) {
  json verdicts = json::array();
  std::map<std::string, std::size_t> summary{{"high_quality", 0}, {"low_quality", 0}, {"undetermined", 0}};
  for (const auto& v : r.verdicts) {
    json j{{"name", v.name},
           {"generated", v.generated},
           {"valid", v.valid},
           {"invalid", v.invalid},
           {"engine_errors", v.engine_errors},
           {"passed", v.passed},
           {"violated", v.violated},
           {"pass_ratio", std::to_string(v.passed) + "/" + std::to_string(v.valid)},
           {"status", std::string(synthesis::to_string(v.status))}};
    if (!v.note.empty()) j["note"] = v.note;
    verdicts.push_back(std::move(j));
    ++summary[std::string(synthesis::to_string(v.status))];
  }
  json doc{{"ir_version", kIrVersion},
           {"kind", "filter_report"},
           {"config",
            json{{"seed", cfg.filter.gen.seed},
                 {"attempts", cfg.filter.gen.attempts},
                 {"threshold", fixed(cfg.filter.threshold, 4)},
                 {"min_valid", cfg.filter.min_valid}}},
           {"verdicts", verdicts},
           {"summary", summary}};
  return doc.dump(2) + "\n";
}

std::string filter_text(const FilterReport& r) {
  std::ostringstream os;
  std::size_t width = 4;
  for (const auto& v : r.verdicts) width = std::max(width, v.name.size());
  auto pad = [&](const std::string& s) { return s + std::string(width - s.size(), ' '); };
  os << pad("name") << "  generated  valid  passed  ratio   status\n";
  for (const auto& v : r.verdicts) {
    std::string gen = std::to_string(v.generated);
    std::string val = std::to_string(v.valid);
    std::string pas = std::to_string(v.passed);
    os << pad(v.name) << "  " << std::string(9 - std::min<std::size_t>(9, gen.size()), ' ') << gen << "  "
       << std::string(5 - std::min<std::size_t>(5, val.size()), ' ') << val << "  "
       << std::string(6 - std::min<std::size_t>(6, pas.size()), ' ') << pas << "  " << fixed(v.pass_ratio, 3)
       << "   " << synthesis::to_string(v.status) << "\n";
  }
  return os.str();
}

std::string summaries_json(const dataflow::Summaries& s) {
  json out = json::object();
  for (const auto& [k, v] : s) {
    json args = json::array();
    for (bool b : v.writes_arg) args.push_back(b);
    out[k] = json{{"reads_receiver", v.reads_receiver},
                  {"writes_receiver", v.writes_receiver},
                  {"writes_arg", args},
                  {"inconclusive", v.inconclusive}};
  }
  return json{{"ir_version", kIrVersion}, {"kind", "method_summaries"}, {"methods", out}}.dump(2) + "\n";
}

std::string summaries_text(const dataflow::Summaries& s) {
  std::ostringstream os;
  for (const auto& [k, v] : s) {
    os << k << ":";
    if (v.reads_receiver) os << " reads-receiver";
    if (v.writes_receiver) os << " writes-receiver";
    for (std::size_t i = 0; i < v.writes_arg.size(); ++i)
      if (v.writes_arg[i]) os << " writes-arg" << i;
    if (v.inconclusive) os << " inconclusive";
    os << "\n";
  }
  return os.str();
}

}  // namespace mrmine::pipeline
