// Helpers shared by the test binaries: loading the bundled corpus and
// building small models from inline MiniTest snippets.
#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mrmine/frontend.h"
#include "mrmine/ir.h"
#include "mrmine/pipeline.h"

namespace mrmine::testing {

inline std::string corpus_path(const std::string& rel = "") {
  return rel.empty() ? std::string(MRMINE_CORPUS_DIR) : std::string(MRMINE_CORPUS_DIR) + "/" + rel;
}

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<std::string> mt_files(const std::string& dir) {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".mt") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

inline frontend::Fragment parse_or_throw(const std::string& path, const std::string& text) {
  auto r = frontend::parse_source({path, text});
  if (r.has_errors()) throw std::runtime_error(r.diagnostics.front().str());
  return std::move(r.fragment);
}

inline std::vector<frontend::Fragment> subject_fragments() {
  std::vector<frontend::Fragment> out;
  for (const auto& f : mt_files(corpus_path("src"))) out.push_back(parse_or_throw(f, slurp(f)));
  return out;
}

// Subject classes plus every corpus test file.
inline ir::ProjectModel corpus_model() {
  auto frags = subject_fragments();
  for (const auto& f : mt_files(corpus_path("tests"))) frags.push_back(parse_or_throw(f, slurp(f)));
  return frontend::link_project(std::move(frags), {"com.demo"});
}

// Subject classes plus one inline test source.
inline ir::ProjectModel model_with(const std::string& test_source) {
  auto frags = subject_fragments();
  frags.push_back(parse_or_throw("inline.mt", test_source));
  return frontend::link_project(std::move(frags), {"com.demo"});
}

// Wraps statements in a test class in package com.demo.util.
inline std::string test_source(const std::string& body, const std::string& name = "t") {
  return "package com.demo.util;\nclass InlineTest {\n  @Test\n  void " + name + "() {\n" + body + "\n  }\n}\n";
}

inline const ir::TestCaseIR& find_test(const ir::ProjectModel& m, const std::string& name) {
  for (const auto& s : m.test_suites)
    for (const auto& tc : s.test_cases)
      if (tc.name == name) return tc;
  throw std::runtime_error("no test named " + name);
}

inline const ir::TestSuite& suite_of(const ir::ProjectModel& m, const std::string& test) {
  for (const auto& s : m.test_suites)
    for (const auto& tc : s.test_cases)
      if (tc.name == test) return s;
  throw std::runtime_error("no test named " + test);
}

inline pipeline::RunConfig corpus_config() {
  pipeline::RunConfig cfg;
  cfg.inputs = {corpus_path()};
  cfg.prefixes = {"com.demo"};
  return cfg;
}

// The corpus loaded the way the command-line tool loads it.
inline const pipeline::LoadedProject& corpus_project() {
  static const pipeline::LoadedProject p = pipeline::load_project(corpus_config());
  return p;
}

inline std::vector<synthesis::CodifiedMR> corpus_mrs() {
  return pipeline::run_synthesis(corpus_project(), corpus_config()).mrs;
}

inline const synthesis::CodifiedMR& mr_named(const std::vector<synthesis::CodifiedMR>& mrs, const std::string& name) {
  for (const auto& mr : mrs)
    if (mr.name == name) return mr;
  throw std::runtime_error("no MR named " + name);
}

}  // namespace mrmine::testing
