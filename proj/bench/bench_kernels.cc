// Parallel kernels against their serial references on the bundled corpus.
// Discovery runs on the corpus test suites replicated `range(0)` times.
#include <benchmark/benchmark.h>

#include "mrmine/discovery.h"
#include "mrmine/execution.h"
#include "mrmine/pipeline.h"

namespace {

using namespace mrmine;

pipeline::RunConfig corpus_config() {
  pipeline::RunConfig cfg;
  cfg.inputs = {MRMINE_CORPUS_DIR};
  cfg.prefixes = {"com.demo"};
  return cfg;
}

const pipeline::LoadedProject& corpus() {
  static const pipeline::LoadedProject p = pipeline::load_project(corpus_config());
  return p;
}

ir::ProjectModel replicated(int copies) {
  ir::ProjectModel m = corpus().model;
  auto suites = m.test_suites;
  m.test_suites.clear();
  for (int c = 0; c < copies; ++c)
    for (auto s : suites) {
      s.name += "_" + std::to_string(c);
      m.test_suites.push_back(std::move(s));
    }
  return m;
}

const synthesis::CodifiedMR& bold_mr() {
  static const auto mrs = pipeline::run_synthesis(corpus(), corpus_config()).mrs;
  for (const auto& mr : mrs)
    if (mr.name == "simulateWidth_MR0") return mr;
  std::abort();
}

void BM_DiscoverParallel(benchmark::State& state) {
  auto m = replicated(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(discovery::discover_all(m, corpus().summaries, dataflow::Policy::Conservative));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(discovery::all_tests(m).size()));
}

void BM_DiscoverSerial(benchmark::State& state) {
  auto m = replicated(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(discovery::discover_all_serial(m, corpus().summaries, dataflow::Policy::Conservative));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(discovery::all_tests(m).size()));
}

exec::FilterConfig filter_config(std::int64_t attempts) {
  exec::FilterConfig cfg;
  cfg.gen.attempts = static_cast<std::size_t>(attempts);
  return cfg;
}

void BM_FilterParallel(benchmark::State& state) {
  auto cfg = filter_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exec::filter_mr(bold_mr(), corpus().model, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_FilterSerial(benchmark::State& state) {
  auto cfg = filter_config(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(exec::filter_mr_serial(bold_mr(), corpus().model, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_DiscoverParallel)->Arg(1)->Arg(16)->Arg(64);
BENCHMARK(BM_DiscoverSerial)->Arg(1)->Arg(16)->Arg(64);
BENCHMARK(BM_FilterParallel)->Arg(200)->Arg(2000);
BENCHMARK(BM_FilterSerial)->Arg(200)->Arg(2000);

BENCHMARK_MAIN();
