// Serial reference loops against their OpenMP counterparts.

#include "conflict/metrics.hpp"
#include "conflict/pipeline.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace conflict;

namespace {

CurvilinearProfile constant(double speed, double t_pass, std::size_t n = 300)
{
  CurvilinearProfile p;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 0.1 * static_cast<double>(i);
    p.t.push_back(t);
    p.s.push_back(speed * (t - t_pass));
    p.v.push_back(speed);
  }
  p.a = gradient(p.v, p.t);
  p.t_pass = t_pass;
  return p;
}

const std::vector<Scenario>& corpus()
{
  static const std::vector<Scenario> scenarios = [] {
    PipelineConfig cfg;
    cfg.corpus.scenarios = 64;
    cfg.corpus.noise = {0.5, 0.5, true, NoiseScope::all};
    return load_input(cfg).scenarios;
  }();
  return scenarios;
}

// The first feasible period sits deep in the grid, so the scan covers most candidates.
void BM_FirstFeasible(benchmark::State& state, bool parallel)
{
  const auto first = constant(8.0, 5.0);
  const auto second = constant(14.0, 25.0);
  const MrctFeasibility feasible(first, &second, {});
  const std::size_t count = 3000;
  for (auto _ : state) {
    auto k = parallel ? first_feasible_parallel(feasible, 0.01, count) : first_feasible_serial(feasible, 0.01, count);
    benchmark::DoNotOptimize(k);
  }
}

void BM_ProcessScenarios(benchmark::State& state)
{
  const PipelineConfig cfg;
  const auto jobs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto results = process_scenarios(corpus(), cfg, jobs);
    benchmark::DoNotOptimize(results);
  }
  state.counters["scenarios"] = static_cast<double>(corpus().size());
}

}  // namespace

BENCHMARK_CAPTURE(BM_FirstFeasible, serial, false)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_FirstFeasible, parallel, true)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ProcessScenarios)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv)
{
  benchmark::AddCustomContext("omp_max_threads", std::to_string(omp_get_max_threads()));
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
