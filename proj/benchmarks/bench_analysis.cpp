#include <benchmark/benchmark.h>

#include <vector>

#include "corrcache/analysis.hpp"
#include "corrcache/static_optimal.hpp"
#include "corrcache/workload_config.hpp"
#include "corrcache/workloads.hpp"

using namespace corrcache;

namespace {

void solve(benchmark::State& state, const char* preset) {
  const WorkingSetModel model(std::get<GroupedWorkload>(load_preset(preset)));
  const double b = 0.05 * static_cast<double>(model.total_volume());
  for (auto _ : state) benchmark::DoNotOptimize(model.solve(b).t_star);
}

void report(benchmark::State& state, const char* preset) {
  const WorkingSetModel model(std::get<GroupedWorkload>(load_preset(preset)));
  const double b = 0.05 * static_cast<double>(model.total_volume());
  for (auto _ : state) benchmark::DoNotOptimize(model_hit_report(model, b).rows.size());
}

// Branch and bound on D candidates with mixed sizes.
void knapsack(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  auto rng = stream_rng(1, 0, 0);
  std::vector<std::uint64_t> sizes(d);
  std::vector<double> rates(d);
  std::uint64_t total = 0;
  for (std::size_t i = 0; i < d; ++i) {
    sizes[i] = 1 + rng() % 1000;
    rates[i] = static_cast<double>(1 + rng() % 1000);
    total += sizes[i];
  }
  for (auto _ : state) benchmark::DoNotOptimize(static_optimal_select(sizes, rates, total / 3).objective);
}

}  // namespace

BENCHMARK_CAPTURE(solve, structured, "grouped-4.1");
BENCHMARK_CAPTURE(solve, uniform, "fig2-setup");
BENCHMARK_CAPTURE(report, structured, "grouped-4.1");
BENCHMARK_CAPTURE(report, uniform, "fig2-setup")->Unit(benchmark::kMillisecond);
BENCHMARK(knapsack)->Arg(10)->Arg(20)->Arg(25);

BENCHMARK_MAIN();
