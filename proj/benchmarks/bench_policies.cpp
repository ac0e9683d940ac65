#include <benchmark/benchmark.h>

#include "corrcache/cache_engine.hpp"
#include "corrcache/harness.hpp"

using namespace corrcache;

namespace {

const CompiledTrace& grouped_trace() {
  static const auto compiled = compile_trace(load_trace(TraceSource::parse("preset:grouped-4.1"), 0.1, 1));
  return compiled;
}

const CompiledTrace& toroid_trace() {
  static const auto compiled = compile_trace(load_trace(TraceSource::parse("preset:toroid-trace1"), 0.1, 1));
  return compiled;
}

// Main-cache throughput: one iteration simulates the whole trace.
void run(benchmark::State& state, const CompiledTrace& trace, const char* policy, double local_fraction) {
  const auto params = parse_policy(policy);
  const auto capacity = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    CacheSimulator sim(trace, params, CacheConfig{capacity, local_fraction});
    sim.run();
    benchmark::DoNotOptimize(sim.metrics().hits);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * trace.size()));
}

void grouped(benchmark::State& state, const char* policy) { run(state, grouped_trace(), policy, 0.0); }
void toroid(benchmark::State& state, const char* policy) { run(state, toroid_trace(), policy, 0.05); }

}  // namespace

BENCHMARK_CAPTURE(grouped, lru, "LRU")->Arg(15)->Arg(300);
BENCHMARK_CAPTURE(grouped, lfu, "LFU")->Arg(15)->Arg(300);
BENCHMARK_CAPTURE(grouped, sieve, "SIEVE")->Arg(15)->Arg(300);
BENCHMARK_CAPTURE(grouped, belady, "BELADY")->Arg(15)->Arg(300);
BENCHMARK_CAPTURE(grouped, lfru_w20, "LFRU(w=20)")->Arg(15)->Arg(300);
BENCHMARK_CAPTURE(grouped, lfrus_w20, "LFRUS(w=20,gamma=0.5)")->Arg(15)->Arg(300);
BENCHMARK_CAPTURE(toroid, lru, "LRU")->Arg(40)->Arg(400);
BENCHMARK_CAPTURE(toroid, lfru_w2, "LFRU(w=2)")->Arg(40)->Arg(400);
BENCHMARK_CAPTURE(toroid, lfrus_w20, "LFRUS(w=20,gamma=0.5)")->Arg(40)->Arg(400);

BENCHMARK_MAIN();
