#include <benchmark/benchmark.h>

#include "coopsched/config.hpp"
#include "coopsched/sim_engine.hpp"

using namespace coopsched;

namespace {

const ScenarioConfig& scenario() {
  static const ScenarioConfig config = load_config_text("");
  return config;
}

void BM_BatchSerial(benchmark::State& state) {
  const auto world = scenario().world();
  const auto params = scenario().policy_params();
  const auto traces = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto s = run_batch_serial(world, PolicyKind::kAvucb, params, traces, 1);
    benchmark::DoNotOptimize(s.total_energy_mean);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * world.horizon);
}

void BM_BatchParallel(benchmark::State& state) {
  const auto world = scenario().world();
  const auto params = scenario().policy_params();
  const auto traces = static_cast<std::size_t>(state.range(0));
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) {
    auto s = run_batch(world, PolicyKind::kAvucb, params, traces, 1, workers);
    benchmark::DoNotOptimize(s.total_energy_mean);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * world.horizon);
}

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Args({256, 1})->Args({256, 0})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
