#include <benchmark/benchmark.h>

#include "mchain/config.hpp"
#include "mchain/ensemble.hpp"
#include "mchain/log.hpp"

namespace {

mchain::TrajectoryContext context(int L) {
  const nlohmann::json c = {{"L", L}, {"J", 0.5}, {"nu", 0.25}, {"gamma", 0.5}, {"t_max", 20},
                            {"subsystem_sizes", {L / 4}}, {"seed", 11}};
  return mchain::TrajectoryContext::build(mchain::config_from_json(c));
}

void BM_Serial(benchmark::State& state) {
  const auto ctx = context(static_cast<int>(state.range(0)));
  const int n = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(mchain::run_ensemble_serial(ctx, n));
  state.SetItemsProcessed(state.iterations() * n);
}

void BM_Parallel(benchmark::State& state) {
  const auto ctx = context(static_cast<int>(state.range(0)));
  const int n = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(mchain::run_ensemble_parallel(ctx, n, 0));
  state.SetItemsProcessed(state.iterations() * n);
}

}  // namespace

BENCHMARK(BM_Serial)->Args({32, 16})->Args({64, 16})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Parallel)->Args({32, 16})->Args({64, 16})->Unit(benchmark::kMillisecond)->UseRealTime();

int main(int argc, char** argv) {
  mchain::log::set_level(mchain::log::Level::quiet);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
