#include <benchmark/benchmark.h>

#include "comblab/analytic.hpp"
#include "comblab/comb.hpp"
#include "comblab/disk_law.hpp"
#include "comblab/engine.hpp"
#include "comblab/rng.hpp"

namespace comblab {
namespace {

void bm_theta0(benchmark::State& state) {
  const double ell = static_cast<double>(state.range(0)) / 4.0;
  for (auto _ : state) benchmark::DoNotOptimize(theta0(ell).theta0);
}
BENCHMARK(bm_theta0)->Arg(1)->Arg(4)->Arg(40);

void bm_strip_survival(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(strip_survival(0.1).value);
    benchmark::DoNotOptimize(strip_survival(2.0).value);
  }
}
BENCHMARK(bm_strip_survival);

void bm_disk_exit(benchmark::State& state) {
  RandomStream rng(7);
  for (auto _ : state) benchmark::DoNotOptimize(sample_disk_exit(1.0, rng).time);
}
BENCHMARK(bm_disk_exit);

SimParams params(EngineKind engine) {
  SimParams p;
  p.engine = engine;
  p.master_seed = 11;
  p.workers = 1;
  p.time_cap = 1e4;
  return p;
}

void bm_strip_batch(benchmark::State& state) {
  const auto engine = static_cast<EngineKind>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_batch(VerticalStrip{-1.0, 1.0}, {0.0, 0.0}, 1000, params(engine)).samples.data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(bm_strip_batch)
    ->Arg(static_cast<int>(EngineKind::EulerBridge))
    ->Arg(static_cast<int>(EngineKind::WosTime))
    ->Unit(benchmark::kMillisecond);

void bm_comb_batch(benchmark::State& state) {
  const auto engine = static_cast<EngineKind>(state.range(0));
  const CombDomain comb = build_comb(CombSpec{UniformGenerator{1.0, 1.0}, 40, false});
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_batch(comb, {0.5, 0.0}, 1000, params(engine)).samples.data());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(bm_comb_batch)
    ->Arg(static_cast<int>(EngineKind::EulerBridge))
    ->Arg(static_cast<int>(EngineKind::WosTime))
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace comblab

BENCHMARK_MAIN();
