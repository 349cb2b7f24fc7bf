#include <benchmark/benchmark.h>

#include <cmath>
#include <cstdint>

#include "gfd/kernels.hpp"
#include "gfd/volterra.hpp"

namespace {

void BM_SolveSecondKind(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const bool refine = state.range(1) != 0;
  const gfd::TimeGrid grid = gfd::TimeGrid::uniform(1.0, N);
  const gfd::MemoryKernel M = gfd::MemoryKernel::power_law(1.0, 0.5);
  const gfd::GridFunction g = gfd::GridFunction::constant(grid, 1.0);
  for (auto _ : state) {
    auto traj = gfd::solve_second_kind(M, 4.0, g, {refine});
    benchmark::DoNotOptimize(traj.values.data());
  }
  state.SetComplexityN(static_cast<std::int64_t>(N));
}

void BM_WeightedConvolve(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const gfd::TimeGrid grid = gfd::TimeGrid::uniform(1.0, N);
  const gfd::MemoryKernel M = gfd::MemoryKernel::tempered(1.0, 0.4, 1.0);
  gfd::GridFunction g = gfd::GridFunction::zeros(grid);
  for (std::size_t n = 0; n < g.size(); ++n) g.values[n] = 1.0 / (1.0 + grid.time(n));
  for (auto _ : state) {
    auto conv = gfd::weighted_convolve(M, g);
    benchmark::DoNotOptimize(conv.values.data());
  }
  state.SetComplexityN(static_cast<std::int64_t>(N));
}

void BM_Deconvolve(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const gfd::TimeGrid grid = gfd::TimeGrid::uniform(1.0, N);
  const gfd::MemoryKernel M = gfd::MemoryKernel::power_law(1.0, 0.5);
  gfd::GridFunction w = gfd::GridFunction::zeros(grid);
  for (std::size_t n = 0; n < w.size(); ++n) w.values[n] = std::exp(-grid.time(n));
  const gfd::GridFunction r = gfd::weighted_convolve(M, w);
  for (auto _ : state) {
    auto rec = gfd::deconvolve_first_kind(w, r, 1e-8);
    benchmark::DoNotOptimize(rec.values.values.data());
  }
}

}  // namespace

BENCHMARK(BM_SolveSecondKind)
    ->ArgsProduct({{128, 256, 512, 1024}, {0, 1}})
    ->Complexity(benchmark::oNSquared)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WeightedConvolve)
    ->RangeMultiplier(2)
    ->Range(128, 2048)
    ->Complexity(benchmark::oNSquared)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Deconvolve)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
