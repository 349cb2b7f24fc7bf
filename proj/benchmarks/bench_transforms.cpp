#include <benchmark/benchmark.h>

#include <complex>

#include "gfd/kernels.hpp"
#include "gfd/laplace.hpp"

namespace {

void BM_MittagLeffler(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0));
  for (auto _ : state) {
    double v = gfd::mittag_leffler(0.5, -x);
    benchmark::DoNotOptimize(v);
  }
}

void BM_ContourInvert(benchmark::State& state) {
  const auto nodes = static_cast<std::size_t>(state.range(0));
  const gfd::MemoryKernel M = gfd::MemoryKernel::tempered(1.0, 0.4, 1.0);
  gfd::ContourSpec spec;
  spec.node_count = nodes;
  for (auto _ : state) {
    double v = gfd::contour_invert(
        [&](std::complex<double> s) { return gfd::relaxation_hat(M, 3.0, s); }, 0.5, spec);
    benchmark::DoNotOptimize(v);
  }
}

void BM_SoninePartner(benchmark::State& state) {
  const auto N = static_cast<std::size_t>(state.range(0));
  const gfd::TimeGrid grid = gfd::TimeGrid::uniform(2.0, N);
  const gfd::MemoryKernel M = gfd::MemoryKernel::power_law(1.0, 0.5);
  for (auto _ : state) {
    auto partner = gfd::sonine_partner(M, grid);
    benchmark::DoNotOptimize(partner.cell_values.data());
  }
}

}  // namespace

BENCHMARK(BM_MittagLeffler)->Arg(1)->Arg(10)->Arg(100);
BENCHMARK(BM_ContourInvert)->Arg(24)->Arg(48)->Arg(96);
BENCHMARK(BM_SoninePartner)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
