#include <benchmark/benchmark.h>

#include <vector>

#include "gfd/forward.hpp"
#include "gfd/inverse.hpp"
#include "gfd/kernels.hpp"
#include "gfd/measure.hpp"
#include "gfd/operators.hpp"

namespace {

constexpr double kPi = 3.14159265358979324;

struct Fixture {
  gfd::TimeGrid grid = gfd::TimeGrid::with_window(2.0, 512, 128, 179);
  gfd::FractionalSpectrum spectrum;
  gfd::MemoryKernel kernel = gfd::MemoryKernel::tempered(1.0, 0.4, 1.0);
  gfd::SourceModel source;
  gfd::ObservationWindow window;

  explicit Fixture(int K)
      : spectrum(gfd::distributed_eigenvalues(gfd::dirichlet_eigenpairs(kPi, 0.0, K),
                                              gfd::DistributedMeasure::atoms({{0.5, 1.0}}))),
        source(make_source(grid, K)),
        window(make_window(grid, spectrum, kernel, source)) {}

  static gfd::SourceModel make_source(const gfd::TimeGrid& grid, int K) {
    gfd::SourceBlock block;
    block.start_index = grid.gap_end_index();
    block.profile.assign(grid.cell_count() / 10, 1.0);
    block.mode_vector.assign(static_cast<std::size_t>(K), 1.0);
    return gfd::make_partitioned_source({block}, grid);
  }

  static gfd::ObservationWindow make_window(const gfd::TimeGrid& grid,
                                            const gfd::FractionalSpectrum& spectrum,
                                            const gfd::MemoryKernel& kernel,
                                            const gfd::SourceModel& source) {
    const auto K = spectrum.eigenvalues.size();
    const auto sim = gfd::simulate(spectrum, kernel, std::vector<double>(K, 0.0), source, grid);
    std::vector<std::vector<double>> rows;
    for (const auto& mode : sim.modes) rows.push_back(mode.values);
    return gfd::ObservationWindow{grid, std::move(rows), {}, source, {}, {}};
  }
};

void BM_Simulate(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const Fixture fx(K);
  const std::vector<double> u0(static_cast<std::size_t>(K), 0.0);
  for (auto _ : state) {
    auto sim = gfd::simulate(fx.spectrum, fx.kernel, u0, fx.source, fx.grid);
    benchmark::DoNotOptimize(sim.modes.data());
  }
}

void BM_RecoverKernel(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto rec = gfd::recover_kernel(fx.window, fx.spectrum.eigenvalues);
    benchmark::DoNotOptimize(rec.kernel.values.data());
  }
}

void BM_RecoverProduct(benchmark::State& state) {
  const Fixture fx(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto rec = gfd::recover_product(fx.window);
    benchmark::DoNotOptimize(rec.eigenvalues.data());
  }
}

void BM_ShiftOrigin(benchmark::State& state) {
  const Fixture fx(4);
  for (auto _ : state) {
    auto shifted = gfd::shift_origin(fx.window);
    benchmark::DoNotOptimize(shifted.w.data());
  }
}

}  // namespace

BENCHMARK(BM_Simulate)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecoverKernel)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RecoverProduct)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ShiftOrigin)->Unit(benchmark::kMillisecond);
