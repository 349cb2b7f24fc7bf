#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gfd/errors.hpp"
#include "gfd/forward.hpp"

using gfd::GridFunction;
using gfd::MemoryKernel;
using gfd::SourceModel;
using gfd::TimeGrid;

namespace {

constexpr double kPi = 3.14159265358979324;

gfd::FractionalSpectrum make_spectrum(int K, double beta = 1.0, double weight = 1.0) {
  return gfd::distributed_eigenvalues(gfd::dirichlet_eigenpairs(kPi, 0.0, K),
                                      gfd::DistributedMeasure::atoms({{beta, weight}}));
}

SourceModel block_source(const TimeGrid& grid, std::size_t K) {
  gfd::SourceBlock block;
  block.start_index = grid.gap_end_index();
  block.profile.assign(grid.cell_count() / 10, 1.0);
  block.mode_vector.assign(K, 1.0);
  return gfd::make_partitioned_source({block}, grid);
}

}  // namespace

TEST_CASE("simulation is linear in the initial data") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 128);
  const auto spectrum = make_spectrum(3);
  const MemoryKernel M = MemoryKernel::power_law(1.0, 0.5);
  const SourceModel f = SourceModel::zero(grid, 3);

  const auto one = gfd::simulate(spectrum, M, {1.0, 0.5, -0.25}, f, grid);
  const auto two = gfd::simulate(spectrum, M, {2.0, 1.0, -0.5}, f, grid);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t n = 0; n < grid.node_count(); ++n)
      CHECK(two.modes[k].values[n] == doctest::Approx(2.0 * one.modes[k].values[n])
                                          .epsilon(1e-12));
}

TEST_CASE("superposition of initial data and source") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 128);
  const auto spectrum = make_spectrum(2);
  const MemoryKernel M = MemoryKernel::tempered(1.0, 0.4, 1.0);
  const SourceModel f = block_source(grid, 2);

  const auto both = gfd::simulate(spectrum, M, {1.0, -2.0}, f, grid);
  const auto only_u0 = gfd::simulate(spectrum, M, {1.0, -2.0}, SourceModel::zero(grid, 2), grid);
  const auto only_f = gfd::simulate(spectrum, M, {0.0, 0.0}, f, grid);
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
      const double sum = only_u0.modes[k].values[n] + only_f.modes[k].values[n];
      CHECK(both.modes[k].values[n] == doctest::Approx(sum).epsilon(1e-11));
    }
}

TEST_CASE("partitioned source honors the gap contract") {
  const TimeGrid grid = TimeGrid::with_window(2.0, 128, 32, 48);

  SUBCASE("valid single block") {
    const SourceModel f = block_source(grid, 2);
    CHECK(f.structure == gfd::SourceStructure::PartitionedGap);
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t n = 0; n < 48; ++n) CHECK(f.mode_values[k][n] == 0.0);
      CHECK(f.mode_values[k][48] != 0.0);
    }
    CHECK_FALSE(f.spans_all_modes);  // one block cannot span two modes
  }

  SUBCASE("first block must start at the gap end") {
    gfd::SourceBlock late;
    late.start_index = 60;
    late.profile = {1.0, 1.0};
    late.mode_vector = {1.0};
    CHECK_THROWS_AS((void)gfd::make_partitioned_source({late}, grid), gfd::precondition_error);
  }

  SUBCASE("leading profile sample must be nonzero") {
    gfd::SourceBlock block;
    block.start_index = 48;
    block.profile = {0.0, 1.0};
    block.mode_vector = {1.0};
    CHECK_THROWS_AS((void)gfd::make_partitioned_source({block}, grid), gfd::precondition_error);
  }

  SUBCASE("blocks must not overlap") {
    gfd::SourceBlock a{48, {1.0, 1.0, 1.0}, {1.0, 0.0}};
    gfd::SourceBlock b{49, {1.0}, {0.0, 1.0}};
    CHECK_THROWS_AS((void)gfd::make_partitioned_source({a, b}, grid), gfd::precondition_error);
  }

  SUBCASE("two independent blocks span two modes") {
    gfd::SourceBlock a{48, {1.0, 1.0}, {1.0, 0.0}};
    gfd::SourceBlock b{56, {2.0}, {0.0, 1.0}};
    const SourceModel f = gfd::make_partitioned_source({a, b}, grid);
    CHECK(f.spans_all_modes);
    CHECK(f.mode_values[1][56] == doctest::Approx(2.0));
  }

  SUBCASE("with_gap rejects interior support") {
    std::vector<std::vector<double>> rows(1, std::vector<double>(grid.node_count(), 0.0));
    rows[0][40] = 1.0;  // strictly inside (t0, t1)
    CHECK_THROWS_AS((void)SourceModel::with_gap(grid, rows), gfd::precondition_error);
  }
}

TEST_CASE("heat-limit field snapshot matches the leading eigenmode") {
  const TimeGrid grid = TimeGrid::uniform(2.0, 256);
  const TimeGrid table = TimeGrid::uniform(2.0, 8);
  const MemoryKernel M =
      MemoryKernel::tabulated(table, std::vector<double>(table.node_count(), 1.0));
  const auto spectrum = make_spectrum(3);
  const auto result =
      gfd::simulate(spectrum, M, {1.0, 0.0, 0.0}, SourceModel::zero(grid, 3), grid);

  const std::size_t node = 128;  // t = 1
  const std::vector<double> field = result.field_snapshot(node, 64);
  REQUIRE(field.size() == 65);
  CHECK(field.front() == 0.0);
  CHECK(field.back() == doctest::Approx(0.0).epsilon(1e-12));
  const double x_mid = kPi / 2;
  const double expected = std::exp(-1.0) * std::sqrt(2.0 / kPi) * std::sin(x_mid);
  CHECK(field[32] == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("observation traces") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 128);
  const auto spectrum = make_spectrum(3);
  const MemoryKernel M = MemoryKernel::power_law(1.0, 0.6);
  const auto result = gfd::simulate(spectrum, M, {1.0, 0.4, 0.2},
                                    SourceModel::zero(grid, 3), grid);

  SUBCASE("functional trace equals the coefficient sum") {
    const auto phi = gfd::ObservationFunctional::point_value(kPi / 3);
    const auto trace = gfd::observe(result, phi);
    CHECK_FALSE(trace.observability_warning);
    const auto coeffs =
        gfd::functional_coefficients(spectrum.base, phi);
    for (std::size_t n = 0; n < grid.node_count(); n += 11) {
      double sum = 0.0;
      for (std::size_t k = 0; k < 3; ++k) sum += coeffs[k] * result.modes[k].values[n];
      CHECK(trace.trace[n] == doctest::Approx(sum).epsilon(1e-13));
    }
  }

  SUBCASE("explicit zero coefficients raise the observability warning") {
    const auto trace = gfd::observe(result, std::vector<double>{0.0, 0.0, 0.0});
    CHECK(trace.observability_warning);
    for (std::size_t n = 0; n < grid.node_count(); ++n) CHECK(trace.trace[n] == 0.0);
  }
}

TEST_CASE("simulate validates its inputs") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 64);
  const auto spectrum = make_spectrum(2);
  const MemoryKernel M = MemoryKernel::power_law(1.0, 0.5);
  // Wrong initial coefficient count.
  CHECK_THROWS_AS(
      (void)gfd::simulate(spectrum, M, {1.0}, SourceModel::zero(grid, 2), grid),
      gfd::precondition_error);
  // Source grid mismatch.
  const TimeGrid other = TimeGrid::uniform(2.0, 64);
  CHECK_THROWS_AS(
      (void)gfd::simulate(spectrum, M, {1.0, 0.0}, SourceModel::zero(other, 2), grid),
      gfd::precondition_error);
}
