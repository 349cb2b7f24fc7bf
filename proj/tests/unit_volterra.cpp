#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gfd/errors.hpp"
#include "gfd/grid.hpp"
#include "gfd/kernels.hpp"
#include "gfd/laplace.hpp"
#include "gfd/volterra.hpp"

using gfd::GridFunction;
using gfd::MemoryKernel;
using gfd::TimeGrid;

namespace {

GridFunction exp_table_kernel_samples(const TimeGrid& grid) {
  return GridFunction::sampled(grid, [](double t) { return std::exp(-t); });
}

MemoryKernel exp_table_kernel(const TimeGrid& grid) {
  return MemoryKernel::tabulated(grid, exp_table_kernel_samples(grid).values);
}

}  // namespace

TEST_CASE("weighted convolution is exact for piecewise-linear inputs") {
  const TimeGrid grid = TimeGrid::uniform(2.0, 128);
  const MemoryKernel M = MemoryKernel::power_law(1.0, 0.5);
  SUBCASE("constant input") {
    const GridFunction out = gfd::weighted_convolve(M, GridFunction::constant(grid, 1.0));
    // (M * 1)(t) = t^{1/2} / Gamma(3/2)
    for (std::size_t n = 1; n < grid.node_count(); n += 17) {
      const double exact = std::sqrt(grid.time(n)) / 0.88622692545275801;
      CHECK(out[n] == doctest::Approx(exact).epsilon(1e-13));
    }
  }
  SUBCASE("linear input") {
    const GridFunction out =
        gfd::weighted_convolve(M, GridFunction::sampled(grid, [](double t) { return t; }));
    // (M * s)(t) = t^{3/2} / Gamma(5/2)
    for (std::size_t n = 1; n < grid.node_count(); n += 31) {
      const double exact = std::pow(grid.time(n), 1.5) / 1.329340388179137;
      CHECK(out[n] == doctest::Approx(exact).epsilon(1e-12));
    }
  }
}

TEST_CASE("second-kind solve reproduces the Mittag-Leffler relaxation") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 256);
  const double alpha = 0.5, lambda = 1.0;
  const auto sol = gfd::solve_second_kind(MemoryKernel::power_law(1.0, alpha), lambda,
                                          GridFunction::constant(grid, 1.0));
  double worst = 0.0;
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const double exact = gfd::mittag_leffler(alpha, -lambda * std::pow(grid.time(n), alpha));
    worst = std::max(worst, std::abs(sol.values[n] - exact));
  }
  CHECK(worst <= 2e-4);
  CHECK(sol.defining_residual <= 1e-10);
}

TEST_CASE("graded mesh beats the plain uniform march near the singularity") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 512);
  const double alpha = 0.3, lambda = 10.0;
  const MemoryKernel M = MemoryKernel::power_law(1.0, alpha);
  const GridFunction g = GridFunction::constant(grid, 1.0);

  const auto refined = gfd::solve_second_kind(M, lambda, g);
  const auto uniform = gfd::solve_second_kind(M, lambda, g, {.refine = false});

  double err_refined = 0.0, err_uniform = 0.0;
  for (std::size_t n = 0; n < grid.node_count(); ++n) {
    const double exact = gfd::mittag_leffler(alpha, -lambda * std::pow(grid.time(n), alpha));
    err_refined = std::max(err_refined, std::abs(refined.values[n] - exact));
    err_uniform = std::max(err_uniform, std::abs(uniform.values[n] - exact));
  }
  CHECK(err_refined <= 1e-4);
  CHECK(err_uniform > 50.0 * err_refined);  // the layer defeats the plain march

  // Away from the initial layer the plain march is accurate too.
  double err_uniform_late = 0.0;
  for (std::size_t n = 64; n < grid.node_count(); ++n) {
    const double exact = gfd::mittag_leffler(alpha, -lambda * std::pow(grid.time(n), alpha));
    err_uniform_late = std::max(err_uniform_late, std::abs(uniform.values[n] - exact));
  }
  CHECK(err_uniform_late <= 5e-3);
}

TEST_CASE("heat limit: constant kernel relaxes exponentially") {
  const TimeGrid grid = TimeGrid::uniform(2.0, 256);
  const TimeGrid table = TimeGrid::uniform(2.0, 8);
  const MemoryKernel M =
      MemoryKernel::tabulated(table, std::vector<double>(table.node_count(), 1.0));
  for (double lambda : {1.0, 4.0}) {
    const auto sol = gfd::solve_second_kind(M, lambda, GridFunction::constant(grid, 1.0));
    for (std::size_t n = 0; n < grid.node_count(); n += 13)
      CHECK(sol.values[n] == doctest::Approx(std::exp(-lambda * grid.time(n))).epsilon(5e-5));
  }
}

TEST_CASE("causality: the solution vanishes before the source starts") {
  const TimeGrid grid = TimeGrid::uniform(2.0, 128);
  GridFunction g = GridFunction::zeros(grid);
  const std::size_t jump = 64;
  for (std::size_t n = jump; n < grid.node_count(); ++n) g[n] = 1.0;  // g = 1*f with f impulsive
  const auto sol =
      gfd::solve_second_kind(MemoryKernel::power_law(1.0, 0.5), 2.0, g);
  for (std::size_t n = 0; n < jump; ++n) CHECK(sol.values[n] == 0.0);
  CHECK(std::abs(sol.values[jump]) > 0.0);
}

TEST_CASE("relaxation bounds: positive, bounded by one, non-increasing") {
  const TimeGrid grid = TimeGrid::uniform(3.0, 384);
  const auto sol = gfd::solve_second_kind(MemoryKernel::power_law(1.0, 0.5), 5.0,
                                          GridFunction::constant(grid, 1.0));
  for (std::size_t n = 1; n < grid.node_count(); ++n) {
    CHECK(sol.values[n] > 0.0);
    CHECK(sol.values[n] <= 1.0);
    CHECK(sol.values[n] <= sol.values[n - 1] + 1e-12);
  }
}

TEST_CASE("deconvolution consistency: smooth tabulated kernel") {
  const TimeGrid grid = TimeGrid::uniform(2.0, 1024);
  const MemoryKernel M = exp_table_kernel(grid);
  const double lambda = 3.0;
  // Plain march: the deconvolution inverts exactly this quadrature, so the
  // round trip isolates the deconvolution error itself.
  const auto sol =
      gfd::solve_second_kind(M, lambda, GridFunction::constant(grid, 1.0), {.refine = false});

  // v + lambda (M*v) = 1  =>  (v * M) = (1 - v)/lambda.
  GridFunction w{grid, sol.values};
  GridFunction r = GridFunction::zeros(grid);
  for (std::size_t n = 0; n < grid.node_count(); ++n) r[n] = (1.0 - w[n]) / lambda;

  const auto rec = gfd::deconvolve_first_kind(w, r, 0.0);
  const GridFunction truth = exp_table_kernel_samples(grid);
  double worst = 0.0;
  for (std::size_t n = rec.unreliable_prefix; n < grid.node_count(); ++n)
    worst = std::max(worst, std::abs(rec.values[n] - truth[n]));
  CHECK(worst <= 1e-6);
}

TEST_CASE("deconvolution consistency: singular power-law kernel") {
  const TimeGrid grid = TimeGrid::uniform(2.0, 512);
  const double alpha = 0.5, lambda = 1.0;
  const MemoryKernel M = MemoryKernel::power_law(1.0, alpha);
  const auto sol = gfd::solve_second_kind(M, lambda, GridFunction::constant(grid, 1.0));
  const GridFunction w{grid, sol.values};

  const double h = grid.step();
  const double gamma_a1 = std::tgamma(alpha + 1.0);
  std::vector<double> means(grid.cell_count());
  for (std::size_t j = 0; j < means.size(); ++j)
    means[j] = (std::pow(grid.time(j + 1), alpha) - std::pow(grid.time(j), alpha)) /
               (gamma_a1 * h);

  SUBCASE("model-consistent data: node reconstruction near the singularity") {
    // r carries the deconvolution's own convolution model applied to the
    // exact cell means, so the remaining node error is pure reconstruction.
    GridFunction r = GridFunction::zeros(grid);
    for (std::size_t n = 1; n < grid.node_count(); ++n) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        acc += means[j] * 0.5 * h * (w[n - j] + w[n - j - 1]);
      r[n] = acc;
    }
    const auto rec = gfd::deconvolve_first_kind(w, r, 0.0);
    double worst_mean = 0.0, worst_node = 0.0;
    for (std::size_t j = rec.unreliable_prefix; j < means.size(); ++j)
      worst_mean = std::max(worst_mean, std::abs(rec.cell_means[j] - means[j]) / means[j]);
    for (std::size_t n = rec.unreliable_prefix; n < grid.node_count(); ++n)
      worst_node =
          std::max(worst_node, std::abs(rec.values[n] - M(grid.time(n))) / M(grid.time(n)));
    CHECK(worst_mean <= 1e-10);
    CHECK(worst_node <= 5e-5);
  }

  SUBCASE("solver data: quadrature model error stays bounded") {
    GridFunction r = GridFunction::zeros(grid);
    for (std::size_t n = 0; n < grid.node_count(); ++n) r[n] = (1.0 - w[n]) / lambda;
    const auto rec = gfd::deconvolve_first_kind(w, r, 0.0);
    double worst = 0.0;
    for (std::size_t n = rec.unreliable_prefix; n < grid.node_count(); ++n)
      worst = std::max(worst, std::abs(rec.values[n] - M(grid.time(n))) / M(grid.time(n)));
    CHECK(worst <= 2e-2);
  }
}

TEST_CASE("discrepancy principle survives noise") {
  const TimeGrid grid = TimeGrid::uniform(2.0, 512);
  const MemoryKernel M = exp_table_kernel(grid);
  const auto sol = gfd::solve_second_kind(M, 2.0, GridFunction::constant(grid, 1.0));

  GridFunction w{grid, sol.values};
  GridFunction r = GridFunction::zeros(grid);
  for (std::size_t n = 0; n < grid.node_count(); ++n) r[n] = (1.0 - w[n]) / 2.0;
  // Deterministic synthetic perturbation at the 1e-6 scale.
  const double noise = 1e-6;
  for (std::size_t n = 0; n < grid.node_count(); ++n)
    r[n] += noise * std::sin(12345.6789 * static_cast<double>(n + 1));

  const auto rec = gfd::deconvolve_first_kind_discrepancy(w, r, noise);
  CHECK(rec.epsilon_used > 0.0);
  const GridFunction truth = exp_table_kernel_samples(grid);
  double worst = 0.0;
  for (std::size_t n = rec.unreliable_prefix; n < grid.node_count(); ++n)
    worst = std::max(worst, std::abs(rec.values[n] - truth[n]));
  CHECK(worst <= 1e-2);
}

TEST_CASE("solver and deconvolution preconditions") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 64);
  const TimeGrid other = TimeGrid::uniform(2.0, 64);
  CHECK_THROWS_AS((void)gfd::deconvolve_first_kind(GridFunction::zeros(grid),
                                                   GridFunction::zeros(other), 1e-8),
                  gfd::precondition_error);
  CHECK_THROWS_AS((void)gfd::deconvolve_first_kind(GridFunction::zeros(grid),
                                                   GridFunction::zeros(grid), 1e-8),
                  gfd::precondition_error);
}

TEST_CASE("refined mesh structure") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 512);
  const auto mesh = gfd::detail::refine_grid(grid);
  REQUIRE(mesh.uniform_pos.size() == grid.node_count());
  CHECK(mesh.nodes.front() == 0.0);
  CHECK(mesh.nodes.back() == doctest::Approx(1.0));
  for (std::size_t j = 0; j < mesh.uniform_pos.size(); ++j)
    CHECK(mesh.nodes[mesh.uniform_pos[j]] == doctest::Approx(grid.time(j)).epsilon(1e-14));
  for (std::size_t i = 1; i < mesh.nodes.size(); ++i) CHECK(mesh.nodes[i] > mesh.nodes[i - 1]);
  CHECK(mesh.nodes.size() > grid.node_count());  // grading added nodes
}
