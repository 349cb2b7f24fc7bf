// Acceptance battery: one line per criterion, nonzero exit on any failure.
//
// Each criterion exercises an end-to-end contract of the library at a fixed
// tolerance; the bounds are part of the interface and must not be loosened
// to accommodate regressions.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gfd/forward.hpp"
#include "gfd/inverse.hpp"
#include "gfd/kernels.hpp"
#include "gfd/laplace.hpp"
#include "gfd/measure.hpp"
#include "gfd/operators.hpp"
#include "gfd/volterra.hpp"

namespace {

constexpr double kPi = 3.14159265358979324;

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  double metric = 0.0;
  double limit = 0.0;
  std::string note;
};

int g_failures = 0;

void run(const char* name, const std::function<Outcome()>& body) {
  const auto start = Clock::now();
  Outcome outcome;
  std::string error;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    error = e.what();
  }
  const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (!error.empty()) {
    std::printf("[FAIL] %-34s exception: %s (%.2fs)\n", name, error.c_str(), seconds);
    ++g_failures;
    return;
  }
  std::printf("[%s] %-34s %s=%.3e (limit %.1e)%s (%.2fs)\n", outcome.pass ? "PASS" : "FAIL",
              name, outcome.note.empty() ? "metric" : outcome.note.c_str(), outcome.metric,
              outcome.limit, outcome.pass ? "" : "  ***", seconds);
  if (!outcome.pass) ++g_failures;
}

/// Deterministic splitmix64 Gaussian stream for the noisy round trips.
struct NoiseStream {
  std::uint64_t state;
  explicit NoiseStream(std::uint64_t seed) : state(seed + 0x9e3779b97f4a7c15ull) {}
  double uniform() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return (static_cast<double>(z >> 11) + 0.5) * 0x1p-53;
  }
  double normal() {
    const double u1 = uniform(), u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
};

gfd::SourceModel block_source(const gfd::TimeGrid& grid, std::size_t K) {
  gfd::SourceBlock block;
  block.start_index = grid.gap_end_index();
  block.profile.assign(grid.cell_count() / 10, 1.0);
  block.mode_vector.assign(K, 1.0);
  return gfd::make_partitioned_source({block}, grid);
}

std::vector<std::vector<double>> mode_rows(const gfd::SimulationResult& result) {
  std::vector<std::vector<double>> rows;
  rows.reserve(result.modes.size());
  for (const auto& mode : result.modes) rows.push_back(mode.values);
  return rows;
}

// --- Criteria -------------------------------------------------------------

Outcome forward_vs_mittag_leffler() {
  const gfd::TimeGrid grid = gfd::TimeGrid::uniform(1.0, 512);
  const gfd::GridFunction one = gfd::GridFunction::constant(grid, 1.0);
  double worst = 0.0, slowest = 0.0;
  for (double alpha : {0.3, 0.5, 0.8})
    for (double lambda : {1.0, 10.0}) {
      const auto t0 = Clock::now();
      const auto traj =
          gfd::solve_second_kind(gfd::MemoryKernel::power_law(1.0, alpha), lambda, one);
      slowest = std::max(slowest,
                         std::chrono::duration<double>(Clock::now() - t0).count());
      for (std::size_t n = 0; n < grid.node_count(); ++n) {
        const double ref =
            gfd::mittag_leffler(alpha, -lambda * std::pow(grid.time(n), alpha));
        worst = std::max(worst, std::abs(traj.values[n] - ref));
      }
    }
  return {worst <= 1e-4 && slowest < 1.0, worst, 1e-4, "max_abs_err"};
}

Outcome laplace_consistency() {
  double worst = 0.0;
  for (double alpha : {0.3, 0.5, 0.8, 0.95})
    for (double lambda : {1.0, 3.0})
      for (double t : {0.4, 1.0}) {
        const gfd::MemoryKernel M = gfd::MemoryKernel::power_law(1.0, alpha);
        const double via_contour = gfd::contour_invert(
            [&](std::complex<double> s) { return gfd::relaxation_hat(M, lambda, s); }, t);
        const double via_series =
            gfd::mittag_leffler(alpha, -lambda * std::pow(t, alpha));
        worst = std::max(worst, std::abs(via_contour - via_series));
      }
  return {worst <= 1e-5, worst, 1e-5, "max_abs_err"};
}

Outcome sonine_partner_residual() {
  const gfd::TimeGrid grid = gfd::TimeGrid::uniform(2.0, 512);
  std::vector<gfd::MemoryKernel> kernels;
  for (double alpha : {0.3, 0.5, 0.7})
    kernels.push_back(gfd::MemoryKernel::power_law(1.0, alpha));
  kernels.push_back(gfd::MemoryKernel::tempered(1.0, 0.5, 1.0));
  double worst = 0.0;
  for (const auto& M : kernels)
    worst = std::max(worst, gfd::sonine_partner(M, grid).residual_max);
  return {worst <= 1e-6, worst, 1e-6, "max_residual"};
}

Outcome heat_limit() {
  const gfd::TimeGrid grid = gfd::TimeGrid::uniform(2.0, 512);
  const gfd::TimeGrid table = gfd::TimeGrid::uniform(2.0, 8);
  const gfd::MemoryKernel M =
      gfd::MemoryKernel::tabulated(table, std::vector<double>(table.node_count(), 1.0));
  const auto spectrum = gfd::distributed_eigenvalues(
      gfd::dirichlet_eigenpairs(kPi, 0.0, 4), gfd::DistributedMeasure::atoms({{1.0, 1.0}}));
  const auto sim = gfd::simulate(spectrum, M, std::vector<double>(4, 1.0),
                                 gfd::SourceModel::zero(grid, 4), grid);
  double worst = 0.0;
  for (int k = 0; k < 4; ++k)
    for (std::size_t n = 0; n < grid.node_count(); ++n) {
      const double ref = std::exp(-spectrum.eigenvalues[k] * grid.time(n));
      worst = std::max(worst, std::abs(sim.modes[k].values[n] - ref));
    }
  return {worst <= 1e-4, worst, 1e-4, "max_abs_err"};
}

Outcome kernel_round_trip() {
  const gfd::TimeGrid grid = gfd::TimeGrid::with_window(2.0, 512, 128, 179);
  const int K = 8;
  const auto spectrum = gfd::distributed_eigenvalues(
      gfd::dirichlet_eigenpairs(kPi, 0.0, K), gfd::DistributedMeasure::atoms({{0.5, 1.0}}));
  const gfd::MemoryKernel M = gfd::MemoryKernel::tempered(1.0, 0.4, 1.0);
  const gfd::SourceModel f = block_source(grid, K);
  const auto sim = gfd::simulate(spectrum, M, std::vector<double>(K, 0.0), f, grid);
  auto rows = mode_rows(sim);

  const auto truth_error = [&](const gfd::KernelRecovery& rec) {
    std::vector<double> truth(rec.kernel.size());
    for (std::size_t n = 0; n < truth.size(); ++n)
      truth[n] = M(std::max(rec.kernel.grid.time(n), 0.5 * rec.kernel.grid.step()));
    return gfd::relative_l2(rec.kernel.values, truth, rec.unreliable_prefix, truth.size());
  };

  const gfd::ObservationWindow clean{grid, rows, {}, f, {}, {}};
  const double clean_err = truth_error(gfd::recover_kernel(clean, spectrum.eigenvalues));

  NoiseStream noise(20260814);
  for (auto& row : rows) {
    double peak = 0.0;
    for (double v : row) peak = std::max(peak, std::abs(v));
    for (double& v : row) v += 1e-4 * peak * noise.normal();
  }
  gfd::RegularizationConfig reg;
  reg.discrepancy = true;
  const gfd::ObservationWindow noisy{grid, rows, {}, f, {}, {}};
  const double noisy_err =
      truth_error(gfd::recover_kernel(noisy, spectrum.eigenvalues, reg));

  const bool pass = clean_err <= 1e-2 && noisy_err <= 5e-2;
  std::printf("       clean rel_l2=%.3e (limit 1.0e-02), noisy rel_l2=%.3e (limit 5.0e-02)\n",
              clean_err, noisy_err);
  return {pass, std::max(clean_err / 1e-2, noisy_err / 5e-2), 1.0, "worst_margin"};
}

Outcome product_gauge_invariance() {
  const gfd::TimeGrid grid = gfd::TimeGrid::with_window(2.0, 512, 128, 179);
  const int K = 8;
  const gfd::SourceModel f = block_source(grid, K);

  std::vector<gfd::ProductRecovery> recs;
  std::vector<double> truth_defect;
  for (double sigma : {0.5, 2.0}) {
    const auto spectrum = gfd::distributed_eigenvalues(
        gfd::dirichlet_eigenpairs(kPi, 0.0, K),
        gfd::DistributedMeasure::atoms({{0.5, 1.0 / sigma}}));
    const gfd::MemoryKernel M = gfd::MemoryKernel::tempered(sigma, 0.4, 1.0);
    const auto sim = gfd::simulate(spectrum, M, std::vector<double>(K, 0.0), f, grid);
    const gfd::ObservationWindow window{grid, mode_rows(sim), {}, f, {}, {}};
    recs.push_back(gfd::recover_product(window));
    const auto& rec = recs.back();
    const double gauge_value = M(rec.gauge_time);
    for (int k = 0; k < K; ++k)
      truth_defect.push_back(
          std::abs(rec.eigenvalues[k] / (spectrum.eigenvalues[k] * gauge_value) - 1.0));
  }

  // The two runs are gauge-equivalent representations of one (M, A) pair:
  // every recovered invariant must coincide.
  double cross = 0.0;
  for (int k = 0; k < K; ++k) {
    cross = std::max(cross, std::abs(recs[0].eigenvalues[k] / recs[1].eigenvalues[k] - 1.0));
    const auto& pa = recs[0].mode_products[k];
    const auto& pb = recs[1].mode_products[k];
    for (std::size_t n = recs[0].unreliable_prefix; n < pa.size(); ++n)
      if (std::abs(pb[n]) > 1e-12) cross = std::max(cross, std::abs(pa[n] / pb[n] - 1.0));
  }
  const double kernel_cross =
      gfd::relative_l2(recs[0].kernel.values, recs[1].kernel.values,
                       recs[0].unreliable_prefix, recs[0].kernel.size());
  double defect = 0.0;
  for (double d : truth_defect) defect = std::max(defect, d);

  const bool pass = cross <= 1e-6 && kernel_cross <= 1e-6 && defect <= 5e-3;
  std::printf("       cross-gauge defect=%.3e (limit 1.0e-06), truth defect=%.3e (limit 5.0e-03)\n",
              std::max(cross, kernel_cross), defect);
  return {pass, std::max(cross, kernel_cross), 1e-6, "cross_gauge_defect"};
}

Outcome history_round_trip() {
  const gfd::TimeGrid grid = gfd::TimeGrid::with_window(2.0, 512, 128, 179);
  const int K = 4;
  const auto spectrum = gfd::distributed_eigenvalues(
      gfd::dirichlet_eigenpairs(kPi, 0.0, K), gfd::DistributedMeasure::atoms({{1.0, 1.0}}));
  const gfd::MemoryKernel M = gfd::MemoryKernel::power_law(1.0, 0.5);
  const gfd::SourceModel post = block_source(grid, K);

  // Zero-history run: recovered history must vanish.
  const auto quiet = gfd::simulate(spectrum, M, std::vector<double>(K, 0.0), post, grid);
  const gfd::ObservationWindow quiet_window{grid, mode_rows(quiet), {}, post, {}, {}};
  const auto quiet_rec = gfd::recover_history(M, spectrum.eigenvalues, quiet_window);
  double quiet_norm = 0.0;
  for (int k = 0; k < K; ++k) {
    quiet_norm = std::max(quiet_norm, std::abs(quiet_rec.initial_coeffs[k]));
    for (double v : quiet_rec.history[k]) quiet_norm = std::max(quiet_norm, std::abs(v));
  }

  // Smooth-history run: f_k(t) = a_k sin(pi t / t0) on (0, t0) plus the
  // known post-gap block; initial data u0.
  const std::vector<double> a = {1.0, -0.6, 0.4, -0.2};
  const std::vector<double> u0 = {0.3, -0.2, 0.1, -0.05};
  const std::size_t n0 = grid.obs_start_index();
  auto full_rows = post.mode_values;
  for (int k = 0; k < K; ++k)
    for (std::size_t n = 1; n < n0; ++n)
      full_rows[k][n] += a[k] * std::sin(kPi * grid.time(n) / grid.obs_start());
  const auto sim = gfd::simulate(spectrum, M, u0,
                                 gfd::SourceModel::free_form(grid, full_rows), grid);
  const gfd::ObservationWindow window{grid, mode_rows(sim), {}, post, {}, {}};
  const auto rec = gfd::recover_history(M, spectrum.eigenvalues, window);

  double num = 0.0, den = 0.0, u0_err = 0.0;
  for (int k = 0; k < K; ++k) {
    u0_err = std::max(u0_err, std::abs(rec.initial_coeffs[k] - u0[k]));
    for (std::size_t m = 1; m < n0; ++m) {
      const double truth = a[k] * std::sin(kPi * grid.time(m) / grid.obs_start());
      const double diff = rec.history[k][m - 1] - truth;
      num += diff * diff;
      den += truth * truth;
    }
  }
  const double rel = std::sqrt(num / den);
  const bool pass = quiet_norm <= 1e-8 && rel <= 5e-2 && u0_err <= 2e-2;
  std::printf("       zero-history norm=%.3e (limit 1.0e-08), u0 max err=%.3e (limit 2.0e-02)\n",
              quiet_norm, u0_err);
  return {pass, rel, 5e-2, "history_rel_l2"};
}

Outcome functional_recovery() {
  const gfd::TimeGrid grid = gfd::TimeGrid::with_window(2.0, 512, 128, 179);
  const int K = 6;
  const auto spectrum = gfd::distributed_eigenvalues(
      gfd::dirichlet_eigenpairs(kPi, 0.0, K), gfd::DistributedMeasure::atoms({{0.5, 1.0}}));
  const gfd::MemoryKernel M = gfd::MemoryKernel::tempered(1.0, 0.4, 1.0);
  const gfd::SourceModel f = block_source(grid, K);
  const auto sim = gfd::simulate(spectrum, M, std::vector<double>(K, 0.0), f, grid);
  const auto phi = gfd::functional_coefficients(
      spectrum.base, gfd::ObservationFunctional::point_value(0.31337 * kPi));
  const auto trace = gfd::observe(sim, phi);
  const gfd::ObservationWindow window{grid, {}, trace.trace.values, f, {}, {}};

  double worst = 0.0;
  bool converged = true;
  for (int m : {0, 1}) {
    const auto rec = gfd::recover_kernel_from_functional(
        window, phi, spectrum.eigenvalues, gfd::KernelFamily::Tempered, m);
    converged = converged && rec.converged;
    worst = std::max({worst, std::abs(rec.scale - 1.0), std::abs(rec.order / 0.4 - 1.0),
                      std::abs(rec.rate - 1.0)});
  }
  return {converged && worst <= 1e-2, worst, 1e-2, "max_param_rel_err"};
}

Outcome measure_round_trip() {
  const std::vector<gfd::MeasureAtom> truth = {{0.3, 0.6}, {0.7, 0.4}};
  const double eta_true = 0.5;
  std::vector<double> mu(16), lambda(16);
  for (int k = 0; k < 16; ++k) {
    mu[k] = static_cast<double>((k + 1) * (k + 1));
    lambda[k] = 0.0;
    for (const auto& atom : truth)
      lambda[k] += atom.weight * std::pow(mu[k] + eta_true, atom.exponent);
  }
  const auto rec = gfd::recover_distributed_measure(lambda, mu, true, 2);
  if (rec.atoms.size() != truth.size())
    return {false, static_cast<double>(rec.atoms.size()), 2.0, "atom_count"};
  double worst = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    worst = std::max(worst, std::abs(rec.atoms[i].exponent / truth[i].exponent - 1.0));
    worst = std::max(worst, std::abs(rec.atoms[i].weight / truth[i].weight - 1.0));
  }
  const double eta_err = std::abs(rec.eta - eta_true);
  std::printf("       eta err=%.3e (limit 1.0e-06)\n", eta_err);
  return {worst <= 2e-2 && eta_err <= 1e-6, worst, 2e-2, "atom_rel_err"};
}

Outcome order_separation() {
  const gfd::TimeGrid grid = gfd::TimeGrid::with_window(2.0, 512, 128, 179);
  const int K = 4;
  const auto spectrum = gfd::distributed_eigenvalues(
      gfd::dirichlet_eigenpairs(kPi, 0.0, K), gfd::DistributedMeasure::atoms({{1.0, 1.0}}));
  const gfd::SourceModel f = block_source(grid, K);
  const auto phi = gfd::functional_coefficients(
      spectrum.base, gfd::ObservationFunctional::point_value(1.0));

  std::vector<std::vector<double>> traces;
  for (double alpha : {0.4, 0.6}) {
    const auto sim = gfd::simulate(spectrum, gfd::MemoryKernel::power_law(1.0, alpha),
                                   std::vector<double>(K, 0.0), f, grid);
    traces.push_back(gfd::observe(sim, phi).trace.values);
  }
  double separation = 0.0;
  for (std::size_t n = grid.gap_end_index(); n < grid.node_count(); ++n)
    separation = std::max(separation, std::abs(traces[0][n] - traces[1][n]));
  // Distinct orders must be distinguishable from the late-time window alone.
  return {separation >= 1e-3, separation, 1e-3, "trace_separation"};
}

Outcome laplace_envelope() {
  const std::vector<gfd::MemoryKernel> kernels = {
      gfd::MemoryKernel::power_law(1.0, 0.5), gfd::MemoryKernel::tempered(1.0, 0.5, 1.0),
      gfd::MemoryKernel::distributed_order(
          gfd::DistributedMeasure::atoms({{0.3, 0.5}, {0.7, 0.5}}))};
  double max_ratio = 0.0;
  bool monotone = true;
  for (const auto& M : kernels)
    for (double theta : {0.0, kPi / 3.0, 0.9 * kPi}) {
      double previous = 0.0;
      for (int j = 0; j <= 10; ++j) {
        const double radius = std::pow(2.0, j);
        const std::complex<double> s = std::polar(radius, theta);
        const double magnitude = std::abs(M.laplace(s));
        if (j > 0) {
          monotone = monotone && magnitude < previous;
          max_ratio = std::max(max_ratio, magnitude / previous);
        }
        previous = magnitude;
      }
    }
  return {monotone && max_ratio < 1.0, max_ratio, 1.0, "max_step_ratio"};
}

}  // namespace

int main() {
  std::printf("acceptance battery\n");
  run("C01 forward vs Mittag-Leffler", forward_vs_mittag_leffler);
  run("C02 contour/series consistency", laplace_consistency);
  run("C03 Sonine partner residual", sonine_partner_residual);
  run("C04 heat limit M == 1", heat_limit);
  run("C05 kernel round trip", kernel_round_trip);
  run("C06 product gauge invariance", product_gauge_invariance);
  run("C07 history round trip", history_round_trip);
  run("C08 parametric functional fit", functional_recovery);
  run("C09 distributed-order measure", measure_round_trip);
  run("C10 order separation", order_separation);
  run("C11 complete-monotone envelope", laplace_envelope);
  if (g_failures > 0) std::printf("%d criterion(s) FAILED\n", g_failures);
  else std::printf("all criteria passed\n");
  return g_failures;
}
