#include "gfd/volterra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <utility>

#include "gfd/errors.hpp"

namespace gfd {
namespace detail {

namespace {

// Graded nodes within 1% of a uniform node are dropped; the uniform node
// carries the sample and keeping both would create a degenerate cell.
constexpr double kMergeFraction = 0.01;
// Grading stops once its local spacing effectively reaches the uniform step.
constexpr double kSpacingFraction = 0.999;
// Row caching threshold: below this node count the full lower-triangular
// coefficient table fits comfortably in memory and is reused across modes.
constexpr std::size_t kRowCacheLimit = 2400;

}  // namespace

RefinedMesh refine_grid(const TimeGrid& grid) {
  const double T = grid.horizon();
  const double h = grid.step();
  const std::size_t N = grid.cell_count();

  std::vector<double> graded;
  double prev = 0.0;
  for (std::size_t q = 1; q <= N; ++q) {
    const double frac = static_cast<double>(q) / static_cast<double>(N);
    const double s = T * frac * frac * frac;
    if (s - prev >= kSpacingFraction * h) break;
    const double nearest = std::round(s / h) * h;
    // Merge graded nodes that nearly coincide with a positive uniform node;
    // below the first uniform node every graded point is kept, since that is
    // the layer the grading exists to resolve.
    if (nearest == 0.0 || std::abs(s - nearest) > kMergeFraction * h) graded.push_back(s);
    prev = s;
  }

  RefinedMesh mesh;
  mesh.nodes.reserve(N + 1 + graded.size());
  mesh.uniform_pos.resize(N + 1);
  std::size_t gi = 0;
  for (std::size_t j = 0; j <= N; ++j) {
    const double t = grid.time(j);
    while (gi < graded.size() && graded[gi] < t) mesh.nodes.push_back(graded[gi++]);
    mesh.uniform_pos[j] = mesh.nodes.size();
    mesh.nodes.push_back(t);
  }
  return mesh;
}

RefinedMesh plain_grid(const TimeGrid& grid) {
  RefinedMesh mesh;
  const std::size_t N = grid.cell_count();
  mesh.nodes.resize(N + 1);
  mesh.uniform_pos.resize(N + 1);
  for (std::size_t j = 0; j <= N; ++j) {
    mesh.nodes[j] = grid.time(j);
    mesh.uniform_pos[j] = j;
  }
  return mesh;
}

DiscretizedKernel::DiscretizedKernel(const MemoryKernel& M, RefinedMesh mesh)
    : M_(M), mesh_(std::move(mesh)), cached_(mesh_.nodes.size() <= kRowCacheLimit) {
  if (mesh_.nodes.size() < 2) throw precondition_error("discretized kernel: mesh needs at least two nodes");
  if (cached_) {
    const std::size_t n_last = last_row();
    rows_.resize(n_last + 1);
    for (std::size_t n = 1; n <= n_last; ++n) {
      rows_[n].resize(n + 1);
      build_row(n, rows_[n].data());
    }
  }
}

const double* DiscretizedKernel::row(std::size_t n, std::vector<double>& scratch) const {
  if (n == 0 || n > last_row()) throw precondition_error("discretized kernel: row index out of range");
  if (cached_) return rows_[n].data();
  scratch.assign(n + 1, 0.0);
  build_row(n, scratch.data());
  return scratch.data();
}

void DiscretizedKernel::build_row(std::size_t n, double* out) const {
  const double t = mesh_.nodes[n];
  std::fill(out, out + n + 1, 0.0);
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = t - mesh_.nodes[j + 1];
    const double b = t - mesh_.nodes[j];
    const double dt = mesh_.nodes[j + 1] - mesh_.nodes[j];
    M_.cell_moments(a, b, m0, m1);
    out[j] += (m1 - a * m0) / dt;
    out[j + 1] += (b * m0 - m1) / dt;
  }
}

}  // namespace detail

namespace {

/// Lag tables for uniform-grid product integration: the coefficient of
/// g_{n-1-L} is A[L] and of g_{n-L} is B[L] in (M * g)(t_n).
void uniform_lag_tables(const MemoryKernel& M, const TimeGrid& grid, std::vector<double>& A,
                        std::vector<double>& B) {
  const std::size_t N = grid.cell_count();
  const double h = grid.step();
  A.resize(N);
  B.resize(N);
  double m0 = 0.0;
  double m1 = 0.0;
  for (std::size_t L = 0; L < N; ++L) {
    const double a = grid.time(L);
    const double b = grid.time(L + 1);
    M.cell_moments(a, b, m0, m1);
    A[L] = (m1 - a * m0) / h;
    B[L] = (b * m0 - m1) / h;
  }
}

void check_lambda(double lambda) {
  if (!std::isfinite(lambda) || lambda < 0.0)
    throw precondition_error("solve_second_kind: lambda must be finite and nonnegative");
}

[[noreturn]] void throw_step_size(double lambda, double diag) {
  std::ostringstream msg;
  msg << "solve_second_kind: 1 + lambda * w_nn = " << (1.0 + lambda * diag)
      << " is not positive (lambda = " << lambda << "); refine the time step";
  throw ill_conditioning_error(msg.str());
}

ModeTrajectory march_refined(const detail::DiscretizedKernel& dk, double lambda,
                             const GridFunction& g) {
  const detail::RefinedMesh& mesh = dk.mesh();
  const TimeGrid& grid = g.grid;
  const double h = grid.step();
  const std::size_t n_last = dk.last_row();

  std::vector<double> g_mesh(mesh.nodes.size());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    const double s = mesh.nodes[i];
    const std::size_t j = std::min(grid.cell_count() - 1, static_cast<std::size_t>(s / h));
    const double theta = (s - grid.time(j)) / h;
    g_mesh[i] = g.values[j] * (1.0 - theta) + g.values[j + 1] * theta;
  }
  for (std::size_t j = 0; j <= grid.cell_count(); ++j) g_mesh[mesh.uniform_pos[j]] = g.values[j];

  std::vector<double> v(mesh.nodes.size());
  std::vector<double> scratch;
  v[0] = g_mesh[0];
  double residual = 0.0;
  for (std::size_t n = 1; n <= n_last; ++n) {
    const double* c = dk.row(n, scratch);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += c[j] * v[j];
    const double denom = 1.0 + lambda * c[n];
    if (!(denom > 0.0)) throw_step_size(lambda, c[n]);
    v[n] = (g_mesh[n] - lambda * acc) / denom;
    residual = std::max(residual, std::abs(v[n] + lambda * (acc + c[n] * v[n]) - g_mesh[n]));
  }

  ModeTrajectory out{grid, std::vector<double>(grid.node_count()), residual};
  for (std::size_t j = 0; j < grid.node_count(); ++j) out.values[j] = v[mesh.uniform_pos[j]];
  return out;
}

ModeTrajectory march_uniform(const MemoryKernel& M, double lambda, const GridFunction& g) {
  const TimeGrid& grid = g.grid;
  const std::size_t N = grid.cell_count();
  std::vector<double> A;
  std::vector<double> B;
  uniform_lag_tables(M, grid, A, B);

  const double denom = 1.0 + lambda * B[0];
  if (!(denom > 0.0)) throw_step_size(lambda, B[0]);

  ModeTrajectory out{grid, std::vector<double>(N + 1), 0.0};
  std::vector<double>& v = out.values;
  v[0] = g.values[0];
  double residual = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    double acc = A[0] * v[n - 1];
    for (std::size_t L = 1; L < n; ++L) acc += A[L] * v[n - 1 - L] + B[L] * v[n - L];
    v[n] = (g.values[n] - lambda * acc) / denom;
    residual = std::max(residual, std::abs(v[n] + lambda * (acc + B[0] * v[n]) - g.values[n]));
  }
  out.defining_residual = residual;
  return out;
}

}  // namespace

GridFunction weighted_convolve(const MemoryKernel& M, const GridFunction& g) {
  const TimeGrid& grid = g.grid;
  const std::size_t N = grid.cell_count();
  std::vector<double> A;
  std::vector<double> B;
  uniform_lag_tables(M, grid, A, B);

  GridFunction out = GridFunction::zeros(grid);
  for (std::size_t n = 1; n <= N; ++n) {
    double acc = 0.0;
    for (std::size_t L = 0; L < n; ++L) acc += A[L] * g.values[n - 1 - L] + B[L] * g.values[n - L];
    out.values[n] = acc;
  }
  return out;
}

ModeTrajectory solve_second_kind(const MemoryKernel& M, double lambda, const GridFunction& g,
                                 const SolveOptions& options) {
  check_lambda(lambda);
  if (!options.refine) return march_uniform(M, lambda, g);
  detail::DiscretizedKernel dk(M, detail::refine_grid(g.grid));
  return march_refined(dk, lambda, g);
}

namespace detail {

ModeTrajectory solve_with(const DiscretizedKernel& dk, double lambda, const GridFunction& g) {
  check_lambda(lambda);
  if (dk.mesh().uniform_pos.size() != g.grid.node_count())
    throw precondition_error("solve_with: discretization mesh does not match the data grid");
  return march_refined(dk, lambda, g);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// First-kind deconvolution
// ---------------------------------------------------------------------------

namespace {

/// Trapezoid cell weights of the first-kind operator: row i, cell j carries
/// weight W[i-j] with W[L] = h (w_L + w_{L+1}) / 2.
std::vector<double> midpoint_weights(const GridFunction& w) {
  const std::size_t N = w.grid.cell_count();
  const double h = w.grid.step();
  std::vector<double> W(N);
  for (std::size_t L = 0; L < N; ++L) W[L] = 0.5 * h * (w.values[L] + w.values[L + 1]);
  return W;
}

/// Forward substitution of (eps I + W) m = r for the cell means m.  Returns
/// the squared data residual ||W m - r||_2^2 (without the eps term) when
/// want_residual is set, 0 otherwise.
double march_cell_means(const std::vector<double>& W, const std::vector<double>& r, double eps,
                        std::vector<double>& cm, bool want_residual) {
  const std::size_t N = W.size();
  const double denom = eps + W[0];
  if (!(std::abs(denom) > 1e4 * std::numeric_limits<double>::min()))
    throw ill_conditioning_error(
        "deconvolve_first_kind: regularized diagonal eps + W_00 is below the machine guard; "
        "increase eps or refine the grid");

  cm.assign(N, 0.0);
  for (std::size_t i = 1; i <= N; ++i) {
    double acc = 0.0;
    for (std::size_t L = 1; L < i; ++L) acc += W[L] * cm[i - 1 - L];
    cm[i - 1] = (r[i] - acc) / denom;
  }
  if (!want_residual) return 0.0;
  double res2 = 0.0;
  for (std::size_t i = 1; i <= N; ++i) {
    double acc = 0.0;
    for (std::size_t L = 0; L < i; ++L) acc += W[L] * cm[i - 1 - L];
    const double d = r[i] - acc;
    res2 += d * d;
  }
  return res2;
}

struct PowerFit {
  double a = 0.0;
  double b = 1.0;
};

/// Fits a t^{b-1} so its cell means over (t0,t1) and (t1,t2) match m1 and m2.
std::optional<PowerFit> fit_power_cells(double t0, double t1, double t2, double m1, double m2) {
  if (!(m1 * m2 > 0.0)) return std::nullopt;
  const double target = m2 / m1;

  const auto ratio = [&](double b) {
    if (std::abs(b) < 1e-12 && t0 > 0.0)
      return (std::log(t2) - std::log(t1)) / (std::log(t1) - std::log(t0));
    return (std::pow(t2, b) - std::pow(t1, b)) / (std::pow(t1, b) - std::pow(t0, b));
  };

  double lo = t0 == 0.0 ? 1e-9 : -4.0;
  double hi = 4.0;
  if (!(ratio(lo) < target && target < ratio(hi))) return std::nullopt;
  for (int iter = 0; iter < 100 && hi - lo > 1e-13; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (ratio(mid) < target ? lo : hi) = mid;
  }

  PowerFit fit;
  fit.b = 0.5 * (lo + hi);
  if (std::abs(fit.b) < 1e-9 && t0 > 0.0)
    fit.a = m1 * (t1 - t0) / std::log(t1 / t0);
  else
    fit.a = m1 * fit.b * (t1 - t0) / (std::pow(t1, fit.b) - std::pow(t0, fit.b));
  if (!std::isfinite(fit.a)) return std::nullopt;
  return fit;
}

double power_cell_mean(const PowerFit& fit, double u0, double u1) {
  if (std::abs(fit.b) < 1e-9 && u0 > 0.0)
    return fit.a * std::log(u1 / u0) / (u1 - u0);
  return fit.a * (std::pow(u1, fit.b) - std::pow(u0, fit.b)) / (fit.b * (u1 - u0));
}

/// Node samples from cell means: at each node, a power-law reconstruction
/// (exact for t^{b-1} kernels) and a linear one (exact for smooth kernels)
/// are blended by squared local fit indicators, so whichever model explains
/// the neighbouring cell better dominates.
std::vector<double> reconstruct_nodes(const TimeGrid& grid, const std::vector<double>& cm) {
  const std::size_t N = cm.size();
  std::vector<double> values(N + 1);
  values[0] = cm[0];

  for (std::size_t j = 1; j <= N; ++j) {
    const bool end = j == N;
    const std::size_t i1 = end ? N - 2 : j - 1;  // lower fitted cell
    const std::size_t i2 = i1 + 1;               // upper fitted cell
    const double t0 = grid.time(i1);
    const double t1 = grid.time(i1 + 1);
    const double t2 = grid.time(i2 + 1);
    const double m1 = cm[i1];
    const double m2 = cm[i2];
    const double v_lin = end ? 1.5 * m2 - 0.5 * m1 : 0.5 * (m1 + m2);

    const std::optional<PowerFit> fit = fit_power_cells(t0, t1, t2, m1, m2);
    if (!fit) {
      values[j] = v_lin;
      continue;
    }
    const double v_pow = fit->a * std::pow(grid.time(j), fit->b - 1.0);
    if (i1 == 0) {
      values[j] = v_pow;  // no third cell to judge the models against
      continue;
    }
    const std::size_t i0 = i1 - 1;
    const double pred = power_cell_mean(*fit, grid.time(i0), t0);
    const double e_pow = (pred - cm[i0]) * (pred - cm[i0]);
    const double e_lin =
        (2.0 * m1 - m2 - cm[i0]) * (2.0 * m1 - m2 - cm[i0]);
    if (!std::isfinite(e_pow) || !std::isfinite(v_pow)) {
      values[j] = v_lin;
      continue;
    }
    const double denom = e_pow + e_lin;
    values[j] = denom < std::numeric_limits<double>::min()
                    ? 0.5 * (v_pow + v_lin)
                    : (e_lin * v_pow + e_pow * v_lin) / denom;
  }
  return values;
}

void check_deconvolve_inputs(const GridFunction& w, const GridFunction& r) {
  if (!(w.grid == r.grid))
    throw precondition_error("deconvolve_first_kind: w and r must share one grid");
  double max_abs = 0.0;
  for (double x : w.values) max_abs = std::max(max_abs, std::abs(x));
  if (max_abs == 0.0)
    throw precondition_error(
        "deconvolve_first_kind: w vanishes identically on the window, so the convolution "
        "equation carries no information about the kernel");
}

DeconvolutionResult assemble_result(const GridFunction& w, double eps, std::vector<double> cm) {
  DeconvolutionResult out{GridFunction{w.grid, reconstruct_nodes(w.grid, cm)}, std::move(cm), 3,
                          eps};
  return out;
}

}  // namespace

DeconvolutionResult deconvolve_first_kind(const GridFunction& w, const GridFunction& r,
                                          double eps) {
  check_deconvolve_inputs(w, r);
  if (!(eps >= 0.0) || !std::isfinite(eps))
    throw precondition_error("deconvolve_first_kind: eps must be finite and nonnegative");
  const std::vector<double> W = midpoint_weights(w);
  std::vector<double> cm;
  march_cell_means(W, r.values, eps, cm, false);
  return assemble_result(w, eps, std::move(cm));
}

DeconvolutionResult deconvolve_first_kind_discrepancy(const GridFunction& w,
                                                      const GridFunction& r, double noise_std) {
  check_deconvolve_inputs(w, r);
  const std::size_t N = r.grid.cell_count();

  if (noise_std < 0.0) {
    // Second differences of smooth data are O(h^2); on noisy data they are
    // dominated by noise with variance 6 sigma^2 per sample.
    const std::size_t start = std::max<std::size_t>(1, (3 * N) / 4);
    double sum2 = 0.0;
    std::size_t count = 0;
    for (std::size_t i = start; i + 1 <= N && i >= 1; ++i) {
      const double d = r.values[i + 1] - 2.0 * r.values[i] + r.values[i - 1];
      sum2 += d * d;
      ++count;
    }
    noise_std = count > 0 ? std::sqrt(sum2 / static_cast<double>(count) / 6.0) : 0.0;
  }

  const std::vector<double> W = midpoint_weights(w);
  const double target = noise_std * std::sqrt(static_cast<double>(N));
  std::vector<double> cm;

  const auto residual = [&](double eps) {
    return std::sqrt(march_cell_means(W, r.values, eps, cm, true));
  };

  double lo = 1e-14;
  double hi = 1.0;
  double eps = lo;
  if (residual(lo) < target) {
    if (residual(hi) <= target) {
      eps = hi;
    } else {
      double log_lo = std::log(lo);
      double log_hi = std::log(hi);
      for (int iter = 0; iter < 60; ++iter) {
        const double log_mid = 0.5 * (log_lo + log_hi);
        (residual(std::exp(log_mid)) < target ? log_lo : log_hi) = log_mid;
      }
      eps = std::exp(0.5 * (log_lo + log_hi));
    }
  }
  march_cell_means(W, r.values, eps, cm, false);
  return assemble_result(w, eps, std::move(cm));
}

}  // namespace gfd
