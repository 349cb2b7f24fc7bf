#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gfd/errors.hpp"
#include "gfd/inverse.hpp"
#include "inverse_detail.hpp"

namespace gfd {

namespace {

// ------------------------------------------------------------- transforms

double logit(double p) { return std::log(p / (1.0 - p)); }
double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct ParamSpace {
  KernelFamily family;
  int dim;  // 2 for power-law, 3 for tempered

  [[nodiscard]] MemoryKernel kernel(const Eigen::VectorXd& theta) const {
    const double c = std::exp(theta(0));
    const double alpha = sigmoid(theta(1));
    if (family == KernelFamily::PowerLaw) return MemoryKernel::power_law(c, alpha);
    return MemoryKernel::tempered(c, alpha, std::exp(theta(2)));
  }
};

// --------------------------------------------------- smoothed differentiation

/// Moving average (width 5) followed by a 4th-order central first
/// derivative; entries within 4 nodes of either end are left meaningless and
/// must be excluded by the caller's valid range.
std::vector<double> derivative_transform(const std::vector<double>& v, double h) {
  const std::size_t n = v.size();
  std::vector<double> s(v);
  for (std::size_t i = 2; i + 2 < n; ++i)
    s[i] = (v[i - 2] + v[i - 1] + v[i] + v[i + 1] + v[i + 2]) / 5.0;
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 2; i + 2 < n; ++i)
    d[i] = (-s[i + 2] + 8.0 * s[i + 1] - 8.0 * s[i - 1] + s[i - 2]) / (12.0 * h);
  return d;
}

// ------------------------------------------------------------- Nelder-Mead

struct SimplexResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  bool converged = false;
  std::size_t evaluations = 0;
};

SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& fn,
                          const Eigen::VectorXd& x0, double step, int max_iter, double tol) {
  const int d = static_cast<int>(x0.size());
  std::vector<Eigen::VectorXd> xs(d + 1, x0);
  std::vector<double> fs(d + 1);
  SimplexResult result;
  for (int i = 1; i <= d; ++i) xs[i](i - 1) += step;
  for (int i = 0; i <= d; ++i) {
    fs[i] = fn(xs[i]);
    ++result.evaluations;
  }

  const auto order = [&] {
    for (int i = 1; i <= d; ++i)
      for (int j = i; j > 0 && fs[j] < fs[j - 1]; --j) {
        std::swap(fs[j], fs[j - 1]);
        std::swap(xs[j], xs[j - 1]);
      }
  };
  order();

  for (int iter = 0; iter < max_iter; ++iter) {
    double diameter = 0.0;
    for (int i = 1; i <= d; ++i) diameter = std::max(diameter, (xs[i] - xs[0]).norm());
    if (diameter < tol) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) centroid += xs[i];
    centroid /= static_cast<double>(d);

    const Eigen::VectorXd xr = centroid + (centroid - xs[d]);
    const double fr = fn(xr);
    ++result.evaluations;
    if (fr < fs[0]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[d]);
      const double fe = fn(xe);
      ++result.evaluations;
      xs[d] = fe < fr ? xe : xr;
      fs[d] = std::min(fe, fr);
    } else if (fr < fs[d - 1]) {
      xs[d] = xr;
      fs[d] = fr;
    } else {
      const Eigen::VectorXd xc = centroid + 0.5 * (xs[d] - centroid);
      const double fc = fn(xc);
      ++result.evaluations;
      if (fc < fs[d]) {
        xs[d] = xc;
        fs[d] = fc;
      } else {
        for (int i = 1; i <= d; ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = fn(xs[i]);
          ++result.evaluations;
        }
      }
    }
    order();
  }
  result.x = xs[0];
  result.value = fs[0];
  return result;
}

}  // namespace

MemoryKernel FunctionalRecovery::make_kernel() const {
  if (family == KernelFamily::PowerLaw) return MemoryKernel::power_law(scale, order);
  if (family == KernelFamily::Tempered) return MemoryKernel::tempered(scale, order, rate);
  throw unsupported_variant_error(
      "FunctionalRecovery::make_kernel: only power-law and tempered fits are produced");
}

FunctionalRecovery recover_kernel_from_functional(const ObservationWindow& window,
                                                  const std::vector<double>& phi_coefficients,
                                                  const std::vector<double>& lambda,
                                                  KernelFamily family, int derivative_order,
                                                  [[maybe_unused]] const RegularizationConfig& reg) {
  if (family != KernelFamily::PowerLaw && family != KernelFamily::Tempered)
    throw unsupported_variant_error(
        "recover_kernel_from_functional: the parametric fit supports the power-law and "
        "tempered families");
  if (derivative_order < 0 || derivative_order > 2)
    throw precondition_error(
        "recover_kernel_from_functional: derivative order must be 0, 1, or 2");
  if (phi_coefficients.size() != lambda.size())
    throw precondition_error(
        "recover_kernel_from_functional: functional coefficients and eigenvalues must pair up");
  if (window.scalar_data.empty())
    throw precondition_error(
        "recover_kernel_from_functional: the window carries no scalar observation trace");

  const ShiftedData shifted = shift_origin(window);
  if (shifted.f.size() != lambda.size())
    throw precondition_error(
        "recover_kernel_from_functional: source mode count must match the eigenvalues");
  const TimeGrid& wg = shifted.window_grid;
  const double h = wg.step();
  const std::size_t Nw = wg.cell_count();

  // Modes the functional can see and the source excites.
  std::vector<std::size_t> active;
  std::vector<GridFunction> g_active;  // 1 * f_k on the window
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    if (std::abs(phi_coefficients[k]) <= 1e-14) continue;
    double fmax = 0.0;
    for (double v : shifted.f[k]) fmax = std::max(fmax, std::abs(v));
    if (fmax == 0.0) continue;
    active.push_back(k);
    g_active.push_back(cumulative_trapezoid(GridFunction{wg, shifted.f[k]}));
  }
  if (active.empty())
    throw precondition_error(
        "recover_kernel_from_functional: the functional annihilates every excited mode "
        "(observability lost)");

  // Data trace, differentiated m times (each pass invalidates 4 edge nodes).
  std::vector<double> data = shifted.scalar_w;
  for (int m = 0; m < derivative_order; ++m) data = derivative_transform(data, h);
  const std::size_t skip_lo = 3 + 4 * static_cast<std::size_t>(derivative_order);
  const std::size_t skip_hi = 4 * static_cast<std::size_t>(derivative_order);
  if (skip_lo + skip_hi + 8 > Nw)
    throw precondition_error("recover_kernel_from_functional: window too short for the fit");

  const ParamSpace space{family, family == KernelFamily::PowerLaw ? 2 : 3};
  std::size_t total_evaluations = 0;

  const auto misfit_with = [&](const MemoryKernel& M, bool refine) {
    std::vector<double> trace(Nw + 1, 0.0);
    const SolveOptions opts{refine};
    try {
      if (refine) {
        const detail::DiscretizedKernel dk(M, detail::refine_grid(wg));
        for (std::size_t a = 0; a < active.size(); ++a) {
          const ModeTrajectory u = detail::solve_with(dk, lambda[active[a]], g_active[a]);
          for (std::size_t n = 0; n <= Nw; ++n)
            trace[n] += phi_coefficients[active[a]] * u.values[n];
        }
      } else {
        for (std::size_t a = 0; a < active.size(); ++a) {
          const ModeTrajectory u = solve_second_kind(M, lambda[active[a]], g_active[a], opts);
          for (std::size_t n = 0; n <= Nw; ++n)
            trace[n] += phi_coefficients[active[a]] * u.values[n];
        }
      }
    } catch (const error&) {
      return std::numeric_limits<double>::infinity();
    }
    for (int m = 0; m < derivative_order; ++m) trace = derivative_transform(trace, h);
    double acc = 0.0;
    for (std::size_t n = skip_lo; n + skip_hi <= Nw; ++n) {
      const double d = trace[n] - data[n];
      acc += d * d;
    }
    return std::isfinite(acc) ? acc : std::numeric_limits<double>::infinity();
  };

  const auto fast_misfit = [&](const Eigen::VectorXd& theta) {
    ++total_evaluations;
    return misfit_with(space.kernel(theta), false);
  };

  // Multi-start triage: 8 points per parameter on the transformed boxes.
  std::vector<double> c_grid;
  std::vector<double> a_grid;
  std::vector<double> r_grid;
  for (int i = 0; i < 8; ++i) {
    const double f = static_cast<double>(i) / 7.0;
    c_grid.push_back(std::log(0.1) + f * (std::log(10.0) - std::log(0.1)));
    a_grid.push_back(logit(0.05) + f * (logit(0.95) - logit(0.05)));
    r_grid.push_back(std::log(0.1) + f * (std::log(10.0) - std::log(0.1)));
  }

  std::vector<std::pair<double, Eigen::VectorXd>> corners;
  for (double tc : c_grid)
    for (double ta : a_grid) {
      if (space.dim == 2) {
        Eigen::VectorXd theta(2);
        theta << tc, ta;
        corners.emplace_back(fast_misfit(theta), theta);
      } else {
        for (double tr : r_grid) {
          Eigen::VectorXd theta(3);
          theta << tc, ta, tr;
          corners.emplace_back(fast_misfit(theta), theta);
        }
      }
    }
  std::sort(corners.begin(), corners.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  const std::size_t starts = std::min<std::size_t>(6, corners.size());
  SimplexResult best;
  for (std::size_t s = 0; s < starts; ++s) {
    const SimplexResult run = nelder_mead(fast_misfit, corners[s].second, 0.4, 150, 1e-7);
    total_evaluations += run.evaluations;
    if (run.value < best.value) best = run;
  }
  if (best.x.size() == 0) {
    best.x = corners.front().second;
    best.value = corners.front().first;
  }

  // Final polish against the graded-mesh forward model.
  const auto full_misfit = [&](const Eigen::VectorXd& theta) {
    ++total_evaluations;
    return misfit_with(space.kernel(theta), true);
  };
  const SimplexResult polished = nelder_mead(full_misfit, best.x, 0.02, 80, 1e-9);
  total_evaluations += polished.evaluations;
  const SimplexResult& final_run = polished.value <= best.value ? polished : best;

  FunctionalRecovery out;
  out.family = family;
  out.scale = std::exp(final_run.x(0));
  out.order = sigmoid(final_run.x(1));
  out.rate = space.dim == 3 ? std::exp(final_run.x(2)) : 0.0;
  out.misfit = final_run.value;
  out.converged = final_run.converged;
  out.evaluations = total_evaluations;
  return out;
}

}  // namespace gfd
