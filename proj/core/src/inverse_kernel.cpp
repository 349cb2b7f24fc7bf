#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <utility>

#include "gfd/errors.hpp"
#include "gfd/inverse.hpp"
#include "gfd/nnls.hpp"
#include "inverse_detail.hpp"

namespace gfd {

namespace {

/// One per-mode first-kind problem coef * (M * w) = r, collocated on the
/// window axis extended one cell to the left of t1.  The extension matches
/// the trapezoidal data generation, which assigns half a cell of source mass
/// to [t1 - h, t1] when f jumps on at t1.
struct DictionaryProblem {
  Eigen::MatrixXd columns;  // rows: nodes 1..Next; cols: dictionary rates
  Eigen::VectorXd rhs;      // r at those nodes
  double energy = 0.0;      // h * sum r^2, the mode's excitation energy
};

DictionaryProblem build_problem(const std::vector<double>& w, const std::vector<double>& f,
                                double h, const std::vector<double>& rates) {
  const std::size_t Nw = w.size() - 1;
  const std::size_t next = Nw + 1;  // extended cell count

  std::vector<double> w_ext(next + 1, 0.0);
  std::vector<double> f_ext(next + 1, 0.0);
  for (std::size_t j = 0; j <= Nw; ++j) {
    w_ext[j + 1] = w[j];
    f_ext[j + 1] = f[j];
  }

  DictionaryProblem P;
  P.rhs.resize(static_cast<Eigen::Index>(next));
  double cum = 0.0;
  for (std::size_t i = 1; i <= next; ++i) {
    cum += 0.5 * h * (f_ext[i - 1] + f_ext[i]);
    P.rhs(static_cast<Eigen::Index>(i - 1)) = cum - w_ext[i];
  }
  P.energy = h * P.rhs.squaredNorm();

  P.columns.resize(static_cast<Eigen::Index>(next), static_cast<Eigen::Index>(rates.size()));
  for (std::size_t p = 0; p < rates.size(); ++p) {
    const std::vector<double> conv = detail::exponential_convolution(rates[p], h, w_ext);
    for (std::size_t i = 1; i <= next; ++i)
      P.columns(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(p)) = conv[i];
  }
  return P;
}

struct ModeFit {
  Eigen::VectorXd weights;
  double residual = 0.0;
};

Eigen::VectorXd nnls_ridge(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double ridge) {
  const Eigen::Index n = A.cols();
  Eigen::MatrixXd Aug(A.rows() + n, n);
  Eigen::VectorXd rhs(A.rows() + n);
  Aug.topRows(A.rows()) = A;
  Aug.bottomRows(n) = std::sqrt(ridge) * Eigen::MatrixXd::Identity(n, n);
  rhs.head(A.rows()) = b;
  rhs.tail(n).setZero();
  return nnls(Aug, rhs);
}

/// Estimates the noise standard deviation from second differences over the
/// trailing quarter of the samples (variance 6 sigma^2 for white noise).
double estimate_noise(const Eigen::VectorXd& r) {
  const Eigen::Index n = r.size();
  const Eigen::Index start = std::max<Eigen::Index>(1, (3 * n) / 4);
  double sum2 = 0.0;
  Eigen::Index count = 0;
  for (Eigen::Index i = start; i + 1 < n; ++i) {
    const double d = r(i + 1) - 2.0 * r(i) + r(i - 1);
    sum2 += d * d;
    ++count;
  }
  return count > 0 ? std::sqrt(sum2 / static_cast<double>(count) / 6.0) : 0.0;
}

ModeFit solve_dictionary(const DictionaryProblem& P, double coef,
                         const RegularizationConfig& reg) {
  const Eigen::MatrixXd A = coef * P.columns;
  ModeFit fit;
  if (!reg.discrepancy) {
    fit.weights = nnls_ridge(A, P.rhs, reg.epsilon);
    fit.residual = (A * fit.weights - P.rhs).norm();
    return fit;
  }

  const double noise = reg.noise_level >= 0.0 ? reg.noise_level : estimate_noise(P.rhs);
  const double target = noise * std::sqrt(static_cast<double>(P.rhs.size()));
  const auto residual_at = [&](double eps) {
    fit.weights = nnls_ridge(A, P.rhs, eps);
    fit.residual = (A * fit.weights - P.rhs).norm();
    return fit.residual;
  };

  double log_lo = std::log(1e-16);
  double log_hi = std::log(1e4);
  if (residual_at(std::exp(log_lo)) >= target) {
    residual_at(std::exp(log_lo));
  } else if (residual_at(std::exp(log_hi)) <= target) {
    residual_at(std::exp(log_hi));
  } else {
    for (int iter = 0; iter < 40; ++iter) {
      const double log_mid = 0.5 * (log_lo + log_hi);
      (residual_at(std::exp(log_mid)) < target ? log_lo : log_hi) = log_mid;
    }
    residual_at(std::exp(0.5 * (log_lo + log_hi)));
  }
  return fit;
}

std::vector<double> evaluate_dictionary(const Eigen::VectorXd& weights,
                                        const std::vector<double>& rates, const TimeGrid& grid) {
  std::vector<double> out(grid.node_count(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double t = grid.time(j);
    double acc = 0.0;
    for (std::size_t p = 0; p < rates.size(); ++p)
      acc += weights(static_cast<Eigen::Index>(p)) * std::exp(-rates[p] * t);
    out[j] = acc;
  }
  return out;
}

constexpr double kExcitationFloor = 1e-12;

}  // namespace

KernelRecovery recover_kernel(const ObservationWindow& window, const std::vector<double>& lambda,
                              const RegularizationConfig& reg) {
  if (lambda.size() != window.mode_data.size())
    throw precondition_error("recover_kernel: eigenvalue count must match the mode data");

  const ShiftedData shifted = shift_origin(window);
  const TimeGrid& wg = shifted.window_grid;
  const double h = wg.step();
  const std::vector<double> rates = detail::dictionary_rates(wg.horizon(), h);
  const std::size_t K = shifted.w.size();

  KernelRecovery out{GridFunction::zeros(wg), std::vector<double>(K, 0.0),
                     std::vector<double>(K, 0.0), {}, 0.0, false, 3};

  std::vector<std::vector<double>> estimates(K);
  for (std::size_t k = 0; k < K; ++k) {
    const DictionaryProblem P = build_problem(shifted.w[k], shifted.f[k], h, rates);
    if (P.energy < kExcitationFloor || !(lambda[k] > 0.0)) {
      out.excluded_modes.push_back(k);
      continue;
    }
    const ModeFit fit = solve_dictionary(P, lambda[k], reg);
    out.mode_residuals[k] = fit.residual;
    estimates[k] = evaluate_dictionary(fit.weights, rates, wg);
    const double floor = 1e-14 * std::sqrt(P.energy / h);
    out.mode_weights[k] = 1.0 / std::max(fit.residual * fit.residual, floor * floor);
  }

  if (out.excluded_modes.size() == K)
    throw precondition_error(
        "recover_kernel: every mode is unexcited on the window (f vanishes there), so the "
        "kernel is not identifiable");

  double weight_sum = 0.0;
  for (double wt : out.mode_weights) weight_sum += wt;
  for (std::size_t j = 0; j < wg.node_count(); ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < K; ++k)
      if (out.mode_weights[k] > 0.0) acc += out.mode_weights[k] * estimates[k][j];
    out.kernel.values[j] = acc / weight_sum;
  }

  for (std::size_t j = out.unreliable_prefix; j < wg.node_count(); ++j) {
    double var = 0.0;
    for (std::size_t k = 0; k < K; ++k)
      if (out.mode_weights[k] > 0.0) {
        const double d = estimates[k][j] - out.kernel.values[j];
        var += out.mode_weights[k] * d * d;
      }
    const double dev = std::sqrt(var / weight_sum) / std::max(std::abs(out.kernel.values[j]), 1e-300);
    out.spread = std::max(out.spread, dev);
  }
  out.inconsistency_warning = out.spread > 0.1;
  return out;
}

ProductRecovery recover_product(const ObservationWindow& window,
                                const RegularizationConfig& reg) {
  const ShiftedData shifted = shift_origin(window);
  const TimeGrid& wg = shifted.window_grid;
  const double h = wg.step();
  const std::vector<double> rates = detail::dictionary_rates(wg.horizon(), h);
  const std::size_t K = shifted.w.size();

  ProductRecovery out{wg,
                      std::vector<std::vector<double>>(K),
                      GridFunction::zeros(wg),
                      std::vector<double>(K, std::numeric_limits<double>::quiet_NaN()),
                      1.0,
                      {},
                      0.0,
                      std::vector<double>(K, 0.0),
                      3};

  for (std::size_t k = 0; k < K; ++k) {
    const DictionaryProblem P = build_problem(shifted.w[k], shifted.f[k], h, rates);
    if (P.energy < kExcitationFloor) {
      out.unrecoverable_modes.push_back(k);
      continue;
    }
    const ModeFit fit = solve_dictionary(P, 1.0, reg);
    out.mode_residuals[k] = fit.residual;
    out.mode_products[k] = evaluate_dictionary(fit.weights, rates, wg);
  }

  if (out.unrecoverable_modes.size() == K)
    throw precondition_error(
        "recover_product: every mode is unexcited on the window, so nothing is recoverable");

  // Gauge point: M(1) = 1 when the window reaches t = 1, else the midpoint.
  const double t_gauge = wg.horizon() >= 1.0 ? 1.0 : 0.5 * wg.horizon();
  std::size_t gauge_node = static_cast<std::size_t>(std::llround(t_gauge / h));
  gauge_node = std::min(std::max<std::size_t>(gauge_node, 1), wg.cell_count());
  out.gauge_time = wg.time(gauge_node);

  std::size_t first = K;
  for (std::size_t k = 0; k < K; ++k)
    if (!out.mode_products[k].empty()) {
      if (first == K) first = k;
      out.eigenvalues[k] = out.mode_products[k][gauge_node];
    }

  const std::vector<double>& m_first = out.mode_products[first];
  for (std::size_t j = 0; j < wg.node_count(); ++j)
    out.kernel.values[j] = m_first[j] / m_first[gauge_node];

  for (std::size_t k = 0; k < K; ++k) {
    if (out.mode_products[k].empty() || k == first) continue;
    for (std::size_t j = out.unreliable_prefix; j < wg.node_count(); ++j) {
      const double denom = out.mode_products[k][gauge_node] * m_first[j];
      if (std::abs(denom) < 1e-300) continue;
      const double ratio = out.mode_products[k][j] * m_first[gauge_node] / denom;
      out.proportionality_defect = std::max(out.proportionality_defect, std::abs(ratio - 1.0));
    }
  }
  if (out.proportionality_defect > 0.05) {
    std::ostringstream msg;
    msg << "recover_product: per-mode products deviate from proportionality by "
        << out.proportionality_defect
        << " (> 0.05); the data was not generated by a single (M, A) pair";
    throw numerical_error(msg.str());
  }
  return out;
}

}  // namespace gfd
