#include <algorithm>
#include <cmath>
#include <sstream>

#include "gfd/errors.hpp"
#include "gfd/inverse.hpp"
#include "inverse_detail.hpp"

namespace gfd {

namespace detail {

WindowLayout window_layout(const TimeGrid& grid) {
  WindowLayout layout{grid.gap_end_index(), grid.cell_count() - grid.gap_end_index(),
                      grid.step(),
                      TimeGrid::uniform(1.0, 4)};  // placeholder, replaced below
  if (layout.Nw < 8)
    throw precondition_error("observation window [t1, T] must span at least 8 grid cells");
  layout.window_grid =
      TimeGrid::uniform(static_cast<double>(layout.Nw) * layout.h, layout.Nw);
  return layout;
}

std::vector<double> dictionary_rates(double Tw, double h) {
  std::vector<double> rates{0.0};
  const double r_min = 0.1 / Tw;
  const double r_max = 16.0 / h;
  const double decades = std::log10(r_max / r_min);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(decades * 6.0));
  for (std::size_t i = 0; i <= steps; ++i)
    rates.push_back(r_min * std::pow(10.0, static_cast<double>(i) / 6.0));
  return rates;
}

std::vector<double> surrogate_rates(double span) {
  std::vector<double> rates{0.0};
  const double r_min = 0.1 / span;
  const double r_max = 50.0 / span;
  const double decades = std::log10(r_max / r_min);
  const std::size_t steps = static_cast<std::size_t>(std::ceil(decades * 6.0));
  for (std::size_t i = 0; i <= steps; ++i)
    rates.push_back(r_min * std::pow(10.0, static_cast<double>(i) / 6.0));
  return rates;
}

namespace {

/// (1 - e^{-x}(1 + x)) / x^2, the normalized local first moment of e^{-r t}.
double first_moment_factor(double x) {
  if (x < 1e-3)
    return 0.5 - x / 3.0 + x * x / 8.0 - x * x * x / 30.0;
  return (1.0 - std::exp(-x) * (1.0 + x)) / (x * x);
}

}  // namespace

void exponential_lag_tables(double r, double h, std::size_t cells, std::vector<double>& A,
                            std::vector<double>& B) {
  A.resize(cells);
  B.resize(cells);
  if (r == 0.0) {
    std::fill(A.begin(), A.end(), 0.5 * h);
    std::fill(B.begin(), B.end(), 0.5 * h);
    return;
  }
  const double x = r * h;
  const double g1 = first_moment_factor(x);
  const double g0 = -std::expm1(-x) / x;
  const double decay = std::exp(-x);
  double front = 1.0;  // e^{-r t_L}
  for (std::size_t L = 0; L < cells; ++L) {
    const double m0 = front * h * g0;
    const double m1_local = front * h * h * g1;
    A[L] = m1_local / h;
    B[L] = m0 - A[L];
    front *= decay;
  }
}

std::vector<double> exponential_convolution(double r, double h, const std::vector<double>& g) {
  const std::size_t cells = g.size() - 1;
  std::vector<double> A;
  std::vector<double> B;
  exponential_lag_tables(r, h, cells, A, B);
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t n = 1; n <= cells; ++n) {
    double acc = 0.0;
    for (std::size_t L = 0; L < n; ++L) acc += A[L] * g[n - 1 - L] + B[L] * g[n - L];
    out[n] = acc;
  }
  return out;
}

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double ridge) {
  const Eigen::Index n = A.cols();
  Eigen::MatrixXd Aug(A.rows() + n, n);
  Eigen::VectorXd rhs(A.rows() + n);
  Aug.topRows(A.rows()) = A;
  Aug.bottomRows(n) = std::sqrt(ridge) * Eigen::MatrixXd::Identity(n, n);
  rhs.head(A.rows()) = b;
  rhs.tail(n).setZero();
  return Aug.colPivHouseholderQr().solve(rhs);
}

}  // namespace detail

namespace {

void validate_window(const ObservationWindow& window) {
  const TimeGrid& grid = window.grid;
  if (!(window.source.grid == grid))
    throw precondition_error("shift_origin: source grid differs from the window grid");
  if (window.source.structure == SourceStructure::Free)
    throw precondition_error(
        "shift_origin: the source must carry the gap structure (zero on (t0, t1))");
  if (grid.gap_end_index() - grid.obs_start_index() < 3)
    throw precondition_error(
        "shift_origin: the gap (t0, t1) must span at least 3 cells, otherwise the "
        "continuation fit is underdetermined");
  for (const std::vector<double>& row : window.mode_data)
    if (row.size() != grid.node_count())
      throw precondition_error("shift_origin: every mode trace needs one sample per node");
  if (!window.scalar_data.empty() && window.scalar_data.size() != grid.node_count())
    throw precondition_error("shift_origin: scalar trace needs one sample per node");
  if (!window.history_traces.empty() && window.history_traces.size() != window.mode_data.size())
    throw precondition_error("shift_origin: history traces must match the mode traces");
  for (const std::vector<double>& row : window.history_traces)
    if (row.size() != grid.node_count())
      throw precondition_error("shift_origin: every history trace needs one sample per node");
  if (!window.scalar_history.empty() && window.scalar_history.size() != grid.node_count())
    throw precondition_error("shift_origin: scalar history trace needs one sample per node");
}

/// Fits Y(t) ~ sum_i c_i e^{-r_i (t - t0)} on the gap nodes and returns the
/// continuation Y(t_{n1 + j}) for j = 0..Nw.
std::vector<double> gap_continuation(const TimeGrid& grid, const std::vector<double>& trace,
                                     const detail::WindowLayout& layout) {
  const std::size_t n0 = grid.obs_start_index();
  const std::size_t n1 = layout.n1;
  const double t0 = grid.time(n0);
  const double span = grid.time(n1) - t0;
  const std::vector<double> rates = detail::surrogate_rates(span);

  // Fit on [t0, t1) only: the node at t1 already carries the leading
  // half-cell of the known source under the trapezoid quadrature.
  const std::size_t rows = n1 - n0;
  Eigen::MatrixXd A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(rates.size()));
  Eigen::VectorXd b(static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < rows; ++i) {
    const double t = grid.time(n0 + i) - t0;
    for (std::size_t p = 0; p < rates.size(); ++p)
      A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(p)) = std::exp(-rates[p] * t);
    b(static_cast<Eigen::Index>(i)) = trace[n0 + i];
  }
  const Eigen::VectorXd c = detail::ridge_solve(A, b, 1e-10);

  std::vector<double> continuation(layout.Nw + 1, 0.0);
  for (std::size_t j = 0; j <= layout.Nw; ++j) {
    const double t = grid.time(n1 + j) - t0;
    double acc = 0.0;
    for (std::size_t p = 0; p < rates.size(); ++p) acc += c(static_cast<Eigen::Index>(p)) * std::exp(-rates[p] * t);
    continuation[j] = acc;
  }
  return continuation;
}

bool gap_is_quiet(const TimeGrid& grid, const std::vector<double>& trace) {
  double scale = 0.0;
  for (double v : trace) scale = std::max(scale, std::abs(v));
  double gap_max = 0.0;
  // Open at t1: sources are allowed to switch on exactly there.
  for (std::size_t j = grid.obs_start_index(); j < grid.gap_end_index(); ++j)
    gap_max = std::max(gap_max, std::abs(trace[j]));
  return gap_max <= 1e-13 * std::max(scale, 1e-300);
}

/// Shifts one trace to the window origin, eliminating its history part.
/// Returns the shifted values and accumulates the surrogate-vs-exact error.
std::vector<double> shift_trace(const TimeGrid& grid, const detail::WindowLayout& layout,
                                const std::vector<double>& trace,
                                const std::vector<double>* history, double& surrogate_error,
                                bool& any_surrogate) {
  const std::size_t n1 = layout.n1;
  std::vector<double> w(layout.Nw + 1);

  if (history != nullptr) {
    for (std::size_t j = 0; j <= layout.Nw; ++j)
      w[j] = trace[n1 + j] - (*history)[n1 + j];
    // Report how well the declared continuation scheme would have done.
    const std::vector<double> continuation = gap_continuation(grid, trace, layout);
    double scale = 0.0;
    for (double v : w) scale = std::max(scale, std::abs(v));
    if (scale > 0.0)
      for (std::size_t j = 0; j <= layout.Nw; ++j) {
        const double w_sur = trace[n1 + j] - continuation[j];
        surrogate_error = std::max(surrogate_error, std::abs(w_sur - w[j]) / scale);
      }
    return w;
  }

  if (gap_is_quiet(grid, trace)) {
    for (std::size_t j = 0; j <= layout.Nw; ++j) w[j] = trace[n1 + j];
    return w;
  }

  const std::vector<double> continuation = gap_continuation(grid, trace, layout);
  for (std::size_t j = 0; j <= layout.Nw; ++j) w[j] = trace[n1 + j] - continuation[j];
  any_surrogate = true;
  return w;
}

}  // namespace

ShiftedData shift_origin(const ObservationWindow& window) {
  validate_window(window);
  const TimeGrid& grid = window.grid;
  const detail::WindowLayout layout = detail::window_layout(grid);

  ShiftedData out{layout.window_grid, {}, {}, {}, false, 0.0};
  const bool have_history = !window.history_traces.empty();
  bool any_surrogate = false;

  out.w.reserve(window.mode_data.size());
  for (std::size_t k = 0; k < window.mode_data.size(); ++k) {
    const std::vector<double>* hist = have_history ? &window.history_traces[k] : nullptr;
    out.w.push_back(shift_trace(grid, layout, window.mode_data[k], hist, out.surrogate_error,
                                any_surrogate));
  }
  if (!window.scalar_data.empty()) {
    const std::vector<double>* hist =
        window.scalar_history.empty() ? nullptr : &window.scalar_history;
    out.scalar_w = shift_trace(grid, layout, window.scalar_data, hist, out.surrogate_error,
                               any_surrogate);
  }

  out.f.reserve(window.mode_data.size());
  for (std::size_t k = 0; k < window.source.mode_values.size(); ++k) {
    std::vector<double> fw(layout.Nw + 1);
    for (std::size_t j = 0; j <= layout.Nw; ++j)
      fw[j] = window.source.mode_values[k][layout.n1 + j];
    out.f.push_back(std::move(fw));
  }

  out.used_exact_elimination = have_history || !any_surrogate;
  return out;
}

}  // namespace gfd
