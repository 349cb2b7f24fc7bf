#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/Dense>

#include "gfd/errors.hpp"
#include "gfd/inverse.hpp"
#include "inverse_detail.hpp"

namespace gfd {

namespace {

void validate_history_inputs(const MemoryKernel& M, const std::vector<double>& lambda,
                             const ObservationWindow& window) {
  if (M.family() == KernelFamily::Tabulated)
    throw precondition_error(
        "recover_history: restricted to kernel families certified completely monotone "
        "(power-law, tempered, distributed-order); a tabulated kernel carries no such "
        "certificate");
  if (lambda.size() != window.mode_data.size())
    throw precondition_error("recover_history: eigenvalue count must match the mode data");
  const TimeGrid& grid = window.grid;
  if (!(window.source.grid == grid))
    throw precondition_error("recover_history: source grid differs from the window grid");
  for (const std::vector<double>& row : window.mode_data)
    if (row.size() != grid.node_count())
      throw precondition_error("recover_history: every mode trace needs one sample per node");
  for (std::size_t k = 0; k < window.source.mode_values.size(); ++k)
    for (std::size_t j = 0; j < grid.gap_end_index(); ++j)
      if (window.source.mode_values[k][j] != 0.0)
        throw precondition_error(
            "recover_history: the known source must vanish before t1 — the part on (0, t0) "
            "is the unknown history");
}

}  // namespace

HistoryRecovery recover_history(const MemoryKernel& M, const std::vector<double>& lambda,
                                const ObservationWindow& window,
                                const RegularizationConfig& reg) {
  validate_history_inputs(M, lambda, window);
  const TimeGrid& grid = window.grid;
  const std::size_t n0 = grid.obs_start_index();
  const std::size_t N = grid.cell_count();
  const std::size_t nf = n0 - 1;           // history unknowns f(t_1)..f(t_{n0-1})
  const std::size_t cols = nf + 1;         // plus u(0)
  const std::size_t rows = N - n0 + 1;     // observation nodes t_{n0}..t_N
  const std::size_t K = window.mode_data.size();

  const detail::DiscretizedKernel dk(M, detail::refine_grid(grid));

  // Hat-source integrals 1 * hat_m are mode-independent; build them once.
  std::vector<GridFunction> hat_integrals;
  hat_integrals.reserve(nf);
  for (std::size_t m = 1; m <= nf; ++m) {
    GridFunction hat = GridFunction::zeros(grid);
    hat.values[m] = 1.0;
    hat_integrals.push_back(cumulative_trapezoid(hat));
  }
  const GridFunction ones = GridFunction::constant(grid, 1.0);

  HistoryRecovery out{grid,
                      std::vector<double>(K, 0.0),
                      std::vector<std::vector<double>>(K),
                      std::vector<double>(K, 0.0),
                      {},
                      rows < cols};

  for (std::size_t k = 0; k < K; ++k) {
    const double lam = lambda[k];

    const ModeTrajectory relax = detail::solve_with(dk, lam, ones);
    Eigen::MatrixXd A(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i)
      A(static_cast<Eigen::Index>(i), 0) = relax.values[n0 + i];
    for (std::size_t m = 0; m < nf; ++m) {
      const ModeTrajectory resp = detail::solve_with(dk, lam, hat_integrals[m]);
      for (std::size_t i = 0; i < rows; ++i)
        A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(1 + m)) =
            resp.values[n0 + i];
    }

    // The response to the known late source is subtracted from the data.
    GridFunction g_known = cumulative_trapezoid(GridFunction{grid, window.source.mode_values[k]});
    const ModeTrajectory known = detail::solve_with(dk, lam, g_known);
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows));
    for (std::size_t i = 0; i < rows; ++i)
      b(static_cast<Eigen::Index>(i)) = window.mode_data[k][n0 + i] - known.values[n0 + i];

    const double sensitivity = A.cwiseAbs().maxCoeff();
    if (sensitivity < 1e-14) {
      out.skipped_modes.push_back(k);
      out.history[k].assign(nf, 0.0);
      continue;
    }

    // First-difference penalty on the history block, anchored to zero at
    // both ends of (0, t0); u(0) is left unpenalized.
    const std::size_t pen_rows = nf + 1;
    Eigen::MatrixXd Aug(static_cast<Eigen::Index>(rows + pen_rows),
                        static_cast<Eigen::Index>(cols));
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows + pen_rows));
    Aug.topRows(static_cast<Eigen::Index>(rows)) = A;
    rhs.head(static_cast<Eigen::Index>(rows)) = b;
    Aug.bottomRows(static_cast<Eigen::Index>(pen_rows)).setZero();
    rhs.tail(static_cast<Eigen::Index>(pen_rows)).setZero();
    const double sp = std::sqrt(reg.tikhonov);
    for (std::size_t rrow = 0; rrow <= nf; ++rrow) {
      const Eigen::Index ar = static_cast<Eigen::Index>(rows + rrow);
      if (rrow < nf) Aug(ar, static_cast<Eigen::Index>(1 + rrow)) = sp;
      if (rrow > 0) Aug(ar, static_cast<Eigen::Index>(rrow)) -= sp;
    }

    const Eigen::VectorXd x = Aug.colPivHouseholderQr().solve(rhs);
    out.initial_coeffs[k] = x(0);
    out.history[k].assign(nf, 0.0);
    for (std::size_t m = 0; m < nf; ++m) out.history[k][m] = x(static_cast<Eigen::Index>(1 + m));
    out.mode_residuals[k] = (A * x - b).norm();
  }
  return out;
}

}  // namespace gfd
