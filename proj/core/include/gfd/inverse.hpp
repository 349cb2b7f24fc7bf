#pragma once

#include <cstddef>
#include <vector>

#include "gfd/forward.hpp"
#include "gfd/grid.hpp"
#include "gfd/kernels.hpp"
#include "gfd/measure.hpp"
#include "gfd/operators.hpp"
#include "gfd/volterra.hpp"

namespace gfd {

/// Partial late-time data for the inverse problems: per-mode traces (or a
/// scalar functional trace) on [t0, T], together with the known part of the
/// source.  Entries of mode_data before obs_start_index are ignored by the
/// recovery routines.  `history_traces` optionally carries the synthetic
/// history-only trajectories (the response to (u0, f|_(0,t0)) alone), which
/// enables exact history elimination in round-trip experiments.
struct ObservationWindow {
  TimeGrid grid;
  std::vector<std::vector<double>> mode_data;       // [mode][node], nodes 0..N
  std::vector<double> scalar_data;                  // <Phi,u>(t_n), nodes 0..N; may be empty
  SourceModel source;                               // known source; gap-structured
  std::vector<std::vector<double>> history_traces;  // optional, same shape as mode_data
  std::vector<double> scalar_history;               // optional, same shape as scalar_data
};

/// Data moved to the window origin: w(t) = u(t1 + t) - Y(t1 + t), where Y is
/// the contribution of the unknown history.  w solves the mode equation with
/// zero initial data, which is what every recovery routine consumes.
struct ShiftedData {
  TimeGrid window_grid;                  // [0, T - t1], same step as the run grid
  std::vector<std::vector<double>> w;    // per-mode shifted traces
  std::vector<std::vector<double>> f;    // known source on the window, f_k(t1 + t)
  std::vector<double> scalar_w;          // shifted scalar trace; empty if unused
  /// True when the history part was eliminated exactly from supplied
  /// history traces; false when the exponential-sum continuation fitted on
  /// the gap was subtracted instead.
  bool used_exact_elimination = false;
  /// Max-norm error of the gap-fitted continuation against the exact
  /// elimination, relative to the data scale (reported when both paths are
  /// available; 0 otherwise).
  double surrogate_error = 0.0;
};

/// Moves the observation origin to t1, eliminating the unknown history:
/// exactly when history traces are supplied, trivially when the data shows
/// zero history, and otherwise by fitting a decaying exponential-sum
/// surrogate of Y on the gap (t0, t1) and subtracting its continuation.
/// Throws precondition_error when the gap is shorter than 3 cells.
[[nodiscard]] ShiftedData shift_origin(const ObservationWindow& window);

struct RegularizationConfig {
  double epsilon = 1e-8;       // Lavrentiev weight / dictionary ridge weight
  double noise_level = -1.0;   // known noise std; < 0 means "estimate from data"
  bool discrepancy = false;    // choose epsilon by the discrepancy principle
  double tikhonov = 1e-8;      // smoothness penalty (history recovery)
};

// ---------------------------------------------------------------------------
// Kernel recovery (known eigenvalues)
// ---------------------------------------------------------------------------

struct KernelRecovery {
  /// Recovered kernel samples M(t) on the window grid [0, T - t1].
  GridFunction kernel;
  /// Per-mode data-fit residuals of the dictionary deconvolution (L2).
  std::vector<double> mode_residuals;
  /// Aggregation weights actually used (zero for excluded modes).
  std::vector<double> mode_weights;
  std::vector<std::size_t> excluded_modes;  // excitation below threshold
  /// Cross-mode spread: max over trusted nodes of the weighted relative
  /// deviation between per-mode kernel estimates — the uniqueness
  /// diagnostic.  Data not generated by a single kernel shows up here.
  double spread = 0.0;
  bool inconsistency_warning = false;
  std::size_t unreliable_prefix = 3;
};

/// Recovers M from per-mode windows via the first-kind equations
/// lambda_k (M * w_k) = (1 * f_k) - w_k, deconvolved against a completely
/// monotone exponential dictionary (nonnegative weights), then aggregated
/// across modes by inverse-residual-squared weights.
[[nodiscard]] KernelRecovery recover_kernel(const ObservationWindow& window,
                                            const std::vector<double>& lambda,
                                            const RegularizationConfig& reg = {});

// ---------------------------------------------------------------------------
// Product recovery (unknown eigenvalues; gauge M(1) = 1)
// ---------------------------------------------------------------------------

struct ProductRecovery {
  TimeGrid window_grid;
  /// Per-mode products m_k(t) = lambda_k M(t) at window nodes; empty row
  /// for unrecoverable (unexcited) modes.
  std::vector<std::vector<double>> mode_products;
  /// Gauge-fixed kernel, normalized so kernel(gauge_time) = 1.
  GridFunction kernel;
  /// Gauge-fixed eigenvalues lambda_k = m_k(gauge_time); NaN when
  /// unrecoverable.
  std::vector<double> eigenvalues;
  double gauge_time = 1.0;
  std::vector<std::size_t> unrecoverable_modes;
  /// max_t |m_k(t) m_l(s*)/(m_l(t) m_k(s*)) - 1| over trusted nodes: the
  /// cross-mode proportionality defect of eq. m_k = lambda_k M.
  double proportionality_defect = 0.0;
  std::vector<double> mode_residuals;
  std::size_t unreliable_prefix = 3;
};

/// Recovers per-mode products m_k = lambda_k M by deconvolution without
/// knowing the eigenvalues, checks cross-mode proportionality, and fixes the
/// scaling gauge M(1) = 1 (midpoint of the window when it is shorter than 1).
/// Throws numerical_error when the products are non-proportional beyond
/// tolerance (data inconsistent with a single (M, A) pair).
[[nodiscard]] ProductRecovery recover_product(const ObservationWindow& window,
                                              const RegularizationConfig& reg = {});

// ---------------------------------------------------------------------------
// History recovery (known kernel and eigenvalues)
// ---------------------------------------------------------------------------

struct HistoryRecovery {
  TimeGrid grid;
  std::vector<double> initial_coeffs;        // u_k(0)
  /// Recovered source history samples f_k(t_m) at nodes m = 1..n0-1 (the
  /// open interval (0, t0); the endpoints are anchored to zero by the
  /// difference penalty).
  std::vector<std::vector<double>> history;
  std::vector<double> mode_residuals;        // observation misfit per mode
  std::vector<std::size_t> skipped_modes;    // zero relaxation sensitivity
  bool underdetermined = false;
};

/// Recovers {u_k(0), f_k on (0, t0)} from window data with known (M, lambda)
/// by per-mode Tikhonov-regularized least squares: columns are forward
/// responses (relaxation for u0, hat sources for each history node), the
/// penalty is reg.tikhonov times first differences of the history anchored
/// at zero on both ends.  M must belong to a certified completely monotone
/// family (power-law, tempered, distributed-order).
[[nodiscard]] HistoryRecovery recover_history(const MemoryKernel& M,
                                              const std::vector<double>& lambda,
                                              const ObservationWindow& window,
                                              const RegularizationConfig& reg = {});

// ---------------------------------------------------------------------------
// Parametric kernel recovery from one scalar functional trace
// ---------------------------------------------------------------------------

struct FunctionalRecovery {
  KernelFamily family = KernelFamily::PowerLaw;
  double scale = 0.0;   // c
  double order = 0.0;   // alpha
  double rate = 0.0;    // tempering rate; meaningful for Tempered only
  double misfit = 0.0;  // final least-squares misfit
  bool converged = false;
  std::size_t evaluations = 0;

  [[nodiscard]] MemoryKernel make_kernel() const;
};

/// Fits (c, alpha[, rate]) of a declared kernel family to a scalar trace
/// <Phi, u(t)> on [t1, T] by multi-start Nelder-Mead over log/logit-scaled
/// parameters; the forward model is the zero-history mode solve on the
/// window.  `derivative_order` m >= 1 compares m-fold smoothed numerical
/// derivatives of data and model instead of the traces themselves (the
/// reduction used when <Phi, f^(j)(t1+)> = 0 for j < m).
/// Throws precondition_error when Phi annihilates every excited mode.
[[nodiscard]] FunctionalRecovery recover_kernel_from_functional(
    const ObservationWindow& window, const std::vector<double>& phi_coefficients,
    const std::vector<double>& lambda, KernelFamily family, int derivative_order = 0,
    const RegularizationConfig& reg = {});

// ---------------------------------------------------------------------------
// Distributed-order measure recovery from recovered eigenvalues
// ---------------------------------------------------------------------------

struct MeasureRecovery {
  /// Recovered atoms, exponents ascending (the DistributedMeasure order).
  std::vector<MeasureAtom> atoms;
  double eta = 0.0;       // recovered spectral shift (0 unless searched)
  double residual = 0.0;  // max_k |Psi(mu_k + eta) - lambda_k| / lambda_k
  std::size_t peel_count = 0;

  [[nodiscard]] DistributedMeasure make_measure() const;
};

/// Recovers an atomic distributed-order measure (and optionally a spectral
/// shift eta) from eigenvalue pairs lambda_k = integral (mu_k + eta)^beta
/// d rho: peels atoms largest-exponent first off the log-log tail, polishes
/// all atoms jointly by Gauss-Newton on the log-misfit, and resolves eta by
/// alternating tail fits with bisection of the strictly increasing map
/// eta -> Psi(mu_1 + eta).
/// Requires mu strictly increasing and spanning at least two decades.
[[nodiscard]] MeasureRecovery recover_distributed_measure(const std::vector<double>& lambda,
                                                          const std::vector<double>& mu,
                                                          bool shift_search = false,
                                                          std::size_t max_atoms = 4);

}  // namespace gfd
