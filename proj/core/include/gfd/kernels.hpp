#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "gfd/grid.hpp"
#include "gfd/measure.hpp"

namespace gfd {

/// Measure over the fractional order alpha defining a distributed-order kernel.
using DistributedOrderMeasure = DistributedMeasure;

enum class KernelFamily { PowerLaw, Tempered, DistributedOrder, Tabulated };

/// Bernstein (completely monotone) representation M(t) = integral over
/// (tau_min, inf) of exp(-t tau) q'(tau) dtau.
struct BernsteinRepresentation {
  std::function<double(double)> density;  // q'(tau), nonnegative
  double tau_min = 0.0;                   // support starts here
  /// Evaluates the representation integral numerically (exp-sinh quadrature).
  [[nodiscard]] double reconstruct(double t) const;
};

/// Report of pointwise complete-monotonicity checks: entries are (derivative
/// order n, time t, value of (-1)^n M^(n)(t)) where the sign condition failed.
struct MonotonicityViolation {
  int order;
  double t;
  double value;
};

/// Completely monotone memory kernel M(t).
///
/// Families:
///  - PowerLaw(c, alpha):          M(t) = c t^{alpha-1} / Gamma(alpha)
///  - Tempered(c, alpha, rate):    M(t) = c t^{alpha-1} e^{-rate t} / Gamma(alpha)
///  - DistributedOrder(measure):   M(t) = integral of t^{alpha-1}/Gamma(alpha) d measure(alpha)
///  - Tabulated(grid, values):     log-linear interpolation between positive,
///                                 non-increasing samples; no extrapolation.
///
/// Values are immutable after construction; all member functions are pure and
/// safe to call concurrently.
class MemoryKernel {
 public:
  static MemoryKernel power_law(double c, double alpha);
  static MemoryKernel tempered(double c, double alpha, double rate);
  static MemoryKernel distributed_order(DistributedOrderMeasure measure);
  /// Samples at the grid nodes; values[0] corresponds to t=0 and is used only
  /// for interpolation on the first cell.  Values must be strictly positive
  /// and non-increasing.
  static MemoryKernel tabulated(TimeGrid grid, std::vector<double> values);

  [[nodiscard]] KernelFamily family() const { return family_; }
  [[nodiscard]] double scale() const { return c_; }
  [[nodiscard]] double order() const { return alpha_; }
  [[nodiscard]] double rate() const { return rate_; }
  [[nodiscard]] const DistributedOrderMeasure& measure() const;

  /// Kernel value M(t) for t > 0.  Tabulated kernels require t within the
  /// table range (log-linear interpolation; extrapolation throws).
  [[nodiscard]] double operator()(double t) const;

  /// Laplace transform M^(s) off the branch cut (-inf, 0]:
  ///   PowerLaw -> c s^{-alpha}; Tempered -> c (s+rate)^{-alpha};
  ///   DistributedOrder -> integral of s^{-alpha} d measure;
  ///   Tabulated -> product-integration Laplace sum over the table range
  ///   (documented as approximate: the tail beyond the table is dropped).
  [[nodiscard]] std::complex<double> laplace(std::complex<double> s) const;

  /// Exact cell moments of the kernel over [a, b], 0 <= a < b:
  ///   m0 = integral of M(s) ds,  m1 = integral of s M(s) ds.
  /// These drive the product-integration quadrature; they are analytic for
  /// PowerLaw (power functions), Tempered (regularized incomplete gamma),
  /// DistributedOrder (measure-integrated power moments), and piecewise
  /// exponential-exact for Tabulated.
  void cell_moments(double a, double b, double& m0, double& m1) const;

  /// Bernstein density of PowerLaw / Tempered kernels:
  ///   PowerLaw: q'(tau) = c sin(pi alpha)/pi * tau^{-alpha} on (0, inf)
  ///   Tempered: q'(tau) = c sin(pi alpha)/pi * (tau-rate)^{-alpha} on (rate, inf)
  /// Other variants throw unsupported_variant_error.
  [[nodiscard]] BernsteinRepresentation bernstein_representation() const;

  /// Pointwise complete-monotonicity check of (-1)^n M^(n)(t) >= -tol for
  /// n = 0..n_max on the positive nodes of the grid.  Analytic derivatives for
  /// PowerLaw/Tempered; central finite differences (step t/100) for
  /// DistributedOrder and Tabulated.  Returns the list of violations
  /// (empty for genuine CM kernels).
  [[nodiscard]] std::vector<MonotonicityViolation> check_complete_monotonicity(
      int n_max, const TimeGrid& grid, double tolerance = 1e-7) const;

 private:
  MemoryKernel() = default;

  KernelFamily family_ = KernelFamily::PowerLaw;
  double c_ = 1.0;
  double alpha_ = 0.5;
  double rate_ = 0.0;
  DistributedOrderMeasure measure_ = DistributedOrderMeasure::atoms({{0.5, 1.0}});
  // Tabulated data
  std::vector<double> table_times_;
  std::vector<double> table_values_;
  std::vector<double> table_log_slope_;  // per-cell B in M = A exp(B (t - t_i))
};

/// Discrete Sonine partner: piecewise-constant cell values K_j on the cells of
/// `grid` such that the product-integration discretization of (M * K)(t_n)
/// equals 1 at every positive node.  `residual_max` is the verified maximum
/// deviation |discrete (M*K) - 1| of the returned values.
struct SoninePartner {
  TimeGrid grid;
  std::vector<double> cell_values;  // length N, value on (t_j, t_{j+1})
  double residual_max;
};

/// Solves the Sonine equation M * K = 1 on the grid as a lower-triangular
/// first-kind system with exact singular moments.  Requires M to be
/// unbounded at 0 (integrable singularity): PowerLaw, Tempered, or
/// DistributedOrder with all alpha < 1.
[[nodiscard]] SoninePartner sonine_partner(const MemoryKernel& M, const TimeGrid& grid);

}  // namespace gfd
