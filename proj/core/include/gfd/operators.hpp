#pragma once

#include <functional>
#include <vector>

#include "gfd/measure.hpp"

namespace gfd {

/// Dirichlet spectral data of B_a = -d^2/dx^2 - a on (0, L): eigenvalues
/// mu_k (ascending, positive) and L2-orthonormal eigenfunctions v_k vanishing
/// at both ends.  Constructed analytically for constant potentials or by a
/// central finite-difference discretization for sampled potentials.
/// Immutable after construction; safe to share across threads.
class SpectralOperator {
 public:
  [[nodiscard]] double length() const { return L_; }
  [[nodiscard]] int mode_count() const { return static_cast<int>(mu_.size()); }
  [[nodiscard]] const std::vector<double>& eigenvalues() const { return mu_; }
  /// True for the closed-form sine basis (constant potential).
  [[nodiscard]] bool is_analytic() const { return analytic_; }

  /// Eigenfunction v_k (k = 0-based mode index) evaluated at x in [0, L].
  [[nodiscard]] double eigenfunction(int k, double x) const;

  friend SpectralOperator dirichlet_eigenpairs(double L, double a, int K);
  friend SpectralOperator sturm_liouville_fd(double L, const std::function<double(double)>& a,
                                             int mesh_size, int K);

 private:
  SpectralOperator() = default;

  double L_ = 1.0;
  bool analytic_ = true;
  double const_potential_ = 0.0;
  std::vector<double> mu_;
  // Finite-difference path: interior mesh values of each eigenfunction.
  int mesh_size_ = 0;
  std::vector<std::vector<double>> fd_modes_;  // [k][i], i = 1..mesh_size-1 interior
};

/// Analytic Dirichlet eigenpairs for a constant potential a <= 0:
///   mu_k = (k pi / L)^2 - a,  v_k = sqrt(2/L) sin(k pi x / L),  k = 1..K.
[[nodiscard]] SpectralOperator dirichlet_eigenpairs(double L, double a, int K);

/// Eigenpairs of the second-order central-difference discretization of
/// -v'' - a(x) v with Dirichlet ends; requires mesh_size >= 8K.
/// Eigenfunctions are normalized by the trapezoidal L2 norm.
[[nodiscard]] SpectralOperator sturm_liouville_fd(double L, const std::function<double(double)>& a,
                                                  int mesh_size, int K);

/// Distributed fractional power of the base operator: eigenvalues
/// lambda_k = integral of mu_k^beta d rho(beta).
struct FractionalSpectrum {
  SpectralOperator base;
  DistributedMeasure measure;
  std::vector<double> eigenvalues;  // lambda_k, same order as base modes
};

[[nodiscard]] FractionalSpectrum distributed_eigenvalues(const SpectralOperator& op,
                                                         const DistributedMeasure& rho);

/// Linear observation functional: point evaluation or subinterval mean.
class ObservationFunctional {
 public:
  static ObservationFunctional point_value(double x0);
  static ObservationFunctional subinterval_mean(double a, double b);

  enum class Kind { PointValue, SubintervalMean };
  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] double point() const { return x0_; }
  [[nodiscard]] double lower() const { return a_; }
  [[nodiscard]] double upper() const { return b_; }

 private:
  ObservationFunctional() = default;
  Kind kind_ = Kind::PointValue;
  double x0_ = 0.0;
  double a_ = 0.0;
  double b_ = 0.0;
};

/// Coefficients Phi_k = Phi(v_k) of the functional against the operator's
/// eigenfunctions.  PointValue uses v_k(x0) (x0 must be interior); a
/// SubintervalMean uses the exact sine integrals for analytic operators and
/// trapezoidal quadrature for finite-difference ones.  Throws
/// precondition_error when every coefficient vanishes (unobservable setup).
[[nodiscard]] std::vector<double> functional_coefficients(const SpectralOperator& op,
                                                          const ObservationFunctional& phi);

}  // namespace gfd
