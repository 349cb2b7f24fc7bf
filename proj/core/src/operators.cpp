#include "gfd/operators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <string>

#include "gfd/errors.hpp"

namespace gfd {

double SpectralOperator::eigenfunction(int k, double x) const {
  if (k < 0 || k >= mode_count())
    throw precondition_error("SpectralOperator: mode index out of range");
  if (x < 0.0 || x > L_)
    throw domain_error("SpectralOperator: x outside [0, L]");
  if (analytic_) {
    const double kk = static_cast<double>(k + 1);
    return std::sqrt(2.0 / L_) * std::sin(kk * std::numbers::pi * x / L_);
  }
  // Linear interpolation of the interior mesh samples; ends are zero.
  const double h = L_ / static_cast<double>(mesh_size_);
  const auto& v = fd_modes_[static_cast<std::size_t>(k)];
  const double pos = x / h;
  auto cell = static_cast<long>(pos);
  if (cell >= mesh_size_) cell = mesh_size_ - 1;
  const double frac = pos - static_cast<double>(cell);
  auto node_value = [&](long i) -> double {
    if (i <= 0 || i >= mesh_size_) return 0.0;
    return v[static_cast<std::size_t>(i - 1)];
  };
  return (1.0 - frac) * node_value(cell) + frac * node_value(cell + 1);
}

SpectralOperator dirichlet_eigenpairs(double L, double a, int K) {
  if (!(L > 0.0)) throw precondition_error("dirichlet_eigenpairs: L must be positive");
  if (K < 1) throw precondition_error("dirichlet_eigenpairs: need K >= 1 modes");
  if (a > 0.0)
    throw precondition_error("dirichlet_eigenpairs: potential must satisfy a <= 0");
  SpectralOperator op;
  op.L_ = L;
  op.analytic_ = true;
  op.const_potential_ = a;
  op.mu_.resize(static_cast<std::size_t>(K));
  for (int k = 1; k <= K; ++k) {
    const double w = static_cast<double>(k) * std::numbers::pi / L;
    op.mu_[static_cast<std::size_t>(k - 1)] = w * w - a;
  }
  return op;
}

SpectralOperator sturm_liouville_fd(double L, const std::function<double(double)>& a,
                                    int mesh_size, int K) {
  if (!(L > 0.0)) throw precondition_error("sturm_liouville_fd: L must be positive");
  if (K < 1) throw precondition_error("sturm_liouville_fd: need K >= 1 modes");
  if (mesh_size < 8 * K)
    throw precondition_error("sturm_liouville_fd: resolution guard requires mesh_size >= 8K");

  const int n = mesh_size - 1;  // interior nodes
  const double h = L / static_cast<double>(mesh_size);
  Eigen::VectorXd diag(n), sub(n - 1);
  for (int i = 1; i <= n; ++i) {
    const double x = static_cast<double>(i) * h;
    const double ax = a(x);
    if (ax > 0.0)
      throw precondition_error("sturm_liouville_fd: potential must satisfy a(x) <= 0, violated at x=" +
                               std::to_string(x));
    diag(i - 1) = 2.0 / (h * h) - ax;
  }
  sub.setConstant(-1.0 / (h * h));

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw numerical_error("sturm_liouville_fd: eigensolver failed");

  SpectralOperator op;
  op.L_ = L;
  op.analytic_ = false;
  op.mesh_size_ = mesh_size;
  op.mu_.resize(static_cast<std::size_t>(K));
  op.fd_modes_.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    op.mu_[static_cast<std::size_t>(k)] = solver.eigenvalues()(k);
    Eigen::VectorXd v = solver.eigenvectors().col(k);
    // Trapezoidal L2 norm on [0, L] with zero boundary values.
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) norm2 += v(i) * v(i) * h;
    v /= std::sqrt(norm2);
    if (v(0) < 0.0) v = -v;  // sign convention: positive slope at x=0
    op.fd_modes_[static_cast<std::size_t>(k)].assign(v.data(), v.data() + n);
  }
  return op;
}

FractionalSpectrum distributed_eigenvalues(const SpectralOperator& op,
                                           const DistributedMeasure& rho) {
  FractionalSpectrum spec{op, rho, {}};
  spec.eigenvalues.resize(static_cast<std::size_t>(op.mode_count()));
  for (int k = 0; k < op.mode_count(); ++k) {
    const double mu = op.eigenvalues()[static_cast<std::size_t>(k)];
    if (!(mu > 0.0))
      throw precondition_error("distributed_eigenvalues: base eigenvalues must be positive");
    spec.eigenvalues[static_cast<std::size_t>(k)] =
        rho.integrate([mu](double beta) { return std::pow(mu, beta); });
  }
  return spec;
}

ObservationFunctional ObservationFunctional::point_value(double x0) {
  ObservationFunctional f;
  f.kind_ = Kind::PointValue;
  f.x0_ = x0;
  return f;
}

ObservationFunctional ObservationFunctional::subinterval_mean(double a, double b) {
  if (!(a < b)) throw precondition_error("ObservationFunctional: need a < b");
  ObservationFunctional f;
  f.kind_ = Kind::SubintervalMean;
  f.a_ = a;
  f.b_ = b;
  return f;
}

std::vector<double> functional_coefficients(const SpectralOperator& op,
                                            const ObservationFunctional& phi) {
  const int K = op.mode_count();
  std::vector<double> coeffs(static_cast<std::size_t>(K), 0.0);
  if (phi.kind() == ObservationFunctional::Kind::PointValue) {
    const double x0 = phi.point();
    if (!(x0 > 0.0 && x0 < op.length()))
      throw precondition_error("functional_coefficients: point must be interior to (0, L)");
    for (int k = 0; k < K; ++k) coeffs[static_cast<std::size_t>(k)] = op.eigenfunction(k, x0);
  } else {
    const double a = phi.lower(), b = phi.upper();
    if (a < 0.0 || b > op.length())
      throw precondition_error("functional_coefficients: subinterval outside [0, L]");
    // Mean of v_k over [a, b]; exact for sine modes, trapezoid otherwise.
    for (int k = 0; k < K; ++k) {
      double integral;
      if (op.is_analytic()) {
        const double w = static_cast<double>(k + 1) * std::numbers::pi / op.length();
        integral = std::sqrt(2.0 / op.length()) * (std::cos(w * a) - std::cos(w * b)) / w;
      } else {
        const int quad_points = 2048;
        const double dx = (b - a) / quad_points;
        double acc = 0.5 * (op.eigenfunction(k, a) + op.eigenfunction(k, b));
        for (int i = 1; i < quad_points; ++i) acc += op.eigenfunction(k, a + dx * i);
        integral = acc * dx;
      }
      coeffs[static_cast<std::size_t>(k)] = integral / (b - a);
    }
  }
  bool any = false;
  for (double c : coeffs)
    if (std::abs(c) > 1e-14) any = true;
  if (!any)
    throw precondition_error("functional_coefficients: functional annihilates every computed mode");
  return coeffs;
}

}  // namespace gfd
