#include "gfd/measure.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <string>

#include "gfd/errors.hpp"

namespace gfd {

namespace detail {

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
  if (order < 1) throw precondition_error("gauss_legendre: order must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(order);
  Eigen::VectorXd sub(order > 1 ? order - 1 : 0);
  for (int k = 1; k < order; ++k) {
    const double kk = static_cast<double>(k);
    sub(k - 1) = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw numerical_error("gauss_legendre: tridiagonal eigensolver failed");
  nodes.resize(order);
  weights.resize(order);
  for (int k = 0; k < order; ++k) {
    nodes[k] = solver.eigenvalues()(k);
    const double v0 = solver.eigenvectors()(0, k);
    weights[k] = 2.0 * v0 * v0;
  }
}

}  // namespace detail

DistributedMeasure DistributedMeasure::atoms(std::vector<MeasureAtom> atom_list) {
  if (atom_list.empty())
    throw precondition_error("DistributedMeasure: at least one atom required");
  double prev = 0.0;
  for (const auto& a : atom_list) {
    if (!(a.exponent > 0.0) || a.exponent > 1.0)
      throw precondition_error("DistributedMeasure: atom exponent " +
                               std::to_string(a.exponent) + " outside (0, 1]");
    if (!(a.exponent > prev))
      throw precondition_error("DistributedMeasure: atom exponents must be strictly increasing");
    if (!(a.weight > 0.0))
      throw precondition_error("DistributedMeasure: atom weights must be positive");
    prev = a.exponent;
  }
  DistributedMeasure m;
  m.atoms_ = std::move(atom_list);
  return m;
}

DistributedMeasure DistributedMeasure::density(std::function<double(double)> density_fn,
                                               int quadrature_order) {
  if (!density_fn) throw precondition_error("DistributedMeasure: null density");
  if (quadrature_order < 2)
    throw precondition_error("DistributedMeasure: quadrature order must be >= 2");
  DistributedMeasure m;
  std::vector<double> x, w;
  detail::gauss_legendre(quadrature_order, x, w);
  m.quad_nodes_.resize(x.size());
  m.quad_weights_.resize(x.size());
  double mass = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m.quad_nodes_[i] = 0.5 * (x[i] + 1.0);  // map (-1,1) -> (0,1)
    m.quad_weights_[i] = 0.5 * w[i];
    const double d = density_fn(m.quad_nodes_[i]);
    if (d < 0.0)
      throw precondition_error("DistributedMeasure: density negative at " +
                               std::to_string(m.quad_nodes_[i]));
    mass += m.quad_weights_[i] * d;
  }
  if (!(mass > 0.0))
    throw precondition_error("DistributedMeasure: density is identically zero on (0,1)");
  m.density_ = std::move(density_fn);
  m.quadrature_order_ = quadrature_order;
  return m;
}

double DistributedMeasure::integrate(const std::function<double(double)>& f) const {
  if (is_atomic()) {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.weight * f(a.exponent);
    return s;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < quad_nodes_.size(); ++i)
    s += quad_weights_[i] * density_(quad_nodes_[i]) * f(quad_nodes_[i]);
  return s;
}

}  // namespace gfd
