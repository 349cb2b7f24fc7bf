#pragma once

#include <functional>
#include <vector>

namespace gfd {

/// One atom of a discrete Borel measure on the exponent interval (0, 1]:
/// weight * delta(exponent).
struct MeasureAtom {
  double exponent;
  double weight;
};

/// Nonnegative Borel measure on (0, 1], either purely atomic or given by a
/// nonnegative density integrated with Gauss-Legendre quadrature.  Used both
/// for distributed-order memory kernels (measure over the order alpha) and
/// for distributed fractional powers of the spatial operator (measure over
/// the power beta).
class DistributedMeasure {
 public:
  /// Atomic measure.  Exponents must be strictly increasing, inside (0, 1],
  /// with strictly positive weights.
  static DistributedMeasure atoms(std::vector<MeasureAtom> atom_list);

  /// Absolutely continuous measure with the given density on (0, 1).
  /// The density must be nonnegative (spot-checked on the quadrature nodes)
  /// and not identically zero.
  static DistributedMeasure density(std::function<double(double)> density_fn,
                                    int quadrature_order = 64);

  [[nodiscard]] bool is_atomic() const { return density_ == nullptr; }
  [[nodiscard]] const std::vector<MeasureAtom>& atom_list() const { return atoms_; }
  [[nodiscard]] int quadrature_order() const { return quadrature_order_; }

  /// Integral of f against the measure: sum over atoms, or Gauss-Legendre
  /// quadrature of f(x) * density(x) over (0, 1).
  [[nodiscard]] double integrate(const std::function<double(double)>& f) const;

 private:
  DistributedMeasure() = default;

  std::vector<MeasureAtom> atoms_;
  std::function<double(double)> density_;
  int quadrature_order_ = 0;
  std::vector<double> quad_nodes_;    // on (0, 1)
  std::vector<double> quad_weights_;  // density premultiplied is NOT cached
};

namespace detail {
/// Gauss-Legendre nodes and weights on (-1, 1), Golub-Welsch via the
/// symmetric tridiagonal Jacobi matrix.
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);
}  // namespace detail

}  // namespace gfd
