#include "gfd/nnls.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "gfd/errors.hpp"

namespace gfd {

Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                     int max_iterations) {
  const Eigen::Index n = A.cols();
  if (A.rows() != b.size()) throw precondition_error("nnls: dimension mismatch");
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n + 30);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd w = A.transpose() * (b - A * x);

  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     A.cwiseAbs().colwise().sum().maxCoeff() * static_cast<double>(A.rows());

  auto solve_passive = [&](Eigen::VectorXd& z) {
    // Least squares on the passive columns; inactive entries get zero.
    std::vector<Eigen::Index> idx;
    for (Eigen::Index j = 0; j < n; ++j)
      if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
    z = Eigen::VectorXd::Zero(n);
    if (idx.empty()) return;
    Eigen::MatrixXd Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(static_cast<Eigen::Index>(k)) = A.col(idx[k]);
    Eigen::VectorXd zp = Ap.colPivHouseholderQr().solve(b);
    for (std::size_t k = 0; k < idx.size(); ++k) z(idx[k]) = zp(static_cast<Eigen::Index>(k));
  };

  for (int outer = 0; outer < max_iterations; ++outer) {
    // Most-violating inactive coordinate.
    Eigen::Index best = -1;
    double best_w = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && w(j) > best_w) {
        best_w = w(j);
        best = j;
      }
    }
    if (best < 0) break;  // KKT satisfied
    passive[static_cast<std::size_t>(best)] = true;

    Eigen::VectorXd z;
    solve_passive(z);
    // Inner loop: back off along x -> z until the passive set is feasible.
    int guard = 0;
    while (true) {
      double zmin = std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[static_cast<std::size_t>(j)]) zmin = std::min(zmin, z(j));
      if (zmin > 0.0) break;
      double step = 1.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && z(j) <= 0.0) {
          const double denom = x(j) - z(j);
          if (denom > 0.0) step = std::min(step, x(j) / denom);
        }
      }
      x += step * (z - x);
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)] && x(j) <= tol) {
          passive[static_cast<std::size_t>(j)] = false;
          x(j) = 0.0;
        }
      }
      solve_passive(z);
      if (++guard > static_cast<int>(n) + 8)
        throw numerical_error("nnls: inner feasibility loop failed to terminate");
    }
    x = z;
    w = A.transpose() * (b - A * x);
  }
  return x;
}

}  // namespace gfd
