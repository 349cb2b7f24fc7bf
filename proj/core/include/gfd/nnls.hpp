#pragma once

#include <Eigen/Dense>

namespace gfd {

/// Nonnegative least squares: minimizes ||A x - b||_2 subject to x >= 0 by the
/// Lawson-Hanson active-set method.  Deterministic; suitable for the small
/// dense dictionary systems used in kernel recovery (hundreds of rows, tens
/// of columns).
[[nodiscard]] Eigen::VectorXd nnls(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                   int max_iterations = 0);

}  // namespace gfd
