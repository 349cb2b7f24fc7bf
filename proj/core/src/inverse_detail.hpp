#pragma once

// Helpers shared by the inverse-problem translation units.  Internal: not
// installed, not part of the library interface.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "gfd/grid.hpp"

namespace gfd::detail {

/// Geometry of the observation window [t1, T] on the run grid.
struct WindowLayout {
  std::size_t n1 = 0;   // gap end index on the run grid
  std::size_t Nw = 0;   // window cell count
  double h = 0.0;       // shared step
  TimeGrid window_grid; // uniform grid on [0, T - t1]
};

[[nodiscard]] WindowLayout window_layout(const TimeGrid& grid);

/// Completely monotone dictionary rates for kernel deconvolution on a window
/// of length Tw with step h: {0} plus a geometric sweep from 0.1/Tw (slower
/// than the window) to 16/h (faster than the grid resolves), six per decade.
[[nodiscard]] std::vector<double> dictionary_rates(double Tw, double h);

/// Exponential-sum surrogate rates for continuation fits on an interval of
/// length `span`: {0} plus a geometric sweep from 0.1/span to 50/span.
[[nodiscard]] std::vector<double> surrogate_rates(double span);

/// Product-integration lag weights of the kernel e^{-r t} on a uniform grid:
/// (e_r * g)(t_n) = sum_{L=0}^{n-1} A[L] g_{n-1-L} + B[L] g_{n-L}.
void exponential_lag_tables(double r, double h, std::size_t cells, std::vector<double>& A,
                            std::vector<double>& B);

/// Full discrete convolution (e_r * g) at nodes 0..cells for node samples g.
[[nodiscard]] std::vector<double> exponential_convolution(double r, double h,
                                                          const std::vector<double>& g);

/// Ridge-regularized least squares: minimizes ||A x - b||^2 + ridge ||x||^2.
[[nodiscard]] Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                          double ridge);

}  // namespace gfd::detail
