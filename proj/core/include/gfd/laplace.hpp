#pragma once

#include <complex>
#include <functional>

#include "gfd/kernels.hpp"

namespace gfd {

/// Hyperbolic (Talbot-type) contour for inverting Laplace transforms that are
/// analytic off (-inf, vertex_offset].  The contour
///   z(u) = vertex_offset + mu (1 + sin(i u - theta')),  theta' = opening_half_angle - pi/2,
/// wraps the negative real axis; mu scales like 1/t.
struct ContourSpec {
  int node_count = 48;                     // total nodes (conjugate pairs counted)
  double vertex_offset = 0.0;              // omega2 >= 0 for CM-kernel transforms
  double opening_half_angle = 2.7428963;   // pi/2 + 1.1721, in (pi/2, pi)
};

/// Evaluates (1/2 pi i) * integral of e^{st} F(s) ds over the deformed contour
/// by midpoint-trapezoid quadrature in the contour parameter.  F must be
/// analytic right of the contour, decay like C/|s - vertex|, and satisfy the
/// conjugate symmetry F(conj s) = conj F(s) of real-valued time functions
/// (asserted via the imaginary part of the quadrature sum).
///
/// Effective node counts are capped at 48 (24 conjugate pairs): beyond that,
/// double-precision roundoff grows instead of the quadrature error shrinking.
[[nodiscard]] double contour_invert(
    const std::function<std::complex<double>(std::complex<double>)>& F,
    double t, const ContourSpec& spec = {});

/// Mittag-Leffler function E_alpha(z) for alpha in (0, 1] and z <= 0.
/// Power series with a 200-term cap when the largest series term stays below
/// the cancellation guard; otherwise contour inversion of
/// s^{alpha-1}/(s^alpha + |z|) at t = 1.
[[nodiscard]] double mittag_leffler(double alpha, double z);

/// Laplace transform of the per-mode relaxation v + lambda (M * v) = 1:
///   relaxation_hat(s) = 1 / (s (1 + lambda Mhat(s))).
[[nodiscard]] std::complex<double> relaxation_hat(const MemoryKernel& M, double lambda,
                                                  std::complex<double> s);

}  // namespace gfd
