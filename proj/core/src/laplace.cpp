#include "gfd/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gfd/errors.hpp"

namespace gfd {

namespace {

// Weideman-Trefethen tuning for the hyperbolic contour at midpoint nodes.
constexpr double kStepScale = 1.0818;
constexpr double kMuScale = 4.4921;
constexpr int kMaxPairs = 24;

}  // namespace

double contour_invert(const std::function<std::complex<double>(std::complex<double>)>& F,
                      double t, const ContourSpec& spec) {
  if (!(t > 0.0)) throw domain_error("contour_invert: t must be positive");
  if (spec.node_count < 8)
    throw precondition_error("contour_invert: node_count must be >= 8");
  if (!(spec.opening_half_angle > std::numbers::pi / 2.0 &&
        spec.opening_half_angle < std::numbers::pi))
    throw precondition_error("contour_invert: opening half-angle must lie in (pi/2, pi)");

  const int pairs = std::min(spec.node_count / 2, kMaxPairs);
  const double h = kStepScale / static_cast<double>(pairs);
  const double mu = kMuScale * static_cast<double>(pairs) / t;
  const double theta = spec.opening_half_angle - std::numbers::pi / 2.0;

  // Midpoint nodes u = +-(j + 1/2) h; both half-contours are evaluated so the
  // conjugate-symmetry assertion below is meaningful for unsymmetric F.
  std::complex<double> sum = 0.0;
  for (int j = 0; j < pairs; ++j) {
    const double u = (static_cast<double>(j) + 0.5) * h;
    for (const double sign : {1.0, -1.0}) {
      const std::complex<double> iu(0.0, sign * u);
      const std::complex<double> z =
          spec.vertex_offset + mu * (1.0 + std::sin(iu - theta));
      // s'(u) = i mu cos(iu - theta) on both half-contours; the node sign is
      // already inside iu.
      const std::complex<double> dz = std::complex<double>(0.0, 1.0) * mu * std::cos(iu - theta);
      std::complex<double> Fz;
      try {
        Fz = F(z);
      } catch (const std::exception& e) {
        throw numerical_error("contour_invert: transform evaluation failed at node z=(" +
                              std::to_string(z.real()) + "," + std::to_string(z.imag()) +
                              "): " + e.what());
      }
      sum += std::exp(z * t) * Fz * dz;
    }
  }
  // (1/2 pi i) * h * sum; division by i maps the sum's imaginary part to the result.
  const std::complex<double> result = sum * h / (2.0 * std::numbers::pi * std::complex<double>(0.0, 1.0));
  if (!std::isfinite(result.real()) || !std::isfinite(result.imag()))
    throw numerical_error("contour_invert: quadrature sum diverged");
  if (std::abs(result.imag()) > 1e-8 * (1.0 + std::abs(result.real())))
    throw numerical_error(
        "contour_invert: imaginary residue exceeds tolerance; transform lacks conjugate symmetry");
  return result.real();
}

double mittag_leffler(double alpha, double z) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw domain_error("mittag_leffler: alpha must lie in (0, 1]");
  if (z > 0.0) throw domain_error("mittag_leffler: defined here for z <= 0 only");
  if (z == 0.0) return 1.0;

  const double x = -z;
  // Peak log-magnitude of the series terms; if summing them costs more than
  // ~1e-10 absolute accuracy in doubles, switch to the contour route.
  double peak = 0.0;
  const double logx = std::log(x);
  for (int n = 1; n <= 200; ++n) {
    const double lt = static_cast<double>(n) * logx - std::lgamma(alpha * n + 1.0);
    peak = std::max(peak, lt);
    if (lt < peak - 40.0) break;
  }
  if (x <= 5.0 && peak < 12.0) {
    double sum = 1.0, term = 1.0;
    for (int n = 1; n <= 200; ++n) {
      term = std::pow(-x, n);
      const double denom = std::tgamma(alpha * n + 1.0);
      const double contrib = term / denom;
      sum += contrib;
      if (std::abs(contrib) < 1e-18 * std::max(1.0, std::abs(sum)) && n > 4) break;
    }
    return sum;
  }
  // E_alpha(-x) = L^{-1}[ s^{alpha-1} / (s^alpha + x) ] evaluated at t = 1.
  auto F = [alpha, x](std::complex<double> s) {
    const std::complex<double> sa = std::pow(s, alpha);
    return std::pow(s, alpha - 1.0) / (sa + x);
  };
  return contour_invert(F, 1.0);
}

std::complex<double> relaxation_hat(const MemoryKernel& M, double lambda,
                                    std::complex<double> s) {
  if (lambda < 0.0) throw precondition_error("relaxation_hat: lambda must be >= 0");
  const std::complex<double> denom = 1.0 + lambda * M.laplace(s);
  if (std::abs(denom) < 1e-14)
    throw numerical_error("relaxation_hat: pole at s=(" + std::to_string(s.real()) + "," +
                          std::to_string(s.imag()) + ")");
  return 1.0 / (s * denom);
}

}  // namespace gfd
