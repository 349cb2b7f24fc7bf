#include "gfd/kernels.hpp"

#include <algorithm>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gfd/errors.hpp"

namespace gfd {

namespace {

/// b^p - a^p for 0 <= a < b, computed without cancellation for a ~ b.
double power_diff(double a, double b, double p) {
  if (a <= 0.0) return std::pow(b, p);
  return std::pow(a, p) * std::expm1(p * std::log1p((b - a) / a));
}

/// Difference P(a, x1) - P(a, x0) of the regularized lower incomplete gamma,
/// switching to the upper tail when both arguments are deep in it.
double gamma_p_diff(double a, double x0, double x1) {
  if (x0 <= 0.0) return boost::math::gamma_p(a, x1);
  if (boost::math::gamma_p(a, x0) > 0.5)
    return boost::math::gamma_q(a, x0) - boost::math::gamma_q(a, x1);
  return boost::math::gamma_p(a, x1) - boost::math::gamma_p(a, x0);
}

double falling_factorial(double x, int m) {
  double p = 1.0;
  for (int i = 0; i < m; ++i) p *= (x - static_cast<double>(i));
  return p;
}

double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i)
    b *= static_cast<double>(n - k + i) / static_cast<double>(i);
  return b;
}

}  // namespace

// ---------------------------------------------------------------- factories

MemoryKernel MemoryKernel::power_law(double c, double alpha) {
  if (!(c > 0.0)) throw precondition_error("MemoryKernel: scale c must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw precondition_error("MemoryKernel: alpha must lie strictly inside (0, 1)");
  MemoryKernel m;
  m.family_ = KernelFamily::PowerLaw;
  m.c_ = c;
  m.alpha_ = alpha;
  return m;
}

MemoryKernel MemoryKernel::tempered(double c, double alpha, double rate) {
  if (!(c > 0.0)) throw precondition_error("MemoryKernel: scale c must be positive");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw precondition_error("MemoryKernel: alpha must lie strictly inside (0, 1)");
  if (!(rate > 0.0)) throw precondition_error("MemoryKernel: tempering rate must be positive");
  MemoryKernel m;
  m.family_ = KernelFamily::Tempered;
  m.c_ = c;
  m.alpha_ = alpha;
  m.rate_ = rate;
  return m;
}

MemoryKernel MemoryKernel::distributed_order(DistributedOrderMeasure measure) {
  MemoryKernel m;
  m.family_ = KernelFamily::DistributedOrder;
  m.measure_ = std::move(measure);
  return m;
}

MemoryKernel MemoryKernel::tabulated(TimeGrid grid, std::vector<double> values) {
  if (values.size() != grid.node_count())
    throw precondition_error("MemoryKernel: tabulated values must cover every grid node");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw precondition_error("MemoryKernel: tabulated values must be strictly positive");
    if (i > 0 && values[i] > values[i - 1] * (1.0 + 1e-12))
      throw precondition_error("MemoryKernel: tabulated values must be non-increasing");
  }
  MemoryKernel m;
  m.family_ = KernelFamily::Tabulated;
  m.table_times_.resize(grid.node_count());
  for (std::size_t i = 0; i < grid.node_count(); ++i) m.table_times_[i] = grid.time(i);
  m.table_values_ = std::move(values);
  m.table_log_slope_.resize(grid.cell_count());
  const double h = grid.step();
  for (std::size_t i = 0; i < grid.cell_count(); ++i)
    m.table_log_slope_[i] = std::log(m.table_values_[i + 1] / m.table_values_[i]) / h;
  return m;
}

const DistributedOrderMeasure& MemoryKernel::measure() const {
  if (family_ != KernelFamily::DistributedOrder)
    throw unsupported_variant_error("MemoryKernel: measure() requires DistributedOrder");
  return measure_;
}

// --------------------------------------------------------------- evaluation

double MemoryKernel::operator()(double t) const {
  if (!(t > 0.0)) throw domain_error("MemoryKernel: evaluation requires t > 0");
  switch (family_) {
    case KernelFamily::PowerLaw:
      return c_ * std::pow(t, alpha_ - 1.0) / std::tgamma(alpha_);
    case KernelFamily::Tempered:
      return c_ * std::pow(t, alpha_ - 1.0) * std::exp(-rate_ * t) / std::tgamma(alpha_);
    case KernelFamily::DistributedOrder:
      return measure_.integrate(
          [t](double a) { return std::pow(t, a - 1.0) / std::tgamma(a); });
    case KernelFamily::Tabulated: {
      if (t > table_times_.back() * (1.0 + 1e-12))
        throw domain_error("MemoryKernel: tabulated evaluation beyond table range");
      const double tmax = table_times_.back();
      const double tc = std::min(t, tmax);
      const double h = table_times_[1] - table_times_[0];
      auto i = static_cast<std::size_t>(tc / h);
      if (i >= table_log_slope_.size()) i = table_log_slope_.size() - 1;
      return table_values_[i] * std::exp(table_log_slope_[i] * (tc - table_times_[i]));
    }
  }
  throw numerical_error("MemoryKernel: unreachable family");
}

std::complex<double> MemoryKernel::laplace(std::complex<double> s) const {
  if (s.imag() == 0.0 && s.real() <= 0.0)
    throw domain_error("MemoryKernel: Laplace transform on the branch cut (-inf, 0]");
  switch (family_) {
    case KernelFamily::PowerLaw:
      return c_ * std::pow(s, -alpha_);
    case KernelFamily::Tempered:
      return c_ * std::pow(s + rate_, -alpha_);
    case KernelFamily::DistributedOrder: {
      // integral of s^{-alpha} d measure(alpha); complex result assembled from
      // the real integrals of the modulus/phase decomposition.
      const std::complex<double> logs = std::log(s);
      const double re = measure_.integrate([&](double a) {
        return std::exp(-a * logs.real()) * std::cos(a * logs.imag());
      });
      const double im = measure_.integrate([&](double a) {
        return -std::exp(-a * logs.real()) * std::sin(a * logs.imag());
      });
      return {re, im};
    }
    case KernelFamily::Tabulated: {
      // Exact transform of the piecewise-exponential interpolant over the
      // table range; the tail beyond the table is dropped (approximate).
      std::complex<double> acc = 0.0;
      for (std::size_t i = 0; i < table_log_slope_.size(); ++i) {
        const double a = table_times_[i], b = table_times_[i + 1];
        // integrand on the cell: A exp(B (t-a)) exp(-s t), A = value at a
        const std::complex<double> e = table_log_slope_[i] - s;
        const std::complex<double> front = table_values_[i] * std::exp(-s * a);
        if (std::abs(e) * (b - a) < 1e-12) {
          acc += front * (b - a);
        } else {
          acc += front * (std::exp(e * (b - a)) - 1.0) / e;
        }
      }
      return acc;
    }
  }
  throw numerical_error("MemoryKernel: unreachable family");
}

// ------------------------------------------------------------- cell moments

void MemoryKernel::cell_moments(double a, double b, double& m0, double& m1) const {
  if (!(a >= 0.0 && b > a))
    throw precondition_error("MemoryKernel: cell moments need 0 <= a < b");
  switch (family_) {
    case KernelFamily::PowerLaw: {
      m0 = c_ * power_diff(a, b, alpha_) / std::tgamma(alpha_ + 1.0);
      m1 = c_ * alpha_ * power_diff(a, b, alpha_ + 1.0) / std::tgamma(alpha_ + 2.0);
      return;
    }
    case KernelFamily::Tempered: {
      const double r = rate_;
      m0 = c_ * std::pow(r, -alpha_) * gamma_p_diff(alpha_, r * a, r * b);
      m1 = c_ * alpha_ * std::pow(r, -alpha_ - 1.0) *
           gamma_p_diff(alpha_ + 1.0, r * a, r * b);
      return;
    }
    case KernelFamily::DistributedOrder: {
      m0 = measure_.integrate([a, b](double al) {
        return power_diff(a, b, al) / std::tgamma(al + 1.0);
      });
      m1 = measure_.integrate([a, b](double al) {
        return al * power_diff(a, b, al + 1.0) / std::tgamma(al + 2.0);
      });
      return;
    }
    case KernelFamily::Tabulated: {
      if (b > table_times_.back() * (1.0 + 1e-12))
        throw domain_error("MemoryKernel: cell moments beyond table range");
      m0 = 0.0;
      m1 = 0.0;
      const double h = table_times_[1] - table_times_[0];
      auto first = static_cast<std::size_t>(a / h);
      if (first >= table_log_slope_.size()) first = table_log_slope_.size() - 1;
      for (std::size_t i = first; i < table_log_slope_.size(); ++i) {
        const double lo = std::max(a, table_times_[i]);
        const double hi = std::min(b, table_times_[i + 1]);
        if (hi <= lo) {
          if (table_times_[i] > b) break;
          continue;
        }
        const double A = table_values_[i];
        const double B = table_log_slope_[i];
        const double u = lo - table_times_[i];
        const double v = hi - table_times_[i];
        double seg0, segphi;  // integral of A e^{B phi}, and of A phi e^{B phi}
        if (std::abs(B) * (v - u) < 1e-12) {
          const double mid = 0.5 * (u + v);
          const double val = A * std::exp(B * mid);
          seg0 = val * (v - u);
          segphi = val * 0.5 * (v * v - u * u);
        } else {
          const double eu = std::exp(B * u), ev = std::exp(B * v);
          seg0 = A * (ev - eu) / B;
          segphi = A * ((v * ev - u * eu) / B - (ev - eu) / (B * B));
        }
        m0 += seg0;
        m1 += segphi + table_times_[i] * seg0;
      }
      return;
    }
  }
  throw numerical_error("MemoryKernel: unreachable family");
}

// ---------------------------------------------------------------- Bernstein

double BernsteinRepresentation::reconstruct(double t) const {
  if (!(t > 0.0)) throw domain_error("BernsteinRepresentation: t must be positive");
  boost::math::quadrature::exp_sinh<double> integrator;
  const double shift = tau_min;
  auto f = [&](double sigma) { return std::exp(-t * sigma) * density(sigma + shift); };
  double err = 0.0;
  const double value = integrator.integrate(f, 1e-12, &err);
  return std::exp(-t * shift) * value;
}

BernsteinRepresentation MemoryKernel::bernstein_representation() const {
  if (family_ != KernelFamily::PowerLaw && family_ != KernelFamily::Tempered)
    throw unsupported_variant_error(
        "MemoryKernel: Bernstein representation supports PowerLaw and Tempered only");
  BernsteinRepresentation rep;
  const double c = c_, alpha = alpha_;
  const double factor = c * std::sin(std::numbers::pi * alpha) / std::numbers::pi;
  if (family_ == KernelFamily::PowerLaw) {
    rep.tau_min = 0.0;
    rep.density = [factor, alpha](double tau) {
      if (tau <= 0.0) return 0.0;
      return factor * std::pow(tau, -alpha);
    };
  } else {
    const double rate = rate_;
    rep.tau_min = rate;
    rep.density = [factor, alpha, rate](double tau) {
      if (tau <= rate) return 0.0;
      return factor * std::pow(tau - rate, -alpha);
    };
  }
  return rep;
}

// ---------------------------------------------------- complete monotonicity

std::vector<MonotonicityViolation> MemoryKernel::check_complete_monotonicity(
    int n_max, const TimeGrid& grid, double tolerance) const {
  if (n_max < 0) throw precondition_error("check_complete_monotonicity: n_max >= 0");
  const bool analytic =
      family_ == KernelFamily::PowerLaw || family_ == KernelFamily::Tempered;
  if (!analytic && n_max > 4)
    throw precondition_error(
        "check_complete_monotonicity: finite-difference variants support n_max <= 4");

  std::vector<MonotonicityViolation> out;
  for (std::size_t i = 1; i <= grid.cell_count(); ++i) {
    const double t = grid.time(i);
    for (int n = 0; n <= n_max; ++n) {
      double signed_value;  // (-1)^n M^(n)(t)
      if (family_ == KernelFamily::PowerLaw) {
        const double dn = falling_factorial(alpha_ - 1.0, n) * std::pow(t, alpha_ - 1.0 - n);
        signed_value = (n % 2 ? -1.0 : 1.0) * c_ * dn / std::tgamma(alpha_);
      } else if (family_ == KernelFamily::Tempered) {
        double dn = 0.0;
        for (int m = 0; m <= n; ++m)
          dn += binomial(n, m) * falling_factorial(alpha_ - 1.0, m) *
                std::pow(t, alpha_ - 1.0 - m) * std::pow(-rate_, n - m);
        dn *= std::exp(-rate_ * t);
        signed_value = (n % 2 ? -1.0 : 1.0) * c_ * dn / std::tgamma(alpha_);
      } else {
        const double h = t / 100.0;
        const double half = 0.5 * static_cast<double>(n);
        const double lo = t - half * h;
        const double hi = t + half * h;
        if (lo <= 0.0) continue;
        if (family_ == KernelFamily::Tabulated && hi > table_times_.back()) continue;
        double diff = 0.0;
        for (int m = 0; m <= n; ++m) {
          const double node = t + (half - static_cast<double>(m)) * h;
          diff += (m % 2 ? -1.0 : 1.0) * binomial(n, m) * (*this)(node);
        }
        signed_value = (n % 2 ? -1.0 : 1.0) * diff / std::pow(h, n);
      }
      if (signed_value < -tolerance) out.push_back({n, t, signed_value});
    }
  }
  return out;
}

// ------------------------------------------------------------------- Sonine

SoninePartner sonine_partner(const MemoryKernel& M, const TimeGrid& grid) {
  const bool singular_at_zero = [&] {
    switch (M.family()) {
      case KernelFamily::PowerLaw:
      case KernelFamily::Tempered:
        return true;
      case KernelFamily::DistributedOrder: {
        for (const auto& a : M.measure().atom_list())
          if (a.exponent < 1.0) return true;
        return !M.measure().is_atomic();
      }
      case KernelFamily::Tabulated:
        return false;  // finite samples cannot certify a singularity
    }
    return false;
  }();
  if (!singular_at_zero)
    throw precondition_error(
        "sonine_partner: kernel must have an integrable singularity at t=0");

  const std::size_t N = grid.cell_count();
  const double h = grid.step();

  // Lag table of exact zeroth moments: m0[L] = integral of M over [Lh, (L+1)h].
  std::vector<double> m0(N);
  for (std::size_t L = 0; L < N; ++L) {
    double a0 = static_cast<double>(L) * h;
    double b0 = static_cast<double>(L + 1) * h;
    double mm0, mm1;
    M.cell_moments(a0, b0, mm0, mm1);
    m0[L] = mm0;
  }
  if (!(m0[0] > std::numeric_limits<double>::min() * 1e4))
    throw ill_conditioning_error("sonine_partner: vanishing leading kernel moment");

  // March the lower-triangular system sum_L m0[L] K[n-1-L] = 1.
  std::vector<double> K(N);
  for (std::size_t n = 1; n <= N; ++n) {
    double acc = 0.0;
    for (std::size_t L = 1; L < n; ++L) acc += m0[L] * K[n - 1 - L];
    K[n - 1] = (1.0 - acc) / m0[0];
    if (!std::isfinite(K[n - 1]))
      throw ill_conditioning_error("sonine_partner: triangular solve produced non-finite value");
  }

  double residual = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    double conv = 0.0;
    for (std::size_t L = 0; L < n; ++L) conv += m0[L] * K[n - 1 - L];
    residual = std::max(residual, std::abs(conv - 1.0));
  }
  return SoninePartner{grid, std::move(K), residual};
}

}  // namespace gfd
