#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "gfd/errors.hpp"
#include "gfd/inverse.hpp"

namespace gfd {

namespace {

double psi_value(const std::vector<MeasureAtom>& atoms, double xi) {
  double acc = 0.0;
  for (const MeasureAtom& a : atoms) acc += a.weight * std::pow(xi, a.exponent);
  return acc;
}

/// Peels atoms largest-exponent first: at each pass the log-log tail of the
/// residual eigenvalues is a line whose slope/intercept give the dominant
/// (beta, kappa); the atom is subtracted and the pass repeats.
std::vector<MeasureAtom> peel_atoms(const std::vector<double>& xi,
                                    const std::vector<double>& lam, std::size_t max_atoms) {
  std::vector<double> R(lam);
  std::vector<MeasureAtom> atoms;
  double lam_max = 0.0;
  for (double v : lam) lam_max = std::max(lam_max, v);

  for (std::size_t peel = 0; peel < max_atoms; ++peel) {
    double r_max = 0.0;
    for (double v : R) r_max = std::max(r_max, v);
    if (r_max < 1e-10 * lam_max) break;

    std::vector<std::size_t> candidates;
    for (std::size_t k = 0; k < R.size(); ++k)
      if (R[k] > 0.02 * r_max) candidates.push_back(k);
    if (candidates.size() < 2) break;
    const std::size_t take = std::min<std::size_t>(8, candidates.size());
    candidates.erase(candidates.begin(), candidates.end() - static_cast<std::ptrdiff_t>(take));

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t k : candidates) {
      const double x = std::log(xi[k]);
      const double y = std::log(R[k]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(candidates.size());
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    if (slope > 1.1 || slope < -0.1) {
      std::ostringstream msg;
      msg << "recover_distributed_measure: log-log slope " << slope
          << " falls outside (0, 1]; the data is inconsistent with a distributed-order "
             "measure on (0, 1]";
      throw numerical_error(msg.str());
    }
    const double beta = std::clamp(slope, 1e-3, 1.0);
    const double kappa = std::exp((sy - slope * sx) / n);
    atoms.push_back(MeasureAtom{beta, kappa});

    double new_max = 0.0;
    for (std::size_t k = 0; k < R.size(); ++k) {
      R[k] -= kappa * std::pow(xi[k], beta);
      new_max = std::max(new_max, R[k]);
    }
    if (new_max >= r_max)
      throw numerical_error(
          "recover_distributed_measure: the residual did not decrease across a peel; more "
          "atoms than the eigenvalue range can resolve");
  }
  return atoms;
}

/// Joint Gauss-Newton refinement of all atoms on the log-misfit
/// sum_k (log Psi(xi_k) - log lambda_k)^2 over (beta_i, log kappa_i).
void gauss_newton_polish(std::vector<MeasureAtom>& atoms, const std::vector<double>& xi,
                         const std::vector<double>& lam) {
  if (atoms.empty()) return;
  const std::size_t K = xi.size();
  const std::size_t n = atoms.size();

  for (int iter = 0; iter < 200; ++iter) {
    Eigen::MatrixXd J(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(2 * n));
    Eigen::VectorXd r(static_cast<Eigen::Index>(K));
    for (std::size_t k = 0; k < K; ++k) {
      double psi = 0.0;
      std::vector<double> terms(n);
      for (std::size_t i = 0; i < n; ++i) {
        terms[i] = atoms[i].weight * std::pow(xi[k], atoms[i].exponent);
        psi += terms[i];
      }
      r(static_cast<Eigen::Index>(k)) = std::log(psi) - std::log(lam[k]);
      for (std::size_t i = 0; i < n; ++i) {
        J(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(2 * i)) =
            terms[i] * std::log(xi[k]) / psi;  // d/d beta_i
        J(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(2 * i + 1)) =
            terms[i] / psi;  // d/d log kappa_i
      }
    }
    Eigen::VectorXd delta = J.colPivHouseholderQr().solve(-r);
    const double dmax = delta.cwiseAbs().maxCoeff();
    if (dmax > 1.0) delta *= 1.0 / dmax;
    for (std::size_t i = 0; i < n; ++i) {
      atoms[i].exponent =
          std::clamp(atoms[i].exponent + delta(static_cast<Eigen::Index>(2 * i)), 1e-4, 1.2);
      atoms[i].weight *= std::exp(delta(static_cast<Eigen::Index>(2 * i + 1)));
    }
    if (dmax < 1e-12) break;
  }
}

std::vector<MeasureAtom> fit_atoms(const std::vector<double>& xi, const std::vector<double>& lam,
                                   std::size_t max_atoms) {
  std::vector<MeasureAtom> atoms = peel_atoms(xi, lam, max_atoms);
  gauss_newton_polish(atoms, xi, lam);
  return atoms;
}

}  // namespace

DistributedMeasure MeasureRecovery::make_measure() const {
  return DistributedMeasure::atoms(atoms);
}

MeasureRecovery recover_distributed_measure(const std::vector<double>& lambda,
                                            const std::vector<double>& mu, bool shift_search,
                                            std::size_t max_atoms) {
  if (lambda.size() != mu.size())
    throw precondition_error("recover_distributed_measure: lambda and mu must pair up");
  if (mu.size() < 8)
    throw precondition_error("recover_distributed_measure: need at least 8 modes");
  if (max_atoms == 0 || max_atoms > 4)
    throw precondition_error("recover_distributed_measure: max_atoms must lie in 1..4");
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (!(mu[k] > 0.0) || (k > 0 && mu[k] <= mu[k - 1]))
      throw precondition_error(
          "recover_distributed_measure: base eigenvalues must be positive and strictly "
          "increasing");
    if (!(lambda[k] > 0.0) || !std::isfinite(lambda[k]))
      throw precondition_error("recover_distributed_measure: eigenvalues must be positive");
  }
  if (mu.back() / mu.front() < 100.0)
    throw precondition_error(
        "recover_distributed_measure: base eigenvalues must span at least two decades "
        "(exponent estimates are unstable otherwise)");

  const std::size_t K = mu.size();
  double eta = 0.0;
  std::vector<MeasureAtom> atoms;

  const auto shifted = [&](double e) {
    std::vector<double> xi(K);
    for (std::size_t k = 0; k < K; ++k) xi[k] = mu[k] + e;
    return xi;
  };

  if (!shift_search) {
    atoms = fit_atoms(shifted(0.0), lambda, max_atoms);
  } else {
    // Alternate: atoms from the tail half (least shift-sensitive), then eta
    // from the strictly increasing scalar map xi -> Psi(xi) at the first
    // mode, until eta settles.
    const std::size_t tail = K / 2;
    const std::vector<double> mu_tail(mu.begin() + static_cast<std::ptrdiff_t>(tail), mu.end());
    const std::vector<double> lam_tail(lambda.begin() + static_cast<std::ptrdiff_t>(tail),
                                       lambda.end());
    for (int round = 0; round < 40; ++round) {
      std::vector<double> xi_tail(mu_tail.size());
      for (std::size_t k = 0; k < mu_tail.size(); ++k) xi_tail[k] = mu_tail[k] + eta;
      atoms = fit_atoms(xi_tail, lam_tail, max_atoms);
      if (atoms.empty())
        throw numerical_error("recover_distributed_measure: no atom survives the tail fit");

      // Bisect Psi(xi) = lambda_1 for xi = mu_1 + eta.
      double lo = 1e-12 * mu.front();
      double hi = 10.0 * mu.back();
      while (psi_value(atoms, hi) < lambda.front() && hi < 1e12 * mu.back()) hi *= 10.0;
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (psi_value(atoms, mid) < lambda.front() ? lo : hi) = mid;
        if (hi - lo < 1e-15 * std::max(1.0, hi)) break;
      }
      const double eta_new = 0.5 * (lo + hi) - mu.front();
      const bool settled = std::abs(eta_new - eta) < 1e-10 * std::max(1.0, std::abs(eta_new));
      eta = eta_new;
      if (settled) break;
    }
    atoms = fit_atoms(shifted(eta), lambda, max_atoms);
  }

  MeasureRecovery out;
  out.eta = shift_search ? eta : 0.0;
  out.peel_count = atoms.size();
  std::sort(atoms.begin(), atoms.end(),
            [](const MeasureAtom& a, const MeasureAtom& b) { return a.exponent < b.exponent; });
  for (MeasureAtom& a : atoms) a.exponent = std::min(a.exponent, 1.0);
  out.atoms = std::move(atoms);

  const std::vector<double> xi = shifted(out.eta);
  for (std::size_t k = 0; k < K; ++k)
    out.residual =
        std::max(out.residual, std::abs(psi_value(out.atoms, xi[k]) - lambda[k]) / lambda[k]);
  return out;
}

}  // namespace gfd
