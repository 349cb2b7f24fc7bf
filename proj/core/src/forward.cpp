#include "gfd/forward.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>
#include <utility>

#include <Eigen/Dense>

#include "gfd/errors.hpp"

namespace gfd {

namespace {

void check_mode_values(const TimeGrid& grid, const std::vector<std::vector<double>>& mode_values) {
  if (mode_values.empty())
    throw precondition_error("source model: at least one mode row is required");
  for (const std::vector<double>& row : mode_values)
    if (row.size() != grid.node_count())
      throw precondition_error("source model: every mode row must have one sample per grid node");
}

void check_gap(const TimeGrid& grid, const std::vector<std::vector<double>>& mode_values) {
  for (std::size_t k = 0; k < mode_values.size(); ++k)
    for (std::size_t j = grid.obs_start_index() + 1; j < grid.gap_end_index(); ++j)
      if (mode_values[k][j] != 0.0) {
        std::ostringstream msg;
        msg << "source model: gap structure requires f = 0 on (t0, t1), but mode " << k
            << " is nonzero at node " << j;
        throw precondition_error(msg.str());
      }
}

std::size_t requested_threads() {
  const char* env = std::getenv("GFDIFF_THREADS");
  if (env == nullptr) return 1;
  const long n = std::strtol(env, nullptr, 10);
  return n > 1 ? static_cast<std::size_t>(n) : 1;
}

}  // namespace

SourceModel SourceModel::free_form(const TimeGrid& grid,
                                   std::vector<std::vector<double>> mode_values) {
  check_mode_values(grid, mode_values);
  return SourceModel{grid, SourceStructure::Free, std::move(mode_values), true};
}

SourceModel SourceModel::zero(const TimeGrid& grid, std::size_t K) {
  if (K == 0) throw precondition_error("source model: mode count must be positive");
  std::vector<std::vector<double>> rows(K, std::vector<double>(grid.node_count(), 0.0));
  return SourceModel{grid, SourceStructure::Gap, std::move(rows), true};
}

SourceModel SourceModel::with_gap(const TimeGrid& grid,
                                  std::vector<std::vector<double>> mode_values) {
  check_mode_values(grid, mode_values);
  check_gap(grid, mode_values);
  return SourceModel{grid, SourceStructure::Gap, std::move(mode_values), true};
}

SourceModel make_partitioned_source(const std::vector<SourceBlock>& blocks,
                                    const TimeGrid& grid) {
  if (blocks.empty())
    throw precondition_error("make_partitioned_source: at least one block is required");
  const std::size_t K = blocks.front().mode_vector.size();
  if (K == 0)
    throw precondition_error("make_partitioned_source: block mode vectors must be nonempty");

  if (blocks.front().start_index != grid.gap_end_index())
    throw precondition_error(
        "make_partitioned_source: the first block must start exactly at the gap end t1");

  std::size_t previous_end = 0;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const SourceBlock& blk = blocks[i];
    std::ostringstream where;
    where << "make_partitioned_source: block " << i;
    if (blk.mode_vector.size() != K)
      throw precondition_error(where.str() + ": all mode vectors must have equal length");
    if (blk.profile.empty()) throw precondition_error(where.str() + ": empty time profile");
    if (blk.profile.front() == 0.0)
      throw precondition_error(where.str() +
                               ": the leading profile sample must be nonzero (the discrete "
                               "support must start at its first grid node)");
    if (blk.start_index < grid.gap_end_index())
      throw precondition_error(where.str() + ": support may not intrude into the gap (t0, t1)");
    if (i > 0 && blk.start_index < previous_end)
      throw precondition_error(where.str() + ": supports must be disjoint and ordered");
    if (blk.start_index + blk.profile.size() > grid.node_count())
      throw precondition_error(where.str() + ": support extends beyond the horizon");
    previous_end = blk.start_index + blk.profile.size();
  }

  std::vector<std::vector<double>> rows(K, std::vector<double>(grid.node_count(), 0.0));
  for (const SourceBlock& blk : blocks)
    for (std::size_t j = 0; j < blk.profile.size(); ++j)
      for (std::size_t k = 0; k < K; ++k)
        rows[k][blk.start_index + j] += blk.profile[j] * blk.mode_vector[k];

  // Rank of the block mode-vector family decides whether product recovery
  // can identify every mode.
  Eigen::MatrixXd Wm(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(blocks.size()));
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t k = 0; k < K; ++k)
      Wm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = blocks[i].mode_vector[k];
  const bool spans = Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(Wm).rank() ==
                     static_cast<Eigen::Index>(K);

  return SourceModel{grid, SourceStructure::PartitionedGap, std::move(rows), spans};
}

std::vector<double> SimulationResult::field_snapshot(std::size_t node_index,
                                                     std::size_t space_points) const {
  if (node_index >= grid.node_count())
    throw precondition_error("field_snapshot: node index out of range");
  if (space_points < 2) throw precondition_error("field_snapshot: need at least two cells");
  const double L = spectrum.base.length();
  std::vector<double> field(space_points + 1, 0.0);
  for (std::size_t i = 1; i < space_points; ++i) {
    const double x = L * static_cast<double>(i) / static_cast<double>(space_points);
    double acc = 0.0;
    for (std::size_t k = 0; k < modes.size(); ++k)
      acc += modes[k].values[node_index] * spectrum.base.eigenfunction(static_cast<int>(k), x);
    field[i] = acc;
  }
  return field;
}

SimulationResult simulate(const FractionalSpectrum& spectrum, const MemoryKernel& M,
                          const std::vector<double>& u0_coeffs, const SourceModel& f,
                          const TimeGrid& grid) {
  const std::size_t K = spectrum.eigenvalues.size();
  if (K == 0) throw precondition_error("simulate: spectrum carries no modes");
  if (u0_coeffs.size() != K)
    throw precondition_error("simulate: u0 coefficient count must equal the mode count");
  if (f.mode_count() != K)
    throw precondition_error("simulate: source mode count must equal the mode count");
  if (!(f.grid == grid)) throw precondition_error("simulate: source grid differs from run grid");

  const detail::DiscretizedKernel dk(M, detail::refine_grid(grid));

  SimulationResult out{grid, spectrum, u0_coeffs, {}};
  out.modes.resize(K, ModeTrajectory{grid, {}, 0.0});

  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto solve_mode = [&](std::size_t k) {
    try {
      GridFunction g = cumulative_trapezoid(
          GridFunction{grid, f.mode_values[k]});
      for (double& v : g.values) v += u0_coeffs[k];
      out.modes[k] = detail::solve_with(dk, spectrum.eigenvalues[k], g);
    } catch (const error& e) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) {
        std::ostringstream msg;
        msg << "simulate: mode " << k << " (lambda = " << spectrum.eigenvalues[k]
            << "): " << e.what();
        failure = std::make_exception_ptr(numerical_error(msg.str()));
      }
    }
  };

  const std::size_t threads = std::min(requested_threads(), K);
  if (threads <= 1) {
    for (std::size_t k = 0; k < K; ++k) solve_mode(k);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    std::atomic<std::size_t> next{0};
    for (std::size_t t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < K; k = next.fetch_add(1)) solve_mode(k);
      });
    for (std::thread& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

ObservationTrace observe(const SimulationResult& result,
                         const std::vector<double>& coefficients) {
  if (coefficients.size() != result.modes.size())
    throw precondition_error("observe: coefficient count must equal the mode count");
  ObservationTrace out{GridFunction::zeros(result.grid), coefficients, false};
  double max_coeff = 0.0;
  for (double c : coefficients) max_coeff = std::max(max_coeff, std::abs(c));
  if (max_coeff <= 1e-14) {
    out.observability_warning = true;
    return out;
  }
  for (std::size_t n = 0; n < result.grid.node_count(); ++n) {
    double acc = 0.0;
    for (std::size_t k = 0; k < result.modes.size(); ++k)
      acc += coefficients[k] * result.modes[k].values[n];
    out.trace.values[n] = acc;
  }
  return out;
}

ObservationTrace observe(const SimulationResult& result, const ObservationFunctional& phi) {
  std::vector<double> coeffs;
  try {
    coeffs = functional_coefficients(result.spectrum.base, phi);
  } catch (const precondition_error&) {
    // The functional annihilates every computed mode: report the zero trace
    // with the observability flag instead of failing the whole run.
    ObservationTrace out{GridFunction::zeros(result.grid),
                         std::vector<double>(result.modes.size(), 0.0), true};
    return out;
  }
  return observe(result, coeffs);
}

}  // namespace gfd
