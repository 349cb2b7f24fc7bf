#pragma once

#include <cstddef>
#include <vector>

#include "gfd/grid.hpp"
#include "gfd/kernels.hpp"
#include "gfd/operators.hpp"
#include "gfd/volterra.hpp"

namespace gfd {

enum class SourceStructure {
  Free,            // no structural guarantee
  Gap,             // vanishes at every grid node strictly inside (t0, t1)
  PartitionedGap,  // gap plus ordered disjoint blocks psi_i * w_i on [t1, T)
};

/// One source block psi_i(t) * w_i of the partitioned form: a scalar time
/// profile supported on consecutive grid cells and a mode vector it excites.
struct SourceBlock {
  std::size_t start_index = 0;       // grid node where the support begins
  std::vector<double> profile;       // psi samples at start_index, start_index+1, ...
  std::vector<double> mode_vector;   // w_i, one entry per mode
};

/// Per-mode source coefficients f_k(t) sampled on the grid nodes.
struct SourceModel {
  TimeGrid grid;
  SourceStructure structure = SourceStructure::Free;
  std::vector<std::vector<double>> mode_values;  // [mode][node]
  /// PartitionedGap only: whether the block mode-vectors span all modes.
  /// When false, product recovery is unique only on the spanned subspace.
  bool spans_all_modes = true;

  [[nodiscard]] std::size_t mode_count() const { return mode_values.size(); }

  /// Unstructured source; mode value rows must have node_count samples.
  [[nodiscard]] static SourceModel free_form(const TimeGrid& grid,
                                             std::vector<std::vector<double>> mode_values);

  /// All-zero source for K modes.
  [[nodiscard]] static SourceModel zero(const TimeGrid& grid, std::size_t K);

  /// Tags the source as gap-structured after verifying it vanishes at every
  /// node strictly inside (t0, t1).
  [[nodiscard]] static SourceModel with_gap(const TimeGrid& grid,
                                            std::vector<std::vector<double>> mode_values);
};

/// Builds f_k(t) = sum_i psi_i(t) (w_i)_k from ordered blocks.  Enforces the
/// discrete leading-support contract: each profile's first sample is nonzero
/// and sits at the block's first grid node; the first block starts exactly at
/// t1 (the gap end); supports are disjoint and ordered.  Sets
/// spans_all_modes from the rank of the block mode-vectors.
[[nodiscard]] SourceModel make_partitioned_source(const std::vector<SourceBlock>& blocks,
                                                  const TimeGrid& grid);

/// Mode trajectories of one run of the direct problem, plus everything needed
/// to evaluate observations and field snapshots.  Immutable after assembly.
struct SimulationResult {
  TimeGrid grid;
  FractionalSpectrum spectrum;
  std::vector<double> initial_coeffs;  // u_k(0)
  std::vector<ModeTrajectory> modes;   // u_k(t); defining residuals inside

  /// Field samples u(t_node, x) at `space_points`+1 equispaced x including
  /// both (zero) boundary points.
  [[nodiscard]] std::vector<double> field_snapshot(std::size_t node_index,
                                                   std::size_t space_points = 256) const;
};

/// Simulates d/dt[u - A M*u] = f by eigenfunction expansion: every mode
/// solves u_k + lambda_k (M * u_k) = u_k(0) + (1 * f_k) through
/// solve_second_kind on a shared kernel discretization.  Mode solves run in
/// parallel when the GFDIFF_THREADS environment variable exceeds 1; assembly
/// order is deterministic either way.
[[nodiscard]] SimulationResult simulate(const FractionalSpectrum& spectrum,
                                        const MemoryKernel& M,
                                        const std::vector<double>& u0_coeffs,
                                        const SourceModel& f, const TimeGrid& grid);

/// Scalar observation trace <Phi, u(t)> = sum_k Phi_k u_k(t).
struct ObservationTrace {
  GridFunction trace;
  std::vector<double> coefficients;  // Phi_k actually used
  /// Set when the functional annihilates every computed mode; the trace is
  /// then identically zero and carries no information (observability loss).
  bool observability_warning = false;
};

[[nodiscard]] ObservationTrace observe(const SimulationResult& result,
                                       const ObservationFunctional& phi);

/// Same trace from precomputed functional coefficients.
[[nodiscard]] ObservationTrace observe(const SimulationResult& result,
                                       const std::vector<double>& coefficients);

}  // namespace gfd
