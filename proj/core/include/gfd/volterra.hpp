#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "gfd/grid.hpp"
#include "gfd/kernels.hpp"

namespace gfd {

namespace detail {

/// Internal solver mesh: the uniform grid nodes united with a cubically
/// graded prefix T (q/N)^3 near t = 0 (kept while its spacing stays below the
/// uniform step).  The kernel singularity makes the early solution behave
/// like t^alpha; grading restores full accuracy at the first uniform nodes.
struct RefinedMesh {
  std::vector<double> nodes;              // ascending, nodes[0] = 0, back() = T
  std::vector<std::size_t> uniform_pos;   // position of uniform node j in `nodes`
};

[[nodiscard]] RefinedMesh refine_grid(const TimeGrid& grid);

/// Uniform mesh viewed as a RefinedMesh (no grading).
[[nodiscard]] RefinedMesh plain_grid(const TimeGrid& grid);

/// Product-integration rows of the convolution operator v -> M * v on a
/// RefinedMesh: row n gives coefficients c_j with
///   (M * v)(nodes[n]) ~= sum_j c_j v_j,  j = 0..n,
/// assembled from exact kernel cell moments against piecewise-linear v.
/// Rows are cached when the mesh is small enough; otherwise rebuilt on the
/// fly into caller scratch.  Immutable and safe to share across threads.
class DiscretizedKernel {
 public:
  DiscretizedKernel(const MemoryKernel& M, RefinedMesh mesh);

  [[nodiscard]] const RefinedMesh& mesh() const { return mesh_; }
  [[nodiscard]] std::size_t last_row() const { return mesh_.nodes.size() - 1; }

  /// Coefficients of row n (length n+1).  Returns cached storage or fills
  /// `scratch` and returns its data.
  const double* row(std::size_t n, std::vector<double>& scratch) const;

 private:
  void build_row(std::size_t n, double* out) const;

  MemoryKernel M_;
  RefinedMesh mesh_;
  bool cached_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace detail

/// Per-mode solution samples on the uniform grid, with the verified defining
/// residual max_n |v + lambda (M*v) - g|(t_n) of the internal discretization.
struct ModeTrajectory {
  TimeGrid grid;
  std::vector<double> values;
  double defining_residual = 0.0;
};

struct SolveOptions {
  /// Use the graded internal mesh (accurate through the kernel singularity).
  /// Disable for the fast uniform path in inner optimization loops.
  bool refine = true;
};

/// Product-integration convolution (M * g)(t_n) on the uniform grid, using
/// exact kernel cell moments against piecewise-linear g.  Exact (up to
/// rounding) for piecewise-linear g.
[[nodiscard]] GridFunction weighted_convolve(const MemoryKernel& M, const GridFunction& g);

/// Marches the second-kind Volterra equation v + lambda (M * v) = g through
/// the internal (optionally graded) mesh and restricts to the uniform grid;
/// v(0) = g(0).  Throws ill_conditioning_error when 1 + lambda w_nn <= 0
/// (step size must be refined).
[[nodiscard]] ModeTrajectory solve_second_kind(const MemoryKernel& M, double lambda,
                                               const GridFunction& g,
                                               const SolveOptions& options = {});

namespace detail {
/// Same march against a prebuilt discretization (shared across modes).
[[nodiscard]] ModeTrajectory solve_with(const DiscretizedKernel& dk, double lambda,
                                        const GridFunction& g);
}  // namespace detail

/// Lavrentiev-regularized first-kind deconvolution of M from (w * M) = r.
struct DeconvolutionResult {
  /// Kernel node samples reconstructed from the recovered cell means.
  GridFunction values;
  /// Recovered cell means of M over (t_j, t_{j+1}), j = 0..N-1 — the direct
  /// output of the marching scheme, more accurate than any node sample.
  std::vector<double> cell_means;
  /// Node samples with index < unreliable_prefix are contaminated by the
  /// kernel singularity / origin cells and must not be trusted.
  std::size_t unreliable_prefix = 3;
  double epsilon_used = 0.0;
};

/// Solves (eps + W) m = r by forward substitution, where W is the midpoint
/// (cell-average) product-integration convolution matrix of w, then
/// reconstructs node samples by a local power-law / linear blend.
/// eps = 0 is allowed as the vanishing-regularization limit.
/// Throws precondition_error when w vanishes identically (Titchmarsh
/// uniqueness hypothesis violated) and ill_conditioning_error when the
/// regularized diagonal falls below the machine guard.
[[nodiscard]] DeconvolutionResult deconvolve_first_kind(const GridFunction& w,
                                                        const GridFunction& r, double eps);

/// Discrepancy-principle wrapper: picks eps so the data residual
/// ||W m - r||_2 matches noise_std * sqrt(N).  Pass noise_std < 0 to estimate
/// the noise from second differences over the trailing quarter of r.
[[nodiscard]] DeconvolutionResult deconvolve_first_kind_discrepancy(const GridFunction& w,
                                                                    const GridFunction& r,
                                                                    double noise_std);

}  // namespace gfd
