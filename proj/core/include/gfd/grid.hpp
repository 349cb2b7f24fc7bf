#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace gfd {

/// Uniform time mesh on [0, T] with N cells and two markers:
/// `obs_start_index` (observations begin, the window's t0) and
/// `gap_end_index` (the source gap (t0, t1) ends, t1).  The markers always
/// satisfy 0 < obs_start_index < gap_end_index < N.
class TimeGrid {
 public:
  /// Grid with explicit markers.  Throws precondition_error unless
  /// 0 < obs_start < gap_end < N and T > 0.
  static TimeGrid with_window(double T, std::size_t N,
                              std::size_t obs_start, std::size_t gap_end);

  /// Grid with default markers: observations start at N/4 and the gap spans
  /// 10% of the horizon (the default gap length used throughout).
  static TimeGrid uniform(double T, std::size_t N);

  [[nodiscard]] double horizon() const { return T_; }
  [[nodiscard]] std::size_t cell_count() const { return N_; }
  [[nodiscard]] std::size_t node_count() const { return N_ + 1; }
  [[nodiscard]] double step() const { return T_ / static_cast<double>(N_); }
  [[nodiscard]] double time(std::size_t i) const { return static_cast<double>(i) * step(); }

  /// All node times t_0 .. t_N.
  [[nodiscard]] std::vector<double> nodes() const {
    std::vector<double> out(N_ + 1);
    for (std::size_t i = 0; i <= N_; ++i) out[i] = time(i);
    return out;
  }

  [[nodiscard]] std::size_t obs_start_index() const { return obs_start_; }
  [[nodiscard]] std::size_t gap_end_index() const { return gap_end_; }
  [[nodiscard]] double obs_start() const { return time(obs_start_); }
  [[nodiscard]] double gap_end() const { return time(gap_end_); }

  bool operator==(const TimeGrid& other) const {
    return T_ == other.T_ && N_ == other.N_ &&
           obs_start_ == other.obs_start_ && gap_end_ == other.gap_end_;
  }

 private:
  TimeGrid(double T, std::size_t N, std::size_t obs_start, std::size_t gap_end)
      : T_(T), N_(N), obs_start_(obs_start), gap_end_(gap_end) {}

  double T_;
  std::size_t N_;
  std::size_t obs_start_;
  std::size_t gap_end_;
};

/// Real-valued samples on the nodes of a TimeGrid (length N+1).
struct GridFunction {
  TimeGrid grid;
  std::vector<double> values;

  [[nodiscard]] static GridFunction zeros(const TimeGrid& g);
  [[nodiscard]] static GridFunction constant(const TimeGrid& g, double c);
  /// Samples fn at every node time.
  [[nodiscard]] static GridFunction sampled(const TimeGrid& g,
                                            const std::function<double(double)>& fn);

  [[nodiscard]] double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
  [[nodiscard]] std::size_t size() const { return values.size(); }
};

/// Cumulative trapezoidal integral: out[n] = integral of f over [0, t_n].
/// Exact for piecewise-linear integrands, which is how sources are modeled.
[[nodiscard]] GridFunction cumulative_trapezoid(const GridFunction& f);

/// Relative L2 distance ||a - b|| / ||b|| over the index range [begin, end).
[[nodiscard]] double relative_l2(const std::vector<double>& a,
                                 const std::vector<double>& b,
                                 std::size_t begin, std::size_t end);

}  // namespace gfd
