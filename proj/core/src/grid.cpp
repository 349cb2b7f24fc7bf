#include "gfd/grid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gfd/errors.hpp"

namespace gfd {

TimeGrid TimeGrid::with_window(double T, std::size_t N,
                               std::size_t obs_start, std::size_t gap_end) {
  if (!(T > 0.0) || !std::isfinite(T))
    throw precondition_error("TimeGrid: horizon T must be positive and finite");
  if (N < 4)
    throw precondition_error("TimeGrid: need at least 4 cells");
  if (!(obs_start > 0 && obs_start < gap_end && gap_end < N))
    throw precondition_error(
        "TimeGrid: markers must satisfy 0 < obs_start < gap_end < N, got obs_start=" +
        std::to_string(obs_start) + " gap_end=" + std::to_string(gap_end) +
        " N=" + std::to_string(N));
  return TimeGrid(T, N, obs_start, gap_end);
}

TimeGrid TimeGrid::uniform(double T, std::size_t N) {
  std::size_t obs = N / 4;
  if (obs == 0) obs = 1;
  std::size_t gap_len = N / 10;
  if (gap_len == 0) gap_len = 1;
  std::size_t gap = obs + gap_len;
  if (gap >= N) gap = N - 1;
  return with_window(T, N, obs, gap);
}

GridFunction GridFunction::zeros(const TimeGrid& g) {
  return GridFunction{g, std::vector<double>(g.node_count(), 0.0)};
}

GridFunction GridFunction::constant(const TimeGrid& g, double c) {
  return GridFunction{g, std::vector<double>(g.node_count(), c)};
}

GridFunction GridFunction::sampled(const TimeGrid& g,
                                   const std::function<double(double)>& fn) {
  GridFunction out = zeros(g);
  for (std::size_t i = 0; i < g.node_count(); ++i) out.values[i] = fn(g.time(i));
  return out;
}

GridFunction cumulative_trapezoid(const GridFunction& f) {
  GridFunction out = GridFunction::zeros(f.grid);
  const double h = f.grid.step();
  double acc = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    acc += 0.5 * h * (f.values[i - 1] + f.values[i]);
    out.values[i] = acc;
  }
  return out;
}

double relative_l2(const std::vector<double>& a, const std::vector<double>& b,
                   std::size_t begin, std::size_t end) {
  if (a.size() != b.size() || begin > end || end > a.size())
    throw precondition_error("relative_l2: mismatched lengths or bad range");
  double num = 0.0, den = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double d = a[i] - b[i];
    num += d * d;
    den += b[i] * b[i];
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num / den);
}

}  // namespace gfd
