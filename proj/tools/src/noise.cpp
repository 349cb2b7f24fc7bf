#include "gfdcli/noise.hpp"

#include <algorithm>
#include <cmath>

namespace gfdcli {

NoiseInjector::NoiseInjector(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ULL) {}

double NoiseInjector::uniform() {
  // splitmix64: specified sequence, identical on every platform.
  state_ += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  // Map the top 53 bits into (0, 1), excluding both endpoints.
  return (static_cast<double>(z >> 11) + 0.5) * 0x1p-53;
}

double NoiseInjector::standard_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * 3.14159265358979324 * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

void NoiseInjector::perturb(std::vector<double>& values, double level) {
  if (level <= 0.0 || values.empty()) return;
  double peak = 0.0;
  for (double v : values) peak = std::max(peak, std::abs(v));
  const double sigma = level * peak;
  for (double& v : values) v += sigma * standard_normal();
}

}  // namespace gfdcli
