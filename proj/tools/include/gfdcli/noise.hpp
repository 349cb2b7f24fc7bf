#pragma once

#include <cstdint>
#include <vector>

namespace gfdcli {

/// Deterministic Gaussian perturbation stream.  The generator is seeded
/// explicitly and uses a fixed Box-Muller transform so byte-identical output
/// is reproduced across platforms and standard-library implementations.
class NoiseInjector {
 public:
  explicit NoiseInjector(std::uint64_t seed);

  /// Adds N(0, (level * max|values|)^2) samples in place.  A level of zero
  /// leaves the data untouched and consumes no random numbers.
  void perturb(std::vector<double>& values, double level);

  /// One standard normal draw.
  double standard_normal();

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;

  double uniform();  // in (0, 1)
};

}  // namespace gfdcli
