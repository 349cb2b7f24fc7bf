#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gfdcli {

inline constexpr const char* kToolVersion = "0.1.0";

/// FNV-1a 64-bit hash of a byte string.
[[nodiscard]] std::uint64_t fnv1a(const std::string& bytes);

/// Hash rendered as 16 lowercase hex digits.
[[nodiscard]] std::string hash_hex(std::uint64_t hash);

/// Provenance record written next to every command's outputs.  Checksums let
/// downstream runs verify inputs; the config hash identifies the experiment.
class RunManifest {
 public:
  RunManifest(std::string command, const std::string& normalized_config, std::uint64_t seed);

  /// Records a produced file: checksum of its current on-disk bytes.
  void add_file(const std::string& directory, const std::string& name);

  /// Records a named wall-clock duration in milliseconds.
  void add_timing(const std::string& phase, double milliseconds);

  /// Records a named scalar result (residuals, recovered parameters, ...).
  void add_metric(const std::string& name, double value);

  /// Writes manifest.json into the directory (atomic).
  void write(const std::string& directory) const;

 private:
  std::string command_;
  std::string config_hash_;
  std::uint64_t seed_;
  std::vector<std::pair<std::string, std::string>> files_;
  std::vector<std::pair<std::string, double>> timings_;
  std::vector<std::pair<std::string, double>> metrics_;
};

}  // namespace gfdcli
