#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gfd/forward.hpp"
#include "gfd/grid.hpp"
#include "gfd/kernels.hpp"
#include "gfd/measure.hpp"
#include "gfd/operators.hpp"

namespace gfdcli {

/// Schema violation: carries the offending field path ("section.key").
/// The CLI maps it to exit code 2.
class config_error : public std::runtime_error {
 public:
  explicit config_error(const std::string& message) : std::runtime_error(message) {}
};

/// Raw parsed key-value document: ordered sections of ordered (key, value)
/// pairs.  Duplicate sections merge; duplicate keys are a schema error.
struct ConfigDocument {
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;

  [[nodiscard]] bool has(const std::string& section, const std::string& key) const;
  [[nodiscard]] std::string get(const std::string& section, const std::string& key) const;
  void set(const std::string& section, const std::string& key, const std::string& value);
};

/// Parses the flat INI-style text: [section] headers, key = value lines,
/// comments starting with '#' or ';'.  Throws config_error on malformed
/// lines or duplicate keys.
[[nodiscard]] ConfigDocument parse_document(const std::string& text);

/// Canonical serialization: sections and keys in schema order, numbers
/// normalized.  parse(serialize(parse(x))) == parse(x).
[[nodiscard]] std::string serialize_document(const ConfigDocument& doc);

struct SourceBlockSpec {
  double start = 0.0;       // time
  std::string profile;      // "indicator" or "ramp"
  double duration = 0.0;    // time
  double amplitude = 1.0;
  std::vector<std::pair<int, double>> modes;  // (1-based mode, weight)
};

/// Fully validated experiment configuration.
struct ExperimentConfig {
  // [grid]
  double horizon = 0.0;
  std::size_t cells = 0;
  std::size_t obs_start_index = 0;
  std::size_t gap_end_index = 0;

  // [operator]
  std::string operator_kind = "dirichlet";  // or "finite-difference"
  double length = 3.14159265358979324;
  double shift = 0.0;
  int modes = 8;
  int mesh = 2048;

  // [measure]
  std::vector<gfd::MeasureAtom> measure_atoms{{1.0, 1.0}};

  // [kernel]
  bool has_kernel = false;
  std::string kernel_family;  // power-law | tempered | distributed-order | constant
  double kernel_scale = 1.0;
  double kernel_order = 0.5;
  double kernel_rate = 1.0;
  double kernel_value = 1.0;
  std::vector<gfd::MeasureAtom> kernel_atoms;

  // [source]
  std::vector<SourceBlockSpec> blocks;

  // [initial]
  std::vector<double> initial_coeffs;

  // [functional]
  bool has_functional = false;
  std::string functional_kind;  // point | mean
  double functional_location = 0.0;
  double functional_a = 0.0;
  double functional_b = 0.0;

  // [noise]
  double noise_level = 0.0;
  std::uint64_t seed = 0;

  // [regularization]
  double reg_epsilon = 1e-8;
  bool reg_discrepancy = false;
  double reg_noise_level = -1.0;
  double reg_tikhonov = 1e-8;

  // [recovery]
  std::string recovery_family = "tempered";
  int derivative_order = 0;
  bool shift_search = false;
  int max_atoms = 2;
  std::string data_dir;

  // [output]
  std::string output_dir = "out";
  std::vector<double> snapshot_times;

  /// Canonical text this config serializes to (basis of the config hash).
  std::string normalized;

  // ---- materialization helpers -------------------------------------------
  [[nodiscard]] gfd::TimeGrid make_grid() const;
  [[nodiscard]] gfd::SpectralOperator make_operator() const;
  [[nodiscard]] gfd::DistributedMeasure make_measure() const;
  [[nodiscard]] gfd::MemoryKernel make_kernel() const;  // throws if !has_kernel
  [[nodiscard]] gfd::SourceModel make_source() const;
  [[nodiscard]] std::vector<double> make_initial(std::size_t K) const;
  [[nodiscard]] gfd::ObservationFunctional make_functional() const;
};

/// Validates a parsed document against the schema (unknown sections or keys,
/// missing required fields, bad types or ranges all throw config_error with
/// the field path) and materializes the typed config.
[[nodiscard]] ExperimentConfig validate_config(const ConfigDocument& doc);

/// Reads, applies overrides ("section.key=value"), validates.
[[nodiscard]] ExperimentConfig load_config(const std::string& path,
                                           const std::vector<std::string>& overrides);

}  // namespace gfdcli
