#pragma once

#include <string>
#include <vector>

namespace gfdcli {

/// Two-column series read back from disk.
struct CsvSeries {
  std::vector<double> first;
  std::vector<double> second;
};

/// Writes a two-column CSV atomically (temp file + rename).  The header line
/// names the columns; an optional '#' comment line precedes it.  Values are
/// printed with 17 significant digits so reads round-trip exactly.
void write_csv(const std::string& path, const std::string& header,
               const std::vector<double>& first, const std::vector<double>& second,
               const std::string& comment = "");

/// Reads a two-column CSV, skipping '#' comments and the header line.
/// Throws gfdcli::config_error when the file is missing or malformed.
[[nodiscard]] CsvSeries read_csv(const std::string& path);

/// Writes arbitrary text atomically (temp file + rename).
void write_text(const std::string& path, const std::string& content);

}  // namespace gfdcli
