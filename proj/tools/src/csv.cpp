#include "gfdcli/csv.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gfdcli/config.hpp"

namespace gfdcli {
namespace {

void atomic_replace(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::filesystem::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw config_error("cannot write file: " + temp.string());
    out << content;
    if (!out.good()) throw config_error("short write: " + temp.string());
  }
  std::filesystem::rename(temp, target);
}

}  // namespace

void write_csv(const std::string& path, const std::string& header,
               const std::vector<double>& first, const std::vector<double>& second,
               const std::string& comment) {
  if (first.size() != second.size())
    throw config_error("write_csv: column length mismatch for " + path);
  std::string content;
  content.reserve(first.size() * 48 + 64);
  if (!comment.empty()) content += "# " + comment + "\n";
  content += header + "\n";
  char buf[96];
  for (std::size_t i = 0; i < first.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", first[i], second[i]);
    content += buf;
  }
  atomic_replace(path, content);
}

CsvSeries read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open data file: " + path);
  CsvSeries series;
  std::string line;
  bool header_seen = false;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;  // column-name line
      continue;
    }
    const auto cut = line.find(',');
    if (cut == std::string::npos)
      throw config_error(path + ": line " + std::to_string(line_number) +
                         ": expected two comma-separated values");
    try {
      series.first.push_back(std::stod(line.substr(0, cut)));
      series.second.push_back(std::stod(line.substr(cut + 1)));
    } catch (const std::exception&) {
      throw config_error(path + ": line " + std::to_string(line_number) +
                         ": malformed number");
    }
  }
  if (series.first.empty()) throw config_error(path + ": no data rows");
  return series;
}

void write_text(const std::string& path, const std::string& content) {
  atomic_replace(path, content);
}

}  // namespace gfdcli
