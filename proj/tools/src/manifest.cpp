#include "gfdcli/manifest.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gfdcli/config.hpp"
#include "gfdcli/csv.hpp"

namespace gfdcli {

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string hash_hex(std::uint64_t hash) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[hash & 0xf];
    hash >>= 4;
  }
  return out;
}

RunManifest::RunManifest(std::string command, const std::string& normalized_config,
                         std::uint64_t seed)
    : command_(std::move(command)),
      config_hash_(hash_hex(fnv1a(normalized_config))),
      seed_(seed) {}

void RunManifest::add_file(const std::string& directory, const std::string& name) {
  std::ifstream in(directory + "/" + name, std::ios::binary);
  if (!in) throw config_error("manifest: missing output file " + name);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  files_.emplace_back(name, hash_hex(fnv1a(buffer.str())));
}

void RunManifest::add_timing(const std::string& phase, double milliseconds) {
  timings_.emplace_back(phase, milliseconds);
}

void RunManifest::add_metric(const std::string& name, double value) {
  metrics_.emplace_back(name, value);
}

void RunManifest::write(const std::string& directory) const {
  nlohmann::ordered_json doc;
  doc["version"] = kToolVersion;
  doc["command"] = command_;
  doc["config_hash"] = config_hash_;
  doc["seed"] = seed_;
  nlohmann::ordered_json files = nlohmann::ordered_json::object();
  for (const auto& [name, checksum] : files_) files[name] = checksum;
  doc["files"] = std::move(files);
  nlohmann::ordered_json timings = nlohmann::ordered_json::object();
  for (const auto& [phase, ms] : timings_) timings[phase] = ms;
  doc["timings_ms"] = std::move(timings);
  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  for (const auto& [name, value] : metrics_) metrics[name] = value;
  doc["metrics"] = std::move(metrics);
  write_text(directory + "/manifest.json", doc.dump(2) + "\n");
}

}  // namespace gfdcli
