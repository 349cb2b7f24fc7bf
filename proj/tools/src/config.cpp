#include "gfdcli/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace gfdcli {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& path, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size() || !std::isfinite(v)) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error(path + ": expected a number, got \"" + value + "\"");
  }
}

long to_integer(const std::string& path, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error(path + ": expected an integer, got \"" + value + "\"");
  }
}

bool to_bool(const std::string& path, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw config_error(path + ": expected true or false, got \"" + value + "\"");
}

std::vector<gfd::MeasureAtom> to_atoms(const std::string& path, const std::string& value) {
  std::vector<gfd::MeasureAtom> atoms;
  for (const std::string& item : split(value, ',')) {
    const auto cut = item.find(':');
    if (cut == std::string::npos)
      throw config_error(path + ": expected exponent:weight pairs, got \"" + item + "\"");
    atoms.push_back({to_double(path, trim(item.substr(0, cut))),
                     to_double(path, trim(item.substr(cut + 1)))});
  }
  if (atoms.empty()) throw config_error(path + ": empty atom list");
  return atoms;
}

std::vector<std::pair<int, double>> to_mode_weights(const std::string& path,
                                                    const std::string& value) {
  std::vector<std::pair<int, double>> modes;
  for (const std::string& item : split(value, ',')) {
    const auto cut = item.find(':');
    if (cut == std::string::npos)
      throw config_error(path + ": expected mode:weight pairs, got \"" + item + "\"");
    modes.emplace_back(static_cast<int>(to_integer(path, trim(item.substr(0, cut)))),
                       to_double(path, trim(item.substr(cut + 1))));
  }
  if (modes.empty()) throw config_error(path + ": empty mode list");
  return modes;
}

std::vector<double> to_doubles(const std::string& path, const std::string& value) {
  std::vector<double> out;
  for (const std::string& item : split(value, ',')) out.push_back(to_double(path, item));
  return out;
}

std::string atoms_to_string(const std::vector<gfd::MeasureAtom>& atoms) {
  std::string out;
  for (const auto& a : atoms) {
    if (!out.empty()) out += ",";
    out += format_number(a.exponent) + ":" + format_number(a.weight);
  }
  return out;
}

std::string modes_to_string(const std::vector<std::pair<int, double>>& modes) {
  std::string out;
  for (const auto& [k, w] : modes) {
    if (!out.empty()) out += ",";
    out += std::to_string(k) + ":" + format_number(w);
  }
  return out;
}

std::string doubles_to_string(const std::vector<double>& values) {
  std::string out;
  for (double v : values) {
    if (!out.empty()) out += ",";
    out += format_number(v);
  }
  return out;
}

/// Consumes keys from one section, erroring on leftovers afterwards.
class SectionReader {
 public:
  SectionReader(const ConfigDocument& doc, std::string section) : section_(std::move(section)) {
    for (const auto& [name, entries] : doc.sections)
      if (name == section_)
        for (const auto& [key, value] : entries) pending_.emplace(key, value);
  }

  [[nodiscard]] bool empty() const { return pending_.empty(); }

  [[nodiscard]] std::optional<std::string> take(const std::string& key) {
    auto it = pending_.find(key);
    if (it == pending_.end()) return std::nullopt;
    std::string value = it->second;
    pending_.erase(it);
    return value;
  }

  [[nodiscard]] std::string require(const std::string& key) {
    auto value = take(key);
    if (!value) throw config_error("missing required field: " + section_ + "." + key);
    return *value;
  }

  [[nodiscard]] std::string path(const std::string& key) const { return section_ + "." + key; }

  void finish() const {
    if (!pending_.empty())
      throw config_error("unknown field: " + section_ + "." + pending_.begin()->first);
  }

  /// Remaining keys, in sorted order (used for block enumeration).
  [[nodiscard]] std::vector<std::string> remaining_keys() const {
    std::vector<std::string> keys;
    for (const auto& [key, value] : pending_) keys.push_back(key);
    return keys;
  }

 private:
  std::string section_;
  std::map<std::string, std::string> pending_;
};

ConfigDocument build_document(const ExperimentConfig& c) {
  ConfigDocument doc;
  doc.set("grid", "horizon", format_number(c.horizon));
  doc.set("grid", "cells", std::to_string(c.cells));
  doc.set("grid", "obs_start_index", std::to_string(c.obs_start_index));
  doc.set("grid", "gap_end_index", std::to_string(c.gap_end_index));

  doc.set("operator", "kind", c.operator_kind);
  doc.set("operator", "length", format_number(c.length));
  doc.set("operator", "shift", format_number(c.shift));
  doc.set("operator", "modes", std::to_string(c.modes));
  if (c.operator_kind == "finite-difference")
    doc.set("operator", "mesh", std::to_string(c.mesh));

  doc.set("measure", "atoms", atoms_to_string(c.measure_atoms));

  if (c.has_kernel) {
    doc.set("kernel", "family", c.kernel_family);
    if (c.kernel_family == "power-law" || c.kernel_family == "tempered") {
      doc.set("kernel", "scale", format_number(c.kernel_scale));
      doc.set("kernel", "order", format_number(c.kernel_order));
    }
    if (c.kernel_family == "tempered") doc.set("kernel", "rate", format_number(c.kernel_rate));
    if (c.kernel_family == "distributed-order")
      doc.set("kernel", "atoms", atoms_to_string(c.kernel_atoms));
    if (c.kernel_family == "constant") doc.set("kernel", "value", format_number(c.kernel_value));
  }

  for (std::size_t b = 0; b < c.blocks.size(); ++b) {
    const std::string prefix = "block" + std::to_string(b + 1) + ".";
    const SourceBlockSpec& blk = c.blocks[b];
    doc.set("source", prefix + "start", format_number(blk.start));
    doc.set("source", prefix + "profile", blk.profile);
    doc.set("source", prefix + "duration", format_number(blk.duration));
    doc.set("source", prefix + "amplitude", format_number(blk.amplitude));
    doc.set("source", prefix + "modes", modes_to_string(blk.modes));
  }

  if (!c.initial_coeffs.empty())
    doc.set("initial", "coeffs", doubles_to_string(c.initial_coeffs));

  if (c.has_functional) {
    doc.set("functional", "kind", c.functional_kind);
    if (c.functional_kind == "point")
      doc.set("functional", "location", format_number(c.functional_location));
    else {
      doc.set("functional", "a", format_number(c.functional_a));
      doc.set("functional", "b", format_number(c.functional_b));
    }
  }

  doc.set("noise", "level", format_number(c.noise_level));
  doc.set("noise", "seed", std::to_string(c.seed));

  doc.set("regularization", "epsilon", format_number(c.reg_epsilon));
  doc.set("regularization", "discrepancy", c.reg_discrepancy ? "true" : "false");
  doc.set("regularization", "noise_level", format_number(c.reg_noise_level));
  doc.set("regularization", "tikhonov", format_number(c.reg_tikhonov));

  doc.set("recovery", "family", c.recovery_family);
  doc.set("recovery", "derivative_order", std::to_string(c.derivative_order));
  doc.set("recovery", "shift_search", c.shift_search ? "true" : "false");
  doc.set("recovery", "max_atoms", std::to_string(c.max_atoms));
  if (!c.data_dir.empty()) doc.set("recovery", "data_dir", c.data_dir);

  doc.set("output", "dir", c.output_dir);
  if (!c.snapshot_times.empty())
    doc.set("output", "snapshots", doubles_to_string(c.snapshot_times));
  return doc;
}

}  // namespace

bool ConfigDocument::has(const std::string& section, const std::string& key) const {
  for (const auto& [name, entries] : sections)
    if (name == section)
      for (const auto& [k, v] : entries)
        if (k == key) return true;
  return false;
}

std::string ConfigDocument::get(const std::string& section, const std::string& key) const {
  for (const auto& [name, entries] : sections)
    if (name == section)
      for (const auto& [k, v] : entries)
        if (k == key) return v;
  throw config_error("missing required field: " + section + "." + key);
}

void ConfigDocument::set(const std::string& section, const std::string& key,
                         const std::string& value) {
  for (auto& [name, entries] : sections)
    if (name == section) {
      for (auto& [k, v] : entries)
        if (k == key) {
          v = value;
          return;
        }
      entries.emplace_back(key, value);
      return;
    }
  sections.push_back({section, {{key, value}}});
}

ConfigDocument parse_document(const std::string& text) {
  ConfigDocument doc;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
    if (stripped.front() == '[') {
      if (stripped.back() != ']')
        throw config_error("line " + std::to_string(line_number) + ": malformed section header");
      section = trim(stripped.substr(1, stripped.size() - 2));
      if (section.empty())
        throw config_error("line " + std::to_string(line_number) + ": empty section name");
      continue;
    }
    const auto cut = stripped.find('=');
    if (cut == std::string::npos)
      throw config_error("line " + std::to_string(line_number) + ": expected key = value");
    if (section.empty())
      throw config_error("line " + std::to_string(line_number) + ": key outside any section");
    const std::string key = trim(stripped.substr(0, cut));
    const std::string value = trim(stripped.substr(cut + 1));
    if (key.empty())
      throw config_error("line " + std::to_string(line_number) + ": empty key");
    if (doc.has(section, key)) throw config_error("duplicate field: " + section + "." + key);
    doc.set(section, key, value);
  }
  return doc;
}

std::string serialize_document(const ConfigDocument& doc) {
  std::string out;
  for (const auto& [name, entries] : doc.sections) {
    if (!out.empty()) out += "\n";
    out += "[" + name + "]\n";
    for (const auto& [key, value] : entries) out += key + " = " + value + "\n";
  }
  return out;
}

ExperimentConfig validate_config(const ConfigDocument& doc) {
  static const std::set<std::string> known_sections = {
      "grid",    "operator", "measure",        "kernel",   "source",
      "initial", "functional", "noise",        "regularization", "recovery", "output"};
  for (const auto& [name, entries] : doc.sections)
    if (!known_sections.count(name)) throw config_error("unknown section: [" + name + "]");

  ExperimentConfig c;

  {
    SectionReader grid(doc, "grid");
    c.horizon = to_double(grid.path("horizon"), grid.require("horizon"));
    if (!(c.horizon > 0)) throw config_error("grid.horizon: must be positive");
    const long cells = to_integer(grid.path("cells"), grid.require("cells"));
    if (cells < 64) throw config_error("grid.cells: must be at least 64");
    c.cells = static_cast<std::size_t>(cells);
    const double h = c.horizon / static_cast<double>(c.cells);

    long i0 = -1;
    long i1 = -1;
    if (auto v = grid.take("obs_start_index")) i0 = to_integer(grid.path("obs_start_index"), *v);
    if (auto v = grid.take("gap_end_index")) i1 = to_integer(grid.path("gap_end_index"), *v);
    if (auto v = grid.take("t0")) {
      if (i0 >= 0) throw config_error("grid.t0: conflicts with grid.obs_start_index");
      i0 = std::lround(to_double(grid.path("t0"), *v) / h);
    }
    if (auto v = grid.take("t1")) {
      if (i1 >= 0) throw config_error("grid.t1: conflicts with grid.gap_end_index");
      i1 = std::lround(to_double(grid.path("t1"), *v) / h);
    }
    const long N = static_cast<long>(c.cells);
    if (i0 < 0) i0 = std::max<long>(1, N / 4);
    if (i1 < 0) i1 = i0 + std::max<long>(1, N / 10);
    if (!(0 < i0 && i0 < i1 && i1 < N))
      throw config_error("grid.gap_end_index: need 0 < obs_start < gap_end < cells, got " +
                         std::to_string(i0) + " and " + std::to_string(i1));
    c.obs_start_index = static_cast<std::size_t>(i0);
    c.gap_end_index = static_cast<std::size_t>(i1);
    grid.finish();
  }

  {
    SectionReader op(doc, "operator");
    if (auto v = op.take("kind")) c.operator_kind = *v;
    if (c.operator_kind != "dirichlet" && c.operator_kind != "finite-difference")
      throw config_error("operator.kind: expected dirichlet or finite-difference, got \"" +
                         c.operator_kind + "\"");
    if (auto v = op.take("length")) c.length = to_double(op.path("length"), *v);
    if (!(c.length > 0)) throw config_error("operator.length: must be positive");
    if (auto v = op.take("shift")) c.shift = to_double(op.path("shift"), *v);
    if (c.shift > 0) throw config_error("operator.shift: must be nonpositive");
    if (auto v = op.take("modes"))
      c.modes = static_cast<int>(to_integer(op.path("modes"), *v));
    if (c.modes < 1 || c.modes > 512) throw config_error("operator.modes: must be in 1..512");
    if (auto v = op.take("mesh")) {
      if (c.operator_kind != "finite-difference")
        throw config_error("operator.mesh: only valid for finite-difference operators");
      c.mesh = static_cast<int>(to_integer(op.path("mesh"), *v));
    }
    if (c.operator_kind == "finite-difference" && c.mesh < 8 * c.modes)
      throw config_error("operator.mesh: must be at least eight times operator.modes");
    op.finish();
  }

  {
    SectionReader ms(doc, "measure");
    if (auto v = ms.take("atoms")) c.measure_atoms = to_atoms(ms.path("atoms"), *v);
    for (const auto& a : c.measure_atoms) {
      if (!(a.exponent > 0 && a.exponent <= 1))
        throw config_error("measure.atoms: exponents must lie in (0, 1]");
      if (!(a.weight > 0)) throw config_error("measure.atoms: weights must be positive");
    }
    ms.finish();
  }

  {
    SectionReader kn(doc, "kernel");
    if (auto family = kn.take("family")) {
      c.has_kernel = true;
      c.kernel_family = *family;
      if (auto v = kn.take("scale")) c.kernel_scale = to_double(kn.path("scale"), *v);
      if (auto v = kn.take("order")) c.kernel_order = to_double(kn.path("order"), *v);
      if (auto v = kn.take("rate")) c.kernel_rate = to_double(kn.path("rate"), *v);
      if (auto v = kn.take("value")) c.kernel_value = to_double(kn.path("value"), *v);
      if (auto v = kn.take("atoms")) c.kernel_atoms = to_atoms(kn.path("atoms"), *v);
      if (c.kernel_family == "power-law" || c.kernel_family == "tempered") {
        if (!(c.kernel_scale > 0)) throw config_error("kernel.scale: must be positive");
        if (!(c.kernel_order > 0 && c.kernel_order < 1))
          throw config_error("kernel.order: must lie in (0, 1)");
        if (c.kernel_family == "tempered" && !(c.kernel_rate > 0))
          throw config_error("kernel.rate: must be positive");
      } else if (c.kernel_family == "distributed-order") {
        if (c.kernel_atoms.empty())
          throw config_error("missing required field: kernel.atoms");
      } else if (c.kernel_family == "constant") {
        if (!(c.kernel_value > 0)) throw config_error("kernel.value: must be positive");
      } else {
        throw config_error(
            "kernel.family: expected power-law, tempered, distributed-order or constant, got \"" +
            c.kernel_family + "\"");
      }
    }
    kn.finish();
  }

  {
    SectionReader src(doc, "source");
    for (int b = 1;; ++b) {
      const std::string prefix = "block" + std::to_string(b) + ".";
      if (!doc.has("source", prefix + "start") && !doc.has("source", prefix + "profile")) break;
      SourceBlockSpec blk;
      blk.start = to_double(src.path(prefix + "start"), src.require(prefix + "start"));
      blk.profile = src.require(prefix + "profile");
      if (blk.profile != "indicator" && blk.profile != "ramp")
        throw config_error("source." + prefix + "profile: expected indicator or ramp, got \"" +
                           blk.profile + "\"");
      blk.duration = to_double(src.path(prefix + "duration"), src.require(prefix + "duration"));
      if (!(blk.duration > 0))
        throw config_error("source." + prefix + "duration: must be positive");
      if (auto v = src.take(prefix + "amplitude"))
        blk.amplitude = to_double(src.path(prefix + "amplitude"), *v);
      blk.modes = to_mode_weights(src.path(prefix + "modes"), src.require(prefix + "modes"));
      for (const auto& [k, w] : blk.modes)
        if (k < 1 || k > c.modes)
          throw config_error("source." + prefix + "modes: mode index " + std::to_string(k) +
                             " outside 1.." + std::to_string(c.modes));
      c.blocks.push_back(std::move(blk));
    }
    src.finish();
  }

  {
    SectionReader init(doc, "initial");
    if (auto v = init.take("coeffs")) c.initial_coeffs = to_doubles(init.path("coeffs"), *v);
    if (c.initial_coeffs.size() > static_cast<std::size_t>(c.modes))
      throw config_error("initial.coeffs: more entries than operator.modes");
    init.finish();
  }

  {
    SectionReader fn(doc, "functional");
    if (auto kind = fn.take("kind")) {
      c.has_functional = true;
      c.functional_kind = *kind;
      if (c.functional_kind == "point") {
        c.functional_location = to_double(fn.path("location"), fn.require("location"));
        if (!(c.functional_location > 0 && c.functional_location < c.length))
          throw config_error("functional.location: must lie inside (0, length)");
      } else if (c.functional_kind == "mean") {
        c.functional_a = to_double(fn.path("a"), fn.require("a"));
        c.functional_b = to_double(fn.path("b"), fn.require("b"));
        if (!(0 <= c.functional_a && c.functional_a < c.functional_b &&
              c.functional_b <= c.length))
          throw config_error("functional.b: need 0 <= a < b <= length");
      } else {
        throw config_error("functional.kind: expected point or mean, got \"" +
                           c.functional_kind + "\"");
      }
    }
    fn.finish();
  }

  {
    SectionReader ns(doc, "noise");
    if (auto v = ns.take("level")) c.noise_level = to_double(ns.path("level"), *v);
    if (c.noise_level < 0) throw config_error("noise.level: must be nonnegative");
    if (auto v = ns.take("seed")) {
      const long s = to_integer(ns.path("seed"), *v);
      if (s < 0) throw config_error("noise.seed: must be nonnegative");
      c.seed = static_cast<std::uint64_t>(s);
    }
    ns.finish();
  }

  {
    SectionReader rg(doc, "regularization");
    if (auto v = rg.take("epsilon")) c.reg_epsilon = to_double(rg.path("epsilon"), *v);
    if (!(c.reg_epsilon > 0)) throw config_error("regularization.epsilon: must be positive");
    if (auto v = rg.take("discrepancy"))
      c.reg_discrepancy = to_bool(rg.path("discrepancy"), *v);
    if (auto v = rg.take("noise_level"))
      c.reg_noise_level = to_double(rg.path("noise_level"), *v);
    if (auto v = rg.take("tikhonov")) c.reg_tikhonov = to_double(rg.path("tikhonov"), *v);
    if (!(c.reg_tikhonov >= 0))
      throw config_error("regularization.tikhonov: must be nonnegative");
    rg.finish();
  }

  {
    SectionReader rc(doc, "recovery");
    if (auto v = rc.take("family")) c.recovery_family = *v;
    if (c.recovery_family != "power-law" && c.recovery_family != "tempered")
      throw config_error("recovery.family: expected power-law or tempered, got \"" +
                         c.recovery_family + "\"");
    if (auto v = rc.take("derivative_order"))
      c.derivative_order = static_cast<int>(to_integer(rc.path("derivative_order"), *v));
    if (c.derivative_order < 0 || c.derivative_order > 2)
      throw config_error("recovery.derivative_order: must be 0, 1 or 2");
    if (auto v = rc.take("shift_search")) c.shift_search = to_bool(rc.path("shift_search"), *v);
    if (auto v = rc.take("max_atoms"))
      c.max_atoms = static_cast<int>(to_integer(rc.path("max_atoms"), *v));
    if (c.max_atoms < 1 || c.max_atoms > 4)
      throw config_error("recovery.max_atoms: must be in 1..4");
    if (auto v = rc.take("data_dir")) c.data_dir = *v;
    rc.finish();
  }

  {
    SectionReader out(doc, "output");
    if (auto v = out.take("dir")) c.output_dir = *v;
    if (c.output_dir.empty()) throw config_error("output.dir: must not be empty");
    if (auto v = out.take("snapshots")) c.snapshot_times = to_doubles(out.path("snapshots"), *v);
    for (double t : c.snapshot_times)
      if (!(t >= 0 && t <= c.horizon))
        throw config_error("output.snapshots: times must lie in [0, horizon]");
    out.finish();
  }

  c.normalized = serialize_document(build_document(c));
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ConfigDocument doc = parse_document(buffer.str());
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    const auto dot = ov.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
      throw config_error("override \"" + ov + "\": expected section.key=value");
    doc.set(trim(ov.substr(0, dot)), trim(ov.substr(dot + 1, eq - dot - 1)),
            trim(ov.substr(eq + 1)));
  }
  return validate_config(doc);
}

// ---- materialization -------------------------------------------------------

gfd::TimeGrid ExperimentConfig::make_grid() const {
  return gfd::TimeGrid::with_window(horizon, cells, obs_start_index, gap_end_index);
}

gfd::SpectralOperator ExperimentConfig::make_operator() const {
  if (operator_kind == "dirichlet") return gfd::dirichlet_eigenpairs(length, shift, modes);
  return gfd::sturm_liouville_fd(
      length, [s = shift](double) { return s; }, mesh, modes);
}

gfd::DistributedMeasure ExperimentConfig::make_measure() const {
  return gfd::DistributedMeasure::atoms(measure_atoms);
}

gfd::MemoryKernel ExperimentConfig::make_kernel() const {
  if (!has_kernel) throw config_error("missing required field: kernel.family");
  if (kernel_family == "power-law") return gfd::MemoryKernel::power_law(kernel_scale, kernel_order);
  if (kernel_family == "tempered") return gfd::MemoryKernel::tempered(kernel_scale, kernel_order, kernel_rate);
  if (kernel_family == "distributed-order")
    return gfd::MemoryKernel::distributed_order(gfd::DistributedMeasure::atoms(kernel_atoms));
  // constant kernel value c is the power-law limit alpha -> 1: M(t) = c.
  const gfd::TimeGrid table = gfd::TimeGrid::uniform(horizon, 8);
  return gfd::MemoryKernel::tabulated(table, std::vector<double>(table.node_count(), kernel_value));
}

gfd::SourceModel ExperimentConfig::make_source() const {
  const gfd::TimeGrid grid = make_grid();
  const std::size_t K = static_cast<std::size_t>(modes);
  if (blocks.empty()) return gfd::SourceModel::zero(grid, K);

  const double h = grid.step();
  std::vector<gfd::SourceBlock> out;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const SourceBlockSpec& blk = blocks[b];
    const std::string path = "source.block" + std::to_string(b + 1) + ".";
    const long start = std::lround(blk.start / h);
    const long width = std::max<long>(1, std::lround(blk.duration / h));
    if (start < static_cast<long>(grid.gap_end_index()))
      throw config_error(path + "start: block begins before the gap ends");
    if (start + width > static_cast<long>(grid.node_count()))
      throw config_error(path + "duration: block extends past the horizon");

    std::vector<double> profile(static_cast<std::size_t>(width));
    for (long j = 0; j < width; ++j)
      profile[static_cast<std::size_t>(j)] =
          blk.profile == "indicator"
              ? blk.amplitude
              : blk.amplitude * (1.0 - static_cast<double>(j) / static_cast<double>(width));

    std::vector<double> weights(K, 0.0);
    for (const auto& [k, w] : blk.modes) weights[static_cast<std::size_t>(k - 1)] = w;
    out.push_back({static_cast<std::size_t>(start), std::move(profile), std::move(weights)});
  }
  return gfd::make_partitioned_source(out, grid);
}

std::vector<double> ExperimentConfig::make_initial(std::size_t K) const {
  std::vector<double> u0(K, 0.0);
  std::copy(initial_coeffs.begin(), initial_coeffs.end(), u0.begin());
  return u0;
}

gfd::ObservationFunctional ExperimentConfig::make_functional() const {
  if (!has_functional) throw config_error("missing required field: functional.kind");
  if (functional_kind == "point")
    return gfd::ObservationFunctional::point_value(functional_location);
  return gfd::ObservationFunctional::subinterval_mean(functional_a, functional_b);
}

}  // namespace gfdcli
