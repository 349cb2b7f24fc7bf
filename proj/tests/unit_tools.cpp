#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gfdcli/config.hpp"
#include "gfdcli/csv.hpp"
#include "gfdcli/manifest.hpp"
#include "gfdcli/noise.hpp"

namespace fs = std::filesystem;
using gfdcli::ConfigDocument;
using gfdcli::config_error;

namespace {

const char* kMinimalConfig = R"(
[grid]
horizon = 2.0
cells = 256

[operator]
kind = dirichlet
length = 3.14159265358979324
modes = 4

[kernel]
family = tempered
scale = 1.0
order = 0.4
rate = 1.0

[source]
block1.start = 0.75
block1.profile = indicator
block1.duration = 0.2
block1.modes = 1:1, 2:1, 3:1, 4:1
)";

ConfigDocument parse_minimal() { return gfdcli::parse_document(kMinimalConfig); }

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("gfdcli_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("INI parsing: comments, duplicates, stray keys") {
  SUBCASE("comments and blank lines are ignored") {
    const auto doc = gfdcli::parse_document("# top\n[grid]\n; note\nhorizon = 1\n\ncells=64\n");
    CHECK(doc.get("grid", "horizon") == "1");
    CHECK(doc.get("grid", "cells") == "64");
  }
  SUBCASE("duplicate field is an error") {
    CHECK_THROWS_WITH_AS((void)gfdcli::parse_document("[grid]\nhorizon=1\nhorizon=2\n"),
                         doctest::Contains("duplicate field: grid.horizon"), config_error);
  }
  SUBCASE("key before any section is an error") {
    CHECK_THROWS_AS((void)gfdcli::parse_document("horizon = 1\n"), config_error);
  }
  SUBCASE("malformed line is an error") {
    CHECK_THROWS_AS((void)gfdcli::parse_document("[grid]\nhorizon\n"), config_error);
  }
}

TEST_CASE("config validation reports precise field paths") {
  SUBCASE("missing required field") {
    const auto doc = gfdcli::parse_document("[grid]\ncells = 256\n");
    CHECK_THROWS_WITH_AS((void)gfdcli::validate_config(doc),
                         doctest::Contains("missing required field: grid.horizon"),
                         config_error);
  }
  SUBCASE("unknown field names the key") {
    auto doc = parse_minimal();
    doc.set("grid", "horzion", "2.0");
    CHECK_THROWS_WITH_AS((void)gfdcli::validate_config(doc),
                         doctest::Contains("unknown field: grid.horzion"), config_error);
  }
  SUBCASE("unknown section is rejected") {
    auto doc = parse_minimal();
    doc.set("grib", "horizon", "2.0");
    CHECK_THROWS_AS((void)gfdcli::validate_config(doc), config_error);
  }
  SUBCASE("window markers: times and indices conflict") {
    auto doc = parse_minimal();
    doc.set("grid", "obs_start", "0.5");
    doc.set("grid", "obs_start_index", "64");
    CHECK_THROWS_WITH_AS((void)gfdcli::validate_config(doc),
                         doctest::Contains("grid.obs_start"), config_error);
  }
  SUBCASE("cells below the floor") {
    auto doc = parse_minimal();
    doc.set("grid", "cells", "32");
    CHECK_THROWS_WITH_AS((void)gfdcli::validate_config(doc), doctest::Contains("grid.cells"),
                         config_error);
  }
  SUBCASE("finite-difference operator needs a fine mesh") {
    auto doc = parse_minimal();
    doc.set("operator", "kind", "finite-difference");
    doc.set("operator", "mesh", "16");
    CHECK_THROWS_WITH_AS((void)gfdcli::validate_config(doc),
                         doctest::Contains("operator.mesh"), config_error);
  }
  SUBCASE("source block before the gap end") {
    auto doc = parse_minimal();
    doc.set("source", "block1.start", "0.1");
    CHECK_THROWS_AS((void)gfdcli::validate_config(doc).make_source(), config_error);
  }
  SUBCASE("unsupported block profile") {
    auto doc = parse_minimal();
    doc.set("source", "block1.profile", "sawtooth");
    CHECK_THROWS_WITH_AS((void)gfdcli::validate_config(doc),
                         doctest::Contains("block1.profile"), config_error);
  }
}

TEST_CASE("config normalization is a fixed point") {
  const auto config = gfdcli::validate_config(parse_minimal());
  CHECK_FALSE(config.normalized.empty());
  const auto reparsed = gfdcli::validate_config(gfdcli::parse_document(config.normalized));
  CHECK(reparsed.normalized == config.normalized);
  CHECK(reparsed.horizon == config.horizon);
  CHECK(reparsed.obs_start_index == config.obs_start_index);
  CHECK(reparsed.gap_end_index == config.gap_end_index);
}

TEST_CASE("config materializers build consistent objects") {
  const auto config = gfdcli::validate_config(parse_minimal());
  const auto grid = config.make_grid();
  CHECK(grid.cell_count() == 256);
  CHECK(grid.horizon() == doctest::Approx(2.0));
  // Defaults: t0 at N/4, gap one tenth of the run long.
  CHECK(grid.obs_start_index() == 64);
  CHECK(grid.gap_end_index() == 89);

  const auto op = config.make_operator();
  CHECK(op.mode_count() == 4);
  CHECK(op.eigenvalues()[1] == doctest::Approx(4.0).epsilon(1e-12));

  const auto kernel = config.make_kernel();
  CHECK(kernel.family() == gfd::KernelFamily::Tempered);
  CHECK(kernel.order() == doctest::Approx(0.4));

  const auto source = config.make_source();
  CHECK(source.structure == gfd::SourceStructure::PartitionedGap);
  const std::size_t start = static_cast<std::size_t>(std::lround(0.75 / grid.step()));
  CHECK(source.mode_values[0][start] == doctest::Approx(1.0));
  CHECK(source.mode_values[0][start - 1] == 0.0);

  const auto u0 = config.make_initial(4);
  CHECK(u0 == std::vector<double>(4, 0.0));
}

TEST_CASE("overrides are applied before validation") {
  const fs::path dir = temp_dir("overrides");
  const fs::path ini = dir / "run.ini";
  std::ofstream(ini) << kMinimalConfig;
  const auto config = gfdcli::load_config(ini.string(), {"grid.cells=512", "noise.seed=7"});
  CHECK(config.make_grid().cell_count() == 512);
  CHECK(config.seed == 7);
  CHECK_THROWS_AS((void)gfdcli::load_config(ini.string(), {"grid.cells"}), config_error);
  CHECK_THROWS_AS((void)gfdcli::load_config((dir / "absent.ini").string(), {}), config_error);
}

TEST_CASE("CSV round trip preserves doubles exactly") {
  const fs::path dir = temp_dir("csv");
  const fs::path file = dir / "pair.csv";
  const std::vector<double> t = {0.0, 0.1, 1.0 / 3.0, 2.123456789012345e-7};
  const std::vector<double> v = {1.0, -2.5, 3.14159265358979324, 8.98846567431158e+307};
  gfdcli::write_csv(file.string(), "t,value", t, v, "test payload");

  const auto rows = gfdcli::read_csv(file.string());
  REQUIRE(rows.first.size() == t.size());
  for (std::size_t i = 0; i < rows.first.size(); ++i) {
    CHECK(rows.first[i] == t[i]);
    CHECK(rows.second[i] == v[i]);
  }

  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# test payload");
  std::getline(in, line);
  CHECK(line == "t,value");

  CHECK_THROWS_AS((void)gfdcli::read_csv((dir / "absent.csv").string()), config_error);
}

TEST_CASE("noise injection is deterministic and calibrated") {
  std::vector<double> base(10000);
  for (std::size_t i = 0; i < base.size(); ++i) base[i] = std::sin(0.01 * i);

  SUBCASE("level zero leaves the data untouched and draws nothing") {
    gfdcli::NoiseInjector quiet(42);
    auto copy = base;
    quiet.perturb(copy, 0.0);
    CHECK(copy == base);
    gfdcli::NoiseInjector fresh(42);
    CHECK(quiet.standard_normal() == fresh.standard_normal());
  }
  SUBCASE("same seed reproduces, different seed differs") {
    auto a = base, b = base, c = base;
    gfdcli::NoiseInjector(42).perturb(a, 1e-3);
    gfdcli::NoiseInjector(42).perturb(b, 1e-3);
    gfdcli::NoiseInjector(43).perturb(c, 1e-3);
    CHECK(a == b);
    CHECK(a != c);
  }
  SUBCASE("sample moments match the requested level") {
    auto noisy = base;
    const double level = 1e-2;
    gfdcli::NoiseInjector(7).perturb(noisy, level);
    const double sigma = level * 1.0;  // max |sin| over 10k samples ~ 1
    double mean = 0.0, var = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) mean += noisy[i] - base[i];
    mean /= static_cast<double>(base.size());
    for (std::size_t i = 0; i < base.size(); ++i)
      var += (noisy[i] - base[i] - mean) * (noisy[i] - base[i] - mean);
    var /= static_cast<double>(base.size() - 1);
    CHECK(std::abs(mean) <= 5 * sigma / std::sqrt(10000.0));
    CHECK(var == doctest::Approx(sigma * sigma).epsilon(0.1));
  }
}

TEST_CASE("manifest hashing and serialization") {
  CHECK(gfdcli::fnv1a("") == 0xcbf29ce484222325ull);
  CHECK(gfdcli::fnv1a("a") == 0xaf63dc4c8601ec8cull);
  CHECK(gfdcli::hash_hex(0xcbf29ce484222325ull) == "cbf29ce484222325");

  const fs::path dir = temp_dir("manifest");
  gfdcli::write_text((dir / "data.csv").string(), "t,value\n0,1\n");

  gfdcli::RunManifest manifest("simulate", "[grid]\nhorizon = 1\n", 42);
  manifest.add_file(dir.string(), "data.csv");
  manifest.add_timing("solve", 12.5);
  manifest.add_metric("residual", 1e-9);
  manifest.write(dir.string());

  std::ifstream in(dir / "manifest.json");
  REQUIRE(in.good());
  const auto parsed = nlohmann::json::parse(in);
  CHECK(parsed.at("version") == gfdcli::kToolVersion);
  CHECK(parsed.at("command") == "simulate");
  CHECK(parsed.at("seed") == 42);
  CHECK(parsed.at("config_hash") ==
        gfdcli::hash_hex(gfdcli::fnv1a("[grid]\nhorizon = 1\n")));
  CHECK(parsed.at("files").at("data.csv") == gfdcli::hash_hex(gfdcli::fnv1a("t,value\n0,1\n")));
  CHECK(parsed.at("timings_ms").at("solve") == doctest::Approx(12.5));
  CHECK(parsed.at("metrics").at("residual") == doctest::Approx(1e-9));
}
