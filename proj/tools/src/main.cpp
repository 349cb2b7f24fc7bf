#include <clocale>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gfd/errors.hpp"
#include "gfdcli/commands.hpp"
#include "gfdcli/config.hpp"
#include "gfdcli/manifest.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::string data_dir;
  std::vector<std::string> overrides;
  long seed = -1;
};

void add_common_options(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("-c,--config", opts.config_path, "Experiment config file (INI)")
      ->required();
  cmd->add_option("-o,--out-dir", opts.out_dir, "Output directory (default: [output] dir)");
  cmd->add_option("-d,--data-dir", opts.data_dir,
                  "Input directory with simulate outputs (default: the output directory)");
  cmd->add_option("-O,--override", opts.overrides,
                  "Config override section.key=value (repeatable)");
  cmd->add_option("-s,--seed", opts.seed, "Noise seed override");
}

gfdcli::CommandContext make_context(const CliOptions& opts) {
  std::vector<std::string> overrides = opts.overrides;
  if (opts.seed >= 0) overrides.push_back("noise.seed=" + std::to_string(opts.seed));
  gfdcli::CommandContext ctx{gfdcli::load_config(opts.config_path, overrides), "", ""};
  ctx.out_dir = opts.out_dir.empty() ? ctx.config.output_dir : opts.out_dir;
  ctx.data_dir = !opts.data_dir.empty()
                     ? opts.data_dir
                     : (!ctx.config.data_dir.empty() ? ctx.config.data_dir : ctx.out_dir);
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_NUMERIC, "C");

  CLI::App app{"Generalized fractional diffusion: forward simulation and inverse recovery"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gfdcli::kToolVersion);

  const std::vector<std::pair<std::string, std::string>> descriptions = {
      {"simulate", "Run the direct problem and write per-mode traces"},
      {"sonine", "Compute the Sonine partner kernel M * K = 1"},
      {"ml", "Tabulate the Mittag-Leffler relaxation of the first mode"},
      {"invert", "Tabulate the first mode's relaxation via Laplace contour inversion"},
      {"recover-kernel", "Recover the memory kernel from mode traces (known eigenvalues)"},
      {"recover-product", "Recover kernel and eigenvalues up to gauge (unknown eigenvalues)"},
      {"recover-history", "Recover initial data and pre-window source history"},
      {"recover-functional", "Fit a parametric kernel to one scalar observation trace"},
      {"recover-measure", "Recover the distributed-order measure from eigenvalues"},
      {"demo-uniqueness", "Contrast observation traces of two kernel orders"},
  };
  const std::map<std::string, std::function<int(const gfdcli::CommandContext&)>> runners = {
      {"simulate", gfdcli::run_simulate},
      {"sonine", gfdcli::run_sonine},
      {"ml", gfdcli::run_ml},
      {"invert", gfdcli::run_invert},
      {"recover-kernel", gfdcli::run_recover_kernel},
      {"recover-product", gfdcli::run_recover_product},
      {"recover-history", gfdcli::run_recover_history},
      {"recover-functional", gfdcli::run_recover_functional},
      {"recover-measure", gfdcli::run_recover_measure},
      {"demo-uniqueness", gfdcli::run_demo_uniqueness},
  };

  std::map<std::string, CliOptions> options;
  for (const auto& [name, help] : descriptions)
    add_common_options(app.add_subcommand(name, help), options[name]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return runners.at(name)(make_context(options.at(name)));
  } catch (const gfdcli::config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const gfd::precondition_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const gfd::error& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
