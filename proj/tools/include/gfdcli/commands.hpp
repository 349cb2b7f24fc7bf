#pragma once

#include <string>

#include "gfdcli/config.hpp"

namespace gfdcli {

/// Resolved invocation: validated config plus the directories the command
/// reads from and writes to.
struct CommandContext {
  ExperimentConfig config;
  std::string out_dir;   // where outputs and manifest.json land
  std::string data_dir;  // where recovery commands find simulate outputs
};

int run_simulate(const CommandContext& ctx);
int run_sonine(const CommandContext& ctx);
int run_ml(const CommandContext& ctx);
int run_invert(const CommandContext& ctx);
int run_recover_kernel(const CommandContext& ctx);
int run_recover_product(const CommandContext& ctx);
int run_recover_history(const CommandContext& ctx);
int run_recover_functional(const CommandContext& ctx);
int run_recover_measure(const CommandContext& ctx);
int run_demo_uniqueness(const CommandContext& ctx);

}  // namespace gfdcli
