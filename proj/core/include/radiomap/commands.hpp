#pragma once

#include <string>

#include "radiomap/run_config.hpp"

namespace radiomap {

// CLI subcommand bodies. Each is a pure function of (config, seed): outputs
// land under the run directory together with the resolved config copy.
// Return value is the process exit code; errors print to stderr.
int cmd_simulate(const std::string& config_path, const CliOverrides& overrides);
int cmd_reconstruct(const std::string& config_path, const CliOverrides& overrides);
int cmd_evaluate(const std::string& config_path, const CliOverrides& overrides);
int cmd_sweep(const std::string& config_path, const CliOverrides& overrides);

}  // namespace radiomap
