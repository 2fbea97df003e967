#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "radiomap/eval.hpp"

namespace radiomap {

// Resolved run configuration for the CLI. Parsing is strict: unknown keys
// are errors, referenced files must exist.
struct RunConfig {
  std::string scenario_file;
  std::size_t n_measurements = 1000;
  std::string estimator = "multikernel";  // apsm | multikernel | idw | nn
  EstimatorSetup setup;
  std::string estimator_params_json = "{}";  // raw params, kept for re-parses
  std::size_t grid_nx = 50;
  std::size_t grid_ny = 50;
  std::vector<std::size_t> checkpoints;
  std::string out_dir = "run_out";
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> measurements_csv;  // reconstruct from file instead of simulating
  // Sweep axes: parameter name -> values; runs the cartesian product.
  std::map<std::string, std::vector<double>> sweep;
};

struct CliOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> estimator;
};

// Loads and validates a run config; `base_dir` resolves relative file
// references (defaults to the config file's directory in load_run_config).
RunConfig load_run_config(const std::string& path);
RunConfig parse_run_config_json(const std::string& text, const std::string& base_dir);

// Re-parse the estimator setup for a given estimator name with parameter
// overrides applied (used by sweep and --estimator).
void apply_overrides(RunConfig& cfg, const CliOverrides& overrides);

// Names a sweepable estimator parameter and sets it; throws ConfigError for
// unknown parameters.
void set_sweep_parameter(EstimatorSetup& setup, const std::string& name, double value);

std::string run_config_to_json(const RunConfig& cfg);

}  // namespace radiomap
