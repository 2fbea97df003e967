#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "radiomap/commands.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> estimator;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "Run configuration JSON")->required();
  cmd->add_option("--seed", flags.seed, "Seed override (u64)");
  cmd->add_option("--out", flags.out, "Output directory override");
  cmd->add_option("--estimator", flags.estimator,
                  "Estimator override: apsm|multikernel|idw|nn");
}

radiomap::CliOverrides to_overrides(const CommonFlags& flags) {
  radiomap::CliOverrides o;
  o.seed = flags.seed;
  o.out_dir = flags.out;
  o.estimator = flags.estimator;
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radiomap: cellular path-loss simulation and online map reconstruction"};
  app.require_subcommand(1);

  CommonFlags simulate_flags, reconstruct_flags, evaluate_flags, sweep_flags;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Generate a measurement stream and truth grid");
  add_common(simulate, simulate_flags);
  CLI::App* reconstruct =
      app.add_subcommand("reconstruct", "Run an estimator over a stream, dump map + diagnostics");
  add_common(reconstruct, reconstruct_flags);
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score an estimator against the ground truth");
  add_common(evaluate, evaluate_flags);
  CLI::App* sweep = app.add_subcommand("sweep", "Run a parameter grid and tabulate reports");
  add_common(sweep, sweep_flags);

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    return radiomap::cmd_simulate(simulate_flags.config, to_overrides(simulate_flags));
  }
  if (reconstruct->parsed()) {
    return radiomap::cmd_reconstruct(reconstruct_flags.config, to_overrides(reconstruct_flags));
  }
  if (evaluate->parsed()) {
    return radiomap::cmd_evaluate(evaluate_flags.config, to_overrides(evaluate_flags));
  }
  return radiomap::cmd_sweep(sweep_flags.config, to_overrides(sweep_flags));
}
