#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "radiomap/csv.hpp"
#include "radiomap/errors.hpp"
#include "radiomap/run_config.hpp"
#include "radiomap/scenario_io.hpp"

using namespace radiomap;

namespace {

std::string scenario_text() {
  return R"({
    "schema_version": 1,
    "area": {"xmin": 0, "ymin": 0, "xmax": 1000, "ymax": 1000},
    "stations": [
      {"x": 200, "y": 250, "pl0_db": 40, "exponent": 3.0, "d0_m": 10},
      {"x": 800, "y": 300, "pl0_db": 40, "exponent": 3.5, "d0_m": 10}
    ],
    "shadow_sigma_db": 6.0,
    "shadow_decorrelation_m": 150.0,
    "shadow_grid_n": 17,
    "meas_noise_sigma_db": 1.0,
    "pos_noise_sigma_m": 2.0,
    "mobility": {"speed_min_mps": 10, "speed_max_mps": 30, "pause_steps": 2, "step_seconds": 1},
    "seed": 42
  })";
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("radiomap_io_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

}  // namespace

TEST_CASE("scenario JSON round trip") {
  const ScenarioConfig cfg = parse_scenario_json(scenario_text());
  CHECK(cfg.area.xmax == 1000.0);
  CHECK(cfg.stations.size() == 2);
  CHECK(cfg.stations[1].exponent == 3.5);
  CHECK(cfg.shadow_grid_n == 17);
  CHECK(cfg.seed == 42);

  const ScenarioConfig back = parse_scenario_json(scenario_to_json(cfg));
  CHECK(back.area.xmin == cfg.area.xmin);
  CHECK(back.stations.size() == cfg.stations.size());
  CHECK(back.stations[0].pl0_db == cfg.stations[0].pl0_db);
  CHECK(back.mobility.pause_steps == cfg.mobility.pause_steps);
  CHECK(back.seed == cfg.seed);
}

TEST_CASE("scenario parsing is strict") {
  CHECK_THROWS_AS(parse_scenario_json("{"), ConfigError);
  CHECK_THROWS_AS(parse_scenario_json(R"({"schema_version": 2, "area": {}, "stations": [], "seed": 1})"),
                  ConfigError);

  // Unknown key anywhere is an error, not a warning.
  std::string with_unknown = scenario_text();
  with_unknown.insert(with_unknown.rfind('}'), R"(, "unknown_key": 3)");
  CHECK_THROWS_AS(parse_scenario_json(with_unknown), ConfigError);

  // Missing required keys.
  CHECK_THROWS_AS(parse_scenario_json(R"({"schema_version": 1, "seed": 1})"), ConfigError);
}

TEST_CASE("measurement CSV round trip and validation") {
  TempDir tmp;
  const std::string path = (tmp.path / "stream.csv").string();

  std::vector<Measurement> ms{
      {{0.125, 17.25}, 61.0625, 1},
      {{333.333333333333314, 0.1}, 75.000000000000014, 2},
      {{999.0, 999.0}, 0.0, 5},
  };
  write_measurements_csv(path, ms);
  const auto back = read_measurements_csv(path);
  REQUIRE(back.size() == ms.size());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    CHECK(back[i].time_index == ms[i].time_index);
    CHECK(back[i].position.x == ms[i].position.x);
    CHECK(back[i].position.y == ms[i].position.y);
    CHECK(back[i].path_loss_db == ms[i].path_loss_db);
  }

  CHECK_THROWS_AS(read_measurements_csv((tmp.path / "missing.csv").string()), IoError);

  std::ofstream bad_header(tmp.path / "bad1.csv");
  bad_header << "time,x,y,loss\n1,0,0,50\n";
  bad_header.close();
  CHECK_THROWS_AS(read_measurements_csv((tmp.path / "bad1.csv").string()), IoError);

  std::ofstream negative(tmp.path / "bad2.csv");
  negative << "time_index,x,y,path_loss_db\n1,0,0,-5\n";
  negative.close();
  CHECK_THROWS_AS(read_measurements_csv((tmp.path / "bad2.csv").string()), IoError);

  std::ofstream stale(tmp.path / "bad3.csv");
  stale << "time_index,x,y,path_loss_db\n2,0,0,50\n2,1,1,60\n";
  stale.close();
  CHECK_THROWS_AS(read_measurements_csv((tmp.path / "bad3.csv").string()), IoError);
}

TEST_CASE("run config parsing") {
  TempDir tmp;
  save_scenario((tmp.path / "scenario.json").string(), parse_scenario_json(scenario_text()));

  const std::string config_text = R"({
    "schema_version": 1,
    "scenario_file": "scenario.json",
    "n_measurements": 500,
    "estimator": "multikernel",
    "estimator_params": {
      "sigma0_m": 40,
      "num_kernels": 6,
      "lambda_dict": 0.01,
      "dictionary": {"max_size": 80, "coherence_threshold": 0.93}
    },
    "grid": {"nx": 25, "ny": 30},
    "checkpoints": [100, 500],
    "out_dir": "out",
    "seed": 9,
    "sweep": {"lambda_dict": [0.0, 0.01], "epsilon_db": [0.5, 1.0]}
  })";
  const std::string config_path = (tmp.path / "run.json").string();
  std::ofstream(config_path) << config_text;

  const RunConfig cfg = load_run_config(config_path);
  CHECK(cfg.n_measurements == 500);
  CHECK(cfg.grid_nx == 25);
  CHECK(cfg.grid_ny == 30);
  CHECK(cfg.checkpoints == std::vector<std::size_t>{100, 500});
  CHECK(cfg.seed_override.has_value());
  REQUIRE(std::holds_alternative<MkSetup>(cfg.setup));
  const MkSetup& mk = std::get<MkSetup>(cfg.setup);
  CHECK(mk.bank.size() == 6);
  CHECK(mk.cfg.update.lambda_dict == 0.01);
  CHECK(mk.dict.max_size == 80);
  // Reference kernel defaults to the bank's median bandwidth.
  CHECK(mk.dict.reference_kernel.bandwidth_m ==
        mk.bank.median_bandwidth_kernel().bandwidth_m);
  CHECK(cfg.sweep.size() == 2);

  // Unknown keys rejected at every level.
  std::string bad = config_text;
  bad.insert(bad.rfind('}'), R"(, "bogus": 1)");
  CHECK_THROWS_AS(parse_run_config_json(bad, tmp.path.string()), ConfigError);

  std::string bad_param = config_text;
  bad_param.replace(bad_param.find("\"sigma0_m\""), 10, "\"sigma_zero\"");
  CHECK_THROWS_AS(parse_run_config_json(bad_param, tmp.path.string()), ConfigError);

  // Missing scenario file fails at load time.
  std::string missing = config_text;
  missing.replace(missing.find("scenario.json"), 13, "nonexistent.js");
  const std::string missing_path = (tmp.path / "missing.json").string();
  std::ofstream(missing_path) << missing;
  CHECK_THROWS_AS(load_run_config(missing_path), ConfigError);
}

TEST_CASE("sweep parameters and overrides") {
  MkSetup mk;
  mk.bank = KernelBank::geometric(KernelFamily::kGaussian, 50.0, 4);
  mk.dict = {50, 0.9, mk.bank.median_bandwidth_kernel()};
  EstimatorSetup setup = mk;
  set_sweep_parameter(setup, "lambda_dict", 0.25);
  CHECK(std::get<MkSetup>(setup).cfg.update.lambda_dict == 0.25);
  CHECK_THROWS_AS(set_sweep_parameter(setup, "nonsense", 1.0), ConfigError);

  ApsmSetup apsm;
  apsm.kernel = {KernelFamily::kGaussian, 100.0};
  apsm.dict = {50, 0.9, apsm.kernel};
  EstimatorSetup asetup = apsm;
  set_sweep_parameter(asetup, "bandwidth_m", 222.0);
  CHECK(std::get<ApsmSetup>(asetup).kernel.bandwidth_m == 222.0);
  CHECK_THROWS_AS(set_sweep_parameter(asetup, "relaxation_mu", 5.0), ConfigError);
}
