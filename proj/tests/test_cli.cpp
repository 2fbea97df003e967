// Drives the radiomap binary (path in RADIOMAP_BIN) as a subprocess.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

std::string binary_path() {
  const char* bin = std::getenv("RADIOMAP_BIN");
  REQUIRE_MESSAGE(bin != nullptr, "RADIOMAP_BIN must point at the radiomap binary");
  return bin;
}

int run_cli(const std::string& args, const std::string& env_prefix = "") {
  const std::string cmd = env_prefix + "\"" + binary_path() + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), ("missing file: " + p.string()).c_str());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += (c == '\n') ? 1 : 0;
  return n;
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("radiomap_cli_test_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "scenario.json") << R"({
      "schema_version": 1,
      "area": {"xmin": 0, "ymin": 0, "xmax": 1000, "ymax": 1000},
      "stations": [
        {"x": 200, "y": 250, "pl0_db": 40, "exponent": 3.0, "d0_m": 10},
        {"x": 800, "y": 300, "pl0_db": 40, "exponent": 3.5, "d0_m": 10},
        {"x": 450, "y": 800, "pl0_db": 45, "exponent": 3.2, "d0_m": 10}
      ],
      "shadow_sigma_db": 5.0,
      "shadow_decorrelation_m": 150.0,
      "shadow_grid_n": 17,
      "meas_noise_sigma_db": 1.0,
      "pos_noise_sigma_m": 2.0,
      "mobility": {"speed_min_mps": 10, "speed_max_mps": 30, "pause_steps": 2, "step_seconds": 1},
      "seed": 21
    })";
  }
  ~Workspace() { fs::remove_all(dir); }

  std::string write_config(const std::string& name, const std::string& body) {
    const fs::path p = dir / name;
    std::ofstream(p) << body;
    return p.string();
  }
};

std::string basic_config(const std::string& estimator, int n, const std::string& out,
                         const std::string& extra = "") {
  std::ostringstream ss;
  ss << R"({"schema_version": 1, "scenario_file": "scenario.json", "n_measurements": )" << n
     << R"(, "estimator": ")" << estimator << R"(", "grid": {"nx": 12, "ny": 12}, "out_dir": ")"
     << out << "\"" << extra << "}";
  return ss.str();
}

}  // namespace

TEST_CASE("simulate writes a deterministic stream") {
  Workspace ws;
  const std::string cfg =
      ws.write_config("sim.json", basic_config("multikernel", 150, (ws.dir / "out_a").string()));
  REQUIRE(run_cli("simulate --config \"" + cfg + "\"") == 0);

  const std::string stream_a = slurp(ws.dir / "out_a" / "measurements.csv");
  CHECK(line_count(stream_a) == 151);  // header + n rows
  CHECK(fs::exists(ws.dir / "out_a" / "truth_grid.csv"));
  CHECK(fs::exists(ws.dir / "out_a" / "resolved_config.json"));
  CHECK(fs::exists(ws.dir / "out_a" / "scenario.json"));

  // Same seed, fresh out dir: identical bytes.
  REQUIRE(run_cli("simulate --config \"" + cfg + "\" --out \"" + (ws.dir / "out_b").string() +
                  "\"") == 0);
  CHECK(slurp(ws.dir / "out_b" / "measurements.csv") == stream_a);

  // A different seed changes the stream.
  REQUIRE(run_cli("simulate --config \"" + cfg + "\" --seed 99 --out \"" +
                  (ws.dir / "out_c").string() + "\"") == 0);
  CHECK(slurp(ws.dir / "out_c" / "measurements.csv") != stream_a);
}

TEST_CASE("config errors exit nonzero") {
  Workspace ws;
  CHECK(run_cli("simulate --config \"" + (ws.dir / "absent.json").string() + "\"") != 0);

  const std::string bad_key = ws.write_config(
      "bad.json",
      R"({"schema_version": 1, "scenario_file": "scenario.json", "bogus_key": 1})");
  CHECK(run_cli("simulate --config \"" + bad_key + "\"") != 0);

  const std::string bad_scenario = ws.write_config(
      "bad2.json",
      R"({"schema_version": 1, "scenario_file": "no_such_scenario.json"})");
  CHECK(run_cli("simulate --config \"" + bad_scenario + "\"") != 0);

  CHECK(run_cli("evaluate --config \"" + bad_key + "\"") != 0);
  CHECK(run_cli("frobnicate") != 0);
}

TEST_CASE("reconstruct: idw on one measurement yields a constant map") {
  Workspace ws;
  const std::string cfg =
      ws.write_config("idw.json", basic_config("idw", 1, (ws.dir / "idw_out").string()));
  REQUIRE(run_cli("reconstruct --config \"" + cfg + "\"") == 0);

  const std::string grid = slurp(ws.dir / "idw_out" / "estimate_grid.csv");
  std::istringstream lines(grid);
  std::string line;
  std::getline(lines, line);  // header
  std::string first_value;
  while (std::getline(lines, line)) {
    const std::string value = line.substr(line.rfind(',') + 1);
    if (first_value.empty()) {
      first_value = value;
    } else {
      CHECK(value == first_value);
    }
  }
  CHECK(line_count(slurp(ws.dir / "idw_out" / "diagnostics.csv")) == 2);
}

TEST_CASE("reconstruct: online estimators emit one diagnostics row per measurement") {
  Workspace ws;
  for (const std::string est : {"apsm", "multikernel"}) {
    const std::string out = (ws.dir / ("rec_" + est)).string();
    const std::string cfg = ws.write_config("rec_" + est + ".json", basic_config(est, 80, out));
    REQUIRE(run_cli("reconstruct --config \"" + cfg + "\"") == 0);
    const std::string diag = slurp(fs::path(out) / "diagnostics.csv");
    CHECK(line_count(diag) == 81);
    CHECK(fs::exists(fs::path(out) / "estimate_grid.csv"));

    // Re-run determinism, byte for byte.
    const std::string out2 = out + "_again";
    REQUIRE(run_cli("reconstruct --config \"" + cfg + "\" --out \"" + out2 + "\"") == 0);
    CHECK(slurp(fs::path(out2) / "diagnostics.csv") == diag);
    CHECK(slurp(fs::path(out2) / "estimate_grid.csv") ==
          slurp(fs::path(out) / "estimate_grid.csv"));
  }
}

TEST_CASE("estimator override switches the estimator") {
  Workspace ws;
  const std::string cfg = ws.write_config(
      "over.json", basic_config("multikernel", 40, (ws.dir / "over_out").string()));
  REQUIRE(run_cli("reconstruct --config \"" + cfg + "\" --estimator nn") == 0);
  const std::string diag = slurp(ws.dir / "over_out" / "diagnostics.csv");
  // Baseline diagnostics carry four columns, multikernel six.
  CHECK(diag.rfind("step,residual_before,residual_after,dict_size\n", 0) == 0);
  const auto resolved =
      nlohmann::json::parse(slurp(ws.dir / "over_out" / "resolved_config.json"));
  CHECK(resolved.at("estimator") == "nn");
}

TEST_CASE("reconstruct can replay an exported stream") {
  Workspace ws;
  const std::string sim_cfg =
      ws.write_config("sim.json", basic_config("multikernel", 60, (ws.dir / "sim").string()));
  REQUIRE(run_cli("simulate --config \"" + sim_cfg + "\"") == 0);

  const std::string replay_cfg = ws.write_config(
      "replay.json",
      basic_config("apsm", 60, (ws.dir / "replay").string(),
                   R"(, "measurements_csv": ")" + (ws.dir / "sim" / "measurements.csv").string() +
                       "\""));
  REQUIRE(run_cli("reconstruct --config \"" + replay_cfg + "\"") == 0);
  CHECK(line_count(slurp(ws.dir / "replay" / "diagnostics.csv")) == 61);
}

TEST_CASE("evaluate writes a report") {
  Workspace ws;
  const std::string cfg = ws.write_config(
      "eval.json",
      basic_config("nn", 100, (ws.dir / "eval_out").string(), R"(, "checkpoints": [50, 100])"));
  REQUIRE(run_cli("evaluate --config \"" + cfg + "\"") == 0);

  const auto report = nlohmann::json::parse(slurp(ws.dir / "eval_out" / "report.json"));
  CHECK(report.at("estimator") == "nn");
  CHECK(report.at("n_measurements") == 100);
  CHECK(report.at("rmse_db").get<double>() >= 0.0);
  CHECK(report.at("rmse_db").get<double>() >= report.at("mae_db").get<double>() - 1e-12);
  CHECK(report.at("grid").at("nx") == 12);
  CHECK(line_count(slurp(ws.dir / "eval_out" / "eval_grid.csv")) == 145);
  CHECK(line_count(slurp(ws.dir / "eval_out" / "learning_curve.csv")) == 3);

  // Output files are pure functions of (config, seed).
  REQUIRE(run_cli("evaluate --config \"" + cfg + "\" --out \"" + (ws.dir / "eval2").string() +
                  "\"") == 0);
  CHECK(slurp(ws.dir / "eval2" / "report.json") == slurp(ws.dir / "eval_out" / "report.json"));
  CHECK(slurp(ws.dir / "eval2" / "eval_grid.csv") ==
        slurp(ws.dir / "eval_out" / "eval_grid.csv"));
  CHECK(slurp(ws.dir / "eval2" / "learning_curve.csv") ==
        slurp(ws.dir / "eval_out" / "learning_curve.csv"));
}

TEST_CASE("sweep runs the cartesian grid, order-independent") {
  Workspace ws;
  const std::string sweep_extra =
      R"(, "sweep": {"lambda_dict": [0.0, 0.01], "epsilon_db": [0.5, 1.0]})";
  const std::string cfg = ws.write_config(
      "sweep.json", basic_config("multikernel", 60, (ws.dir / "sweep_a").string(), sweep_extra));
  REQUIRE(run_cli("sweep --config \"" + cfg + "\"") == 0);
  const std::string table = slurp(ws.dir / "sweep_a" / "sweep.csv");
  CHECK(line_count(table) == 5);  // header + 2x2 rows
  CHECK(table.rfind("epsilon_db,lambda_dict,rmse_db", 0) == 0);

  // Shuffled value order and a single worker: same row set.
  const std::string shuffled_extra =
      R"(, "sweep": {"lambda_dict": [0.01, 0.0], "epsilon_db": [1.0, 0.5]})";
  const std::string cfg2 = ws.write_config(
      "sweep2.json",
      basic_config("multikernel", 60, (ws.dir / "sweep_b").string(), shuffled_extra));
  REQUIRE(run_cli("sweep --config \"" + cfg2 + "\"", "RADIOMAP_THREADS=1 ") == 0);

  auto rows = [](const std::string& text) {
    std::vector<std::string> out;
    std::istringstream ss(text);
    std::string line;
    std::getline(ss, line);
    while (std::getline(ss, line)) out.push_back(line);
    std::sort(out.begin(), out.end());
    return out;
  };
  CHECK(rows(table) == rows(slurp(ws.dir / "sweep_b" / "sweep.csv")));

  // Empty parameter grid: empty table.
  const std::string cfg3 = ws.write_config(
      "sweep3.json",
      basic_config("multikernel", 60, (ws.dir / "sweep_c").string(), R"(, "sweep": {})"));
  REQUIRE(run_cli("sweep --config \"" + cfg3 + "\"") == 0);
  CHECK(line_count(slurp(ws.dir / "sweep_c" / "sweep.csv")) == 1);
}
