#include "radiomap/scenario_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>

#include "json.hpp"
#include "radiomap/errors.hpp"

namespace radiomap {

namespace {

using nlohmann::json;

constexpr int kSchemaVersion = 1;

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + " must be a JSON object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* key : allowed) {
      if (item.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) throw ConfigError("unknown key '" + item.key() + "' in " + context);
  }
}

const json& require(const json& obj, const char* key, const std::string& context) {
  if (!obj.contains(key)) {
    throw ConfigError("missing key '" + std::string(key) + "' in " + context);
  }
  return obj.at(key);
}

double as_number(const json& v, const std::string& what) {
  if (!v.is_number()) throw ConfigError(what + " must be a number");
  return v.get<double>();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ScenarioConfig parse_scenario_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario JSON parse error: ") + e.what());
  }

  check_keys(j,
             {"schema_version", "area", "stations", "shadow_sigma_db",
              "shadow_decorrelation_m", "shadow_grid_n", "meas_noise_sigma_db",
              "pos_noise_sigma_m", "mobility", "seed"},
             "scenario");
  if (require(j, "schema_version", "scenario").get<int>() != kSchemaVersion) {
    throw ConfigError("unsupported scenario schema_version");
  }

  ScenarioConfig cfg;
  const json& area = require(j, "area", "scenario");
  check_keys(area, {"xmin", "ymin", "xmax", "ymax"}, "scenario.area");
  cfg.area.xmin = as_number(require(area, "xmin", "area"), "area.xmin");
  cfg.area.ymin = as_number(require(area, "ymin", "area"), "area.ymin");
  cfg.area.xmax = as_number(require(area, "xmax", "area"), "area.xmax");
  cfg.area.ymax = as_number(require(area, "ymax", "area"), "area.ymax");

  const json& stations = require(j, "stations", "scenario");
  if (!stations.is_array() || stations.empty()) {
    throw ConfigError("scenario.stations must be a non-empty array");
  }
  for (const auto& s : stations) {
    check_keys(s, {"x", "y", "pl0_db", "exponent", "d0_m"}, "scenario.stations[]");
    BaseStation bs;
    bs.position.x = as_number(require(s, "x", "station"), "station.x");
    bs.position.y = as_number(require(s, "y", "station"), "station.y");
    bs.pl0_db = as_number(require(s, "pl0_db", "station"), "station.pl0_db");
    bs.exponent = as_number(require(s, "exponent", "station"), "station.exponent");
    bs.d0_m = as_number(require(s, "d0_m", "station"), "station.d0_m");
    cfg.stations.push_back(bs);
  }

  cfg.shadow_sigma_db = j.value("shadow_sigma_db", 0.0);
  cfg.shadow_decorrelation_m = j.value("shadow_decorrelation_m", 100.0);
  cfg.shadow_grid_n = j.value("shadow_grid_n", std::size_t{33});
  cfg.meas_noise_sigma_db = j.value("meas_noise_sigma_db", 0.0);
  cfg.pos_noise_sigma_m = j.value("pos_noise_sigma_m", 0.0);

  if (j.contains("mobility")) {
    const json& mob = j.at("mobility");
    check_keys(mob, {"speed_min_mps", "speed_max_mps", "pause_steps", "step_seconds"},
               "scenario.mobility");
    cfg.mobility.speed_min_mps = mob.value("speed_min_mps", cfg.mobility.speed_min_mps);
    cfg.mobility.speed_max_mps = mob.value("speed_max_mps", cfg.mobility.speed_max_mps);
    cfg.mobility.pause_steps = mob.value("pause_steps", cfg.mobility.pause_steps);
    cfg.mobility.step_seconds = mob.value("step_seconds", cfg.mobility.step_seconds);
  }

  const json& seed = require(j, "seed", "scenario");
  if (!seed.is_number_unsigned()) throw ConfigError("scenario.seed must be a u64");
  cfg.seed = seed.get<std::uint64_t>();

  validate(cfg);
  return cfg;
}

std::string scenario_to_json(const ScenarioConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["area"] = {{"xmin", cfg.area.xmin},
               {"ymin", cfg.area.ymin},
               {"xmax", cfg.area.xmax},
               {"ymax", cfg.area.ymax}};
  j["stations"] = json::array();
  for (const auto& bs : cfg.stations) {
    j["stations"].push_back({{"x", bs.position.x},
                             {"y", bs.position.y},
                             {"pl0_db", bs.pl0_db},
                             {"exponent", bs.exponent},
                             {"d0_m", bs.d0_m}});
  }
  j["shadow_sigma_db"] = cfg.shadow_sigma_db;
  j["shadow_decorrelation_m"] = cfg.shadow_decorrelation_m;
  j["shadow_grid_n"] = cfg.shadow_grid_n;
  j["meas_noise_sigma_db"] = cfg.meas_noise_sigma_db;
  j["pos_noise_sigma_m"] = cfg.pos_noise_sigma_m;
  j["mobility"] = {{"speed_min_mps", cfg.mobility.speed_min_mps},
                   {"speed_max_mps", cfg.mobility.speed_max_mps},
                   {"pause_steps", cfg.mobility.pause_steps},
                   {"step_seconds", cfg.mobility.step_seconds}};
  j["seed"] = cfg.seed;
  return j.dump(2) + "\n";
}

ScenarioConfig load_scenario(const std::string& path) {
  return parse_scenario_json(read_file(path));
}

void save_scenario(const std::string& path, const ScenarioConfig& cfg) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << scenario_to_json(cfg);
}

}  // namespace radiomap
