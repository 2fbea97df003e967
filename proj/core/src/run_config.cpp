#include "radiomap/run_config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

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

std::vector<double> as_weights(const json& v) {
  std::vector<double> w;
  for (const auto& x : v) w.push_back(x.get<double>());
  return w;
}

KernelSpec parse_kernel(const json& params, const char* family_key, const char* bw_key,
                        const KernelSpec& fallback) {
  KernelSpec k = fallback;
  if (params.contains(family_key)) {
    k.family = kernel_family_from_string(params.at(family_key).get<std::string>());
  }
  if (params.contains(bw_key)) k.bandwidth_m = params.at(bw_key).get<double>();
  return k;
}

DictionaryConfig parse_dictionary(const json& params, const KernelSpec& default_reference) {
  DictionaryConfig dict;
  dict.reference_kernel = default_reference;
  if (!params.contains("dictionary")) return dict;
  const json& d = params.at("dictionary");
  check_keys(d, {"max_size", "coherence_threshold", "reference_family", "reference_bandwidth_m"},
             "estimator_params.dictionary");
  dict.max_size = d.value("max_size", dict.max_size);
  dict.coherence_threshold = d.value("coherence_threshold", dict.coherence_threshold);
  dict.reference_kernel =
      parse_kernel(d, "reference_family", "reference_bandwidth_m", dict.reference_kernel);
  return dict;
}

EstimatorSetup build_setup(const std::string& estimator, const json& params) {
  if (estimator == "apsm") {
    check_keys(params,
               {"kernel_family", "bandwidth_m", "epsilon_db", "window_q", "relaxation_mu",
                "weights", "dictionary"},
               "estimator_params");
    ApsmSetup setup;
    setup.kernel = parse_kernel(params, "kernel_family", "bandwidth_m",
                                {KernelFamily::kGaussian, 200.0});
    setup.cfg.epsilon_db = params.value("epsilon_db", setup.cfg.epsilon_db);
    setup.cfg.window_q = params.value("window_q", setup.cfg.window_q);
    setup.cfg.relaxation_mu = params.value("relaxation_mu", setup.cfg.relaxation_mu);
    if (params.contains("weights")) setup.cfg.weights = as_weights(params.at("weights"));
    setup.dict = parse_dictionary(params, setup.kernel);
    validate(setup.cfg);
    validate(setup.dict);
    return setup;
  }
  if (estimator == "multikernel") {
    check_keys(params,
               {"kernel_family", "sigma0_m", "num_kernels", "bandwidths", "epsilon_db",
                "step_gamma", "lambda_kernel", "lambda_dict", "reweight_delta", "window_q",
                "weights", "reweight_period", "prune_tol", "prune_enabled", "dictionary"},
               "estimator_params");
    MkSetup setup;
    KernelFamily family = KernelFamily::kGaussian;
    if (params.contains("kernel_family")) {
      family = kernel_family_from_string(params.at("kernel_family").get<std::string>());
    }
    if (params.contains("bandwidths")) {
      for (const auto& b : params.at("bandwidths")) {
        setup.bank.kernels.push_back({family, b.get<double>()});
      }
    } else {
      setup.bank = KernelBank::geometric(family, params.value("sigma0_m", 50.0),
                                         params.value("num_kernels", std::size_t{8}));
    }
    setup.cfg.update.epsilon_db = params.value("epsilon_db", setup.cfg.update.epsilon_db);
    setup.cfg.update.step_gamma = params.value("step_gamma", setup.cfg.update.step_gamma);
    setup.cfg.update.lambda_kernel =
        params.value("lambda_kernel", setup.cfg.update.lambda_kernel);
    setup.cfg.update.lambda_dict = params.value("lambda_dict", setup.cfg.update.lambda_dict);
    setup.cfg.update.reweight_delta =
        params.value("reweight_delta", setup.cfg.update.reweight_delta);
    setup.cfg.update.window_q = params.value("window_q", setup.cfg.update.window_q);
    if (params.contains("weights")) setup.cfg.update.weights = as_weights(params.at("weights"));
    setup.cfg.reweight_period = params.value("reweight_period", setup.cfg.reweight_period);
    setup.cfg.prune_tol = params.value("prune_tol", setup.cfg.prune_tol);
    setup.cfg.prune_enabled = params.value("prune_enabled", setup.cfg.prune_enabled);
    setup.dict = parse_dictionary(params, setup.bank.median_bandwidth_kernel());
    validate(setup.bank);
    validate(setup.cfg.update);
    validate(setup.dict);
    return setup;
  }
  if (estimator == "idw") {
    check_keys(params, {"power"}, "estimator_params");
    IdwSetup setup;
    setup.power = params.value("power", setup.power);
    if (!(setup.power > 0.0)) throw ConfigError("idw power must be > 0");
    return setup;
  }
  if (estimator == "nn") {
    check_keys(params, {}, "estimator_params");
    return NnSetup{};
  }
  throw ConfigError("unknown estimator: " + estimator +
                    " (expected apsm|multikernel|idw|nn)");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

RunConfig parse_run_config_json(const std::string& text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("run config JSON parse error: ") + e.what());
  }

  check_keys(j,
             {"schema_version", "scenario_file", "n_measurements", "estimator",
              "estimator_params", "grid", "checkpoints", "out_dir", "seed",
              "measurements_csv", "sweep"},
             "run config");
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != kSchemaVersion) {
    throw ConfigError("run config requires schema_version = 1");
  }

  RunConfig cfg;
  if (!j.contains("scenario_file")) throw ConfigError("run config needs scenario_file");
  cfg.scenario_file = j.at("scenario_file").get<std::string>();
  if (!base_dir.empty() && !std::filesystem::path(cfg.scenario_file).is_absolute()) {
    cfg.scenario_file = (std::filesystem::path(base_dir) / cfg.scenario_file).string();
  }

  cfg.n_measurements = j.value("n_measurements", cfg.n_measurements);
  if (cfg.n_measurements == 0) throw ConfigError("n_measurements must be >= 1");
  cfg.estimator = j.value("estimator", cfg.estimator);

  json params = json::object();
  if (j.contains("estimator_params")) params = j.at("estimator_params");
  cfg.estimator_params_json = params.dump();
  cfg.setup = build_setup(cfg.estimator, params);

  if (j.contains("grid")) {
    const json& g = j.at("grid");
    check_keys(g, {"nx", "ny"}, "run config.grid");
    cfg.grid_nx = g.value("nx", cfg.grid_nx);
    cfg.grid_ny = g.value("ny", cfg.grid_ny);
  }
  if (cfg.grid_nx < 2 || cfg.grid_ny < 2) throw ConfigError("grid needs nx, ny >= 2");

  if (j.contains("checkpoints")) {
    for (const auto& c : j.at("checkpoints")) {
      cfg.checkpoints.push_back(c.get<std::size_t>());
    }
  }
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed must be a u64");
    cfg.seed_override = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("measurements_csv")) {
    std::string p = j.at("measurements_csv").get<std::string>();
    if (!base_dir.empty() && !std::filesystem::path(p).is_absolute()) {
      p = (std::filesystem::path(base_dir) / p).string();
    }
    cfg.measurements_csv = p;
  }
  if (j.contains("sweep")) {
    const json& sweep = j.at("sweep");
    if (!sweep.is_object()) throw ConfigError("sweep must map parameter names to arrays");
    for (const auto& item : sweep.items()) {
      std::vector<double> values;
      for (const auto& v : item.value()) values.push_back(v.get<double>());
      cfg.sweep[item.key()] = values;
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  const std::string base = std::filesystem::path(path).parent_path().string();
  RunConfig cfg = parse_run_config_json(read_file(path), base);
  if (!std::filesystem::exists(cfg.scenario_file)) {
    throw ConfigError("scenario_file does not exist: " + cfg.scenario_file);
  }
  if (cfg.measurements_csv && !std::filesystem::exists(*cfg.measurements_csv)) {
    throw ConfigError("measurements_csv does not exist: " + *cfg.measurements_csv);
  }
  return cfg;
}

void apply_overrides(RunConfig& cfg, const CliOverrides& overrides) {
  if (overrides.seed) cfg.seed_override = *overrides.seed;
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  if (overrides.estimator && *overrides.estimator != cfg.estimator) {
    cfg.estimator = *overrides.estimator;
    // Stored params belong to the configured estimator; a different one
    // starts from defaults.
    cfg.estimator_params_json = "{}";
    cfg.setup = build_setup(cfg.estimator, json::object());
  }
}

void set_sweep_parameter(EstimatorSetup& setup, const std::string& name, double value) {
  if (auto* mk = std::get_if<MkSetup>(&setup)) {
    if (name == "lambda_dict") {
      mk->cfg.update.lambda_dict = value;
    } else if (name == "lambda_kernel") {
      mk->cfg.update.lambda_kernel = value;
    } else if (name == "epsilon_db") {
      mk->cfg.update.epsilon_db = value;
    } else if (name == "step_gamma") {
      mk->cfg.update.step_gamma = value;
    } else if (name == "reweight_delta") {
      mk->cfg.update.reweight_delta = value;
    } else {
      throw ConfigError("unknown multikernel sweep parameter: " + name);
    }
    validate(mk->cfg.update);
    return;
  }
  if (auto* apsm = std::get_if<ApsmSetup>(&setup)) {
    if (name == "epsilon_db") {
      apsm->cfg.epsilon_db = value;
    } else if (name == "relaxation_mu") {
      apsm->cfg.relaxation_mu = value;
    } else if (name == "bandwidth_m") {
      apsm->kernel.bandwidth_m = value;
    } else {
      throw ConfigError("unknown apsm sweep parameter: " + name);
    }
    validate(apsm->cfg);
    validate(apsm->kernel);
    return;
  }
  if (auto* idw = std::get_if<IdwSetup>(&setup)) {
    if (name == "power") {
      idw->power = value;
      if (!(idw->power > 0.0)) throw ConfigError("idw power must be > 0");
      return;
    }
    throw ConfigError("unknown idw sweep parameter: " + name);
  }
  throw ConfigError("estimator has no sweepable parameter: " + name);
}

std::string run_config_to_json(const RunConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario_file"] = cfg.scenario_file;
  j["n_measurements"] = cfg.n_measurements;
  j["estimator"] = cfg.estimator;
  j["estimator_params"] = json::parse(cfg.estimator_params_json);
  j["grid"] = {{"nx", cfg.grid_nx}, {"ny", cfg.grid_ny}};
  j["checkpoints"] = cfg.checkpoints;
  j["out_dir"] = cfg.out_dir;
  if (cfg.seed_override) j["seed"] = *cfg.seed_override;
  if (cfg.measurements_csv) j["measurements_csv"] = *cfg.measurements_csv;
  if (!cfg.sweep.empty()) {
    json sweep = json::object();
    for (const auto& [name, values] : cfg.sweep) sweep[name] = values;
    j["sweep"] = sweep;
  }
  return j.dump(2) + "\n";
}

}  // namespace radiomap
