#include "radiomap/commands.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include "json.hpp"
#include "radiomap/csv.hpp"
#include "radiomap/errors.hpp"
#include "radiomap/parallel.hpp"
#include "radiomap/scenario_io.hpp"

namespace radiomap {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct LoadedRun {
  RunConfig cfg;
  ScenarioConfig scenario;
};

LoadedRun load(const std::string& config_path, const CliOverrides& overrides) {
  LoadedRun run;
  run.cfg = load_run_config(config_path);
  apply_overrides(run.cfg, overrides);
  run.scenario = load_scenario(run.cfg.scenario_file);
  if (run.cfg.seed_override) run.scenario.seed = *run.cfg.seed_override;
  return run;
}

// All outputs live under out_dir together with the resolved config and the
// effective scenario, for provenance.
void prepare_out_dir(const LoadedRun& run) {
  fs::create_directories(run.cfg.out_dir);
  std::ofstream cfg_out(fs::path(run.cfg.out_dir) / "resolved_config.json",
                        std::ios::binary);
  if (!cfg_out) throw IoError("cannot write resolved config");
  cfg_out << run_config_to_json(run.cfg);
  save_scenario((fs::path(run.cfg.out_dir) / "scenario.json").string(), run.scenario);
}

GridSpec grid_of(const LoadedRun& run) {
  return {run.scenario.area, run.cfg.grid_nx, run.cfg.grid_ny};
}

std::vector<Measurement> make_stream(const LoadedRun& run, const GroundTruthMap& map) {
  if (run.cfg.measurements_csv) {
    return read_measurements_csv(*run.cfg.measurements_csv);
  }
  const auto trajectory = gen_trajectory(run.scenario, run.cfg.n_measurements);
  return gen_measurements(map, trajectory);
}

Eigen::MatrixXd grid_values(const MapEstimate& est, const GridSpec& grid) {
  Eigen::MatrixXd values(static_cast<Eigen::Index>(grid.ny),
                         static_cast<Eigen::Index>(grid.nx));
  parallel_for(grid.nx * grid.ny, [&](std::size_t c) {
    const std::size_t ix = c % grid.nx;
    const std::size_t iy = c / grid.nx;
    values(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix)) =
        est.value_db(cell_center(grid, ix, iy));
  });
  return values;
}

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

// Baseline (idw/nn) diagnostics mirror the online estimators: residual
// against the snapshot before and after ingesting each measurement.
std::vector<StepDiagnostics> run_baseline_diagnostics(
    const std::vector<Measurement>& stream, const EstimatorSetup& setup) {
  std::vector<StepDiagnostics> diag;
  diag.reserve(stream.size());
  std::vector<Measurement> seen;
  seen.reserve(stream.size());
  const auto predict = [&](const Position& x) {
    if (seen.empty()) return 0.0;
    if (const auto* idw = std::get_if<IdwSetup>(&setup)) {
      return baseline_idw(seen, x, idw->power);
    }
    return baseline_nn(seen, x);
  };
  std::int64_t step = 0;
  for (const auto& m : stream) {
    StepDiagnostics d;
    d.step = ++step;
    d.residual_before = std::abs(m.path_loss_db - predict(m.position));
    seen.push_back(m);
    d.residual_after = std::abs(m.path_loss_db - predict(m.position));
    d.dict_size = seen.size();
    diag.push_back(d);
  }
  return diag;
}

}  // namespace

int cmd_simulate(const std::string& config_path, const CliOverrides& overrides) {
  return guarded([&] {
    const LoadedRun run = load(config_path, overrides);
    const GroundTruthMap map(run.scenario);
    const auto trajectory = gen_trajectory(run.scenario, run.cfg.n_measurements);
    const auto stream = gen_measurements(map, trajectory);

    prepare_out_dir(run);
    const fs::path out(run.cfg.out_dir);
    write_measurements_csv((out / "measurements.csv").string(), stream);

    const GridSpec grid = grid_of(run);
    const TruthMapEstimate truth(map);
    write_map_grid_csv((out / "truth_grid.csv").string(), grid, grid_values(truth, grid));
  });
}

int cmd_reconstruct(const std::string& config_path, const CliOverrides& overrides) {
  return guarded([&] {
    const LoadedRun run = load(config_path, overrides);
    const GroundTruthMap map(run.scenario);
    const auto stream = make_stream(run, map);

    prepare_out_dir(run);
    const fs::path out(run.cfg.out_dir);
    const GridSpec grid = grid_of(run);

    if (const auto* apsm = std::get_if<ApsmSetup>(&run.cfg.setup)) {
      ApsmEstimator est(apsm->kernel, apsm->cfg, apsm->dict);
      std::vector<StepDiagnostics> diag;
      diag.reserve(stream.size());
      for (const auto& m : stream) diag.push_back(est.ingest(m));
      write_apsm_diagnostics_csv((out / "diagnostics.csv").string(), diag);
      const RkhsMapEstimate snapshot(est.function());
      write_map_grid_csv((out / "estimate_grid.csv").string(), grid,
                         grid_values(snapshot, grid));
      return;
    }
    if (const auto* mk = std::get_if<MkSetup>(&run.cfg.setup)) {
      MultiKernelEstimator est(mk->bank, mk->cfg, mk->dict);
      std::vector<MkStepDiagnostics> diag;
      diag.reserve(stream.size());
      for (const auto& m : stream) diag.push_back(est.ingest(m));
      write_mk_diagnostics_csv((out / "diagnostics.csv").string(), diag);
      const MkMapEstimate snapshot(est.params(), est.dictionary(), est.bank());
      write_map_grid_csv((out / "estimate_grid.csv").string(), grid,
                         grid_values(snapshot, grid));
      return;
    }

    const auto diag = run_baseline_diagnostics(stream, run.cfg.setup);
    write_apsm_diagnostics_csv((out / "diagnostics.csv").string(), diag);
    OnlineEstimator est(run.cfg.setup);
    for (const auto& m : stream) est.ingest(m);
    const auto snapshot = est.snapshot();
    write_map_grid_csv((out / "estimate_grid.csv").string(), grid,
                       grid_values(*snapshot, grid));
  });
}

int cmd_evaluate(const std::string& config_path, const CliOverrides& overrides) {
  return guarded([&] {
    const LoadedRun run = load(config_path, overrides);
    const GroundTruthMap map(run.scenario);
    const auto stream = make_stream(run, map);

    OnlineEstimator est(run.cfg.setup);
    for (const auto& m : stream) est.ingest(m);
    const auto snapshot = est.snapshot();
    const GridSpec grid = grid_of(run);
    const EvalReport report = grid_eval(*snapshot, map, grid, &stream);

    prepare_out_dir(run);
    const fs::path out(run.cfg.out_dir);
    // Output files are a pure function of (config, seed); wall-clock timing
    // goes to stdout only.
    json j;
    j["schema_version"] = 1;
    j["estimator"] = report.estimator_name;
    j["n_measurements"] = stream.size();
    j["seed"] = run.scenario.seed;
    j["rmse_db"] = report.rmse_db;
    j["mae_db"] = report.mae_db;
    j["sampled_rmse_db"] = report.sampled_rmse_db;
    j["sampled_radius_m"] = report.sampled_radius_m;
    j["sampled_cell_count"] = report.sampled_cell_count;
    j["grid"] = {{"nx", report.grid.nx}, {"ny", report.grid.ny}};
    std::ofstream report_out(out / "report.json", std::ios::binary);
    if (!report_out) throw IoError("cannot write report.json");
    report_out << j.dump(2) << "\n";

    write_eval_grid_csv((out / "eval_grid.csv").string(), report);

    // Checkpointed learning curve, when requested.
    if (!run.cfg.checkpoints.empty()) {
      const auto curve =
          learning_curve_over_stream(map, stream, run.cfg.setup, grid, run.cfg.checkpoints);
      std::string csv = "n,rmse_db,mae_db,sampled_rmse_db\n";
      char buf[120];
      for (const auto& point : curve) {
        std::snprintf(buf, sizeof(buf), "%zu,%.10g,%.10g,%.10g\n", point.n,
                      point.report.rmse_db, point.report.mae_db,
                      point.report.sampled_rmse_db);
        csv += buf;
      }
      std::ofstream curve_out(out / "learning_curve.csv", std::ios::binary);
      if (!curve_out) throw IoError("cannot write learning_curve.csv");
      curve_out << csv;
    }

    std::printf("evaluate: rmse %.3f dB, sampled rmse %.3f dB, %.2f s\n", report.rmse_db,
                report.sampled_rmse_db, report.runtime_seconds);
  });
}

int cmd_sweep(const std::string& config_path, const CliOverrides& overrides) {
  return guarded([&] {
    const LoadedRun run = load(config_path, overrides);
    const GroundTruthMap map(run.scenario);
    const auto stream = make_stream(run, map);
    const GridSpec grid = grid_of(run);

    std::vector<std::string> axis_names;
    std::vector<std::vector<double>> axis_values;
    for (const auto& [name, values] : run.cfg.sweep) {
      axis_names.push_back(name);
      axis_values.push_back(values);
    }

    std::size_t row_count = axis_names.empty() ? 0 : 1;
    for (const auto& values : axis_values) row_count *= values.size();

    struct Row {
      std::vector<double> params;
      double rmse = 0.0;
      double mae = 0.0;
      double sampled_rmse = 0.0;
    };
    std::vector<Row> rows(row_count);

    // Rows are written by index; output order never depends on scheduling.
    parallel_for(row_count, [&](std::size_t r) {
      Row& row = rows[r];
      row.params.resize(axis_names.size());
      std::size_t rem = r;
      for (std::size_t a = axis_names.size(); a-- > 0;) {
        const auto& values = axis_values[a];
        row.params[a] = values[rem % values.size()];
        rem /= values.size();
      }
      EstimatorSetup setup = run.cfg.setup;
      for (std::size_t a = 0; a < axis_names.size(); ++a) {
        set_sweep_parameter(setup, axis_names[a], row.params[a]);
      }
      OnlineEstimator est(setup);
      for (const auto& m : stream) est.ingest(m);
      const auto snapshot = est.snapshot();
      const EvalReport report = grid_eval(*snapshot, map, grid, &stream);
      row.rmse = report.rmse_db;
      row.mae = report.mae_db;
      row.sampled_rmse = report.sampled_rmse_db;
    });

    prepare_out_dir(run);
    std::string csv;
    for (const auto& name : axis_names) csv += name + ",";
    csv += "rmse_db,mae_db,sampled_rmse_db\n";
    char buf[64];
    for (const auto& row : rows) {
      for (double p : row.params) {
        std::snprintf(buf, sizeof(buf), "%.10g,", p);
        csv += buf;
      }
      std::snprintf(buf, sizeof(buf), "%.10g,%.10g,%.10g\n", row.rmse, row.mae,
                    row.sampled_rmse);
      csv += buf;
    }
    std::ofstream out(fs::path(run.cfg.out_dir) / "sweep.csv", std::ios::binary);
    if (!out) throw IoError("cannot write sweep.csv");
    out << csv;
  });
}

}  // namespace radiomap
