#pragma once

#include <Eigen/Core>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "radiomap/apsm.hpp"
#include "radiomap/multikernel.hpp"
#include "radiomap/simulator.hpp"

namespace radiomap {

// Regular cell grid covering the area exactly; estimates and truth are
// compared at cell centers.
struct GridSpec {
  Rect area;
  std::size_t nx = 50;
  std::size_t ny = 50;
};

void validate(const GridSpec& grid);
Position cell_center(const GridSpec& grid, std::size_t ix, std::size_t iy);

// Read-only view of a frozen map estimate. Values are reporting-clamped at 0.
class MapEstimate {
 public:
  virtual ~MapEstimate() = default;
  virtual double value_db(const Position& x) const = 0;
  virtual std::string name() const = 0;
};

class RkhsMapEstimate final : public MapEstimate {
 public:
  explicit RkhsMapEstimate(RkhsFunction f) : f_(std::move(f)) {}
  double value_db(const Position& x) const override;
  std::string name() const override { return "apsm"; }

 private:
  RkhsFunction f_;
};

class MkMapEstimate final : public MapEstimate {
 public:
  MkMapEstimate(ParamMatrix A, Dictionary dict, KernelBank bank);
  double value_db(const Position& x) const override;
  std::string name() const override { return "multikernel"; }

 private:
  ParamMatrix A_;
  Dictionary dict_;
  KernelBank bank_;
};

class IdwMapEstimate final : public MapEstimate {
 public:
  IdwMapEstimate(std::vector<Measurement> ms, double power);
  double value_db(const Position& x) const override;
  std::string name() const override { return "idw"; }

 private:
  std::vector<Measurement> ms_;
  double power_;
};

class NnMapEstimate final : public MapEstimate {
 public:
  explicit NnMapEstimate(std::vector<Measurement> ms);
  double value_db(const Position& x) const override;
  std::string name() const override { return "nn"; }

 private:
  std::vector<Measurement> ms_;
};

class TruthMapEstimate final : public MapEstimate {
 public:
  explicit TruthMapEstimate(const GroundTruthMap& map) : map_(&map) {}
  double value_db(const Position& x) const override { return map_->value_db(x); }
  std::string name() const override { return "truth"; }

 private:
  const GroundTruthMap* map_;
};

// Inverse-distance-weighted mean with exponent `power`; an exact positional
// hit returns that measurement's value (ties to the lowest time_index).
double baseline_idw(const std::vector<Measurement>& ms, const Position& x, double power);

// Nearest-neighbor value; distance ties break to the lowest time_index.
double baseline_nn(const std::vector<Measurement>& ms, const Position& x);

struct EvalReport {
  double rmse_db = 0.0;
  double mae_db = 0.0;
  double sampled_rmse_db = 0.0;   // over cells within sampled_radius_m of a measurement
  double sampled_radius_m = 0.0;
  std::size_t sampled_cell_count = 0;
  double runtime_seconds = 0.0;
  GridSpec grid;
  std::string estimator_name;
  Eigen::MatrixXd truth_grid;     // ny x nx, [iy, ix]
  Eigen::MatrixXd estimate_grid;  // ny x nx
  Eigen::MatrixXd abs_err_grid;   // ny x nx
};

// 2 x median over measurements of the distance to the nearest other
// measurement (sampling-density scale). 0 for fewer than 2 measurements.
double sampled_region_radius(const std::vector<Measurement>& ms);

// Scores the estimate against truth at all cell centers (parallel over
// cells, deterministic). When `sampled` is given, sampled_rmse_db is
// restricted to cells within radius_m (<= 0 picks sampled_region_radius) of
// any measurement; otherwise it equals rmse_db.
EvalReport grid_eval(const MapEstimate& est, const GroundTruthMap& truth,
                     const GridSpec& grid,
                     const std::vector<Measurement>* sampled = nullptr,
                     double radius_m = 0.0);

// --- experiment drivers ------------------------------------------------

struct ApsmSetup {
  KernelSpec kernel;
  ApsmConfig cfg;
  DictionaryConfig dict;
};

struct MkSetup {
  KernelBank bank;
  MkStreamConfig cfg;
  DictionaryConfig dict;
};

struct IdwSetup {
  double power = 2.0;
};

struct NnSetup {};

using EstimatorSetup = std::variant<ApsmSetup, MkSetup, IdwSetup, NnSetup>;

std::string estimator_name(const EstimatorSetup& setup);

// Unified online front over the four estimator kinds: ingest measurements,
// snapshot a frozen MapEstimate at any time without disturbing state.
class OnlineEstimator {
 public:
  explicit OnlineEstimator(const EstimatorSetup& setup);
  ~OnlineEstimator();
  OnlineEstimator(OnlineEstimator&&) noexcept;
  OnlineEstimator& operator=(OnlineEstimator&&) noexcept;

  void ingest(const Measurement& m);
  std::unique_ptr<MapEstimate> snapshot() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct LearningCurvePoint {
  std::size_t n = 0;
  EvalReport report;
};

// Replays a simulated stream into the estimator, scoring frozen snapshots at
// each checkpoint (strictly increasing, within the stream length). The
// sampled-region mask at checkpoint n uses the first n measurements.
std::vector<LearningCurvePoint> learning_curve(const ScenarioConfig& scenario,
                                               std::size_t n_measurements,
                                               const EstimatorSetup& setup,
                                               const GridSpec& grid,
                                               const std::vector<std::size_t>& checkpoints);

// Same, over a prebuilt map and stream (lets callers share one simulation
// across several estimator runs).
std::vector<LearningCurvePoint> learning_curve_over_stream(
    const GroundTruthMap& truth, const std::vector<Measurement>& stream,
    const EstimatorSetup& setup, const GridSpec& grid,
    const std::vector<std::size_t>& checkpoints);

struct TrackingPoint {
  std::size_t n = 0;
  double sampled_rmse_db = 0.0;
};

struct TrackingConfig {
  std::size_t n_measurements = 0;
  std::size_t event_step = 0;  // event applies after this many measurements
  MapEvent event;
  std::size_t eval_every = 250;
};

// Sampled-region rmse time series against the piecewise ground truth
// (pre/post event). Measurements after event_step are drawn from the
// modified map; truth is scored against whichever map is current.
std::vector<TrackingPoint> tracking_experiment(const ScenarioConfig& scenario,
                                               const TrackingConfig& tracking,
                                               const EstimatorSetup& setup,
                                               const GridSpec& grid);

}  // namespace radiomap
