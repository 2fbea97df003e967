#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "radiomap/geometry.hpp"

namespace radiomap {

struct BaseStation {
  Position position;
  double pl0_db = 30.0;   // loss at reference distance, >= 0
  double exponent = 3.0;  // path loss exponent, in [1.5, 6]
  double d0_m = 1.0;      // reference distance, > 0
};

struct MobilityConfig {
  double speed_min_mps = 1.0;
  double speed_max_mps = 10.0;
  std::size_t pause_steps = 0;  // dwell after reaching a waypoint
  double step_seconds = 1.0;
};

struct ScenarioConfig {
  Rect area;
  std::vector<BaseStation> stations;
  double shadow_sigma_db = 0.0;
  double shadow_decorrelation_m = 100.0;
  std::size_t shadow_grid_n = 33;  // per-axis grid nodes, in [2, 64]
  double meas_noise_sigma_db = 0.0;
  double pos_noise_sigma_m = 0.0;
  MobilityConfig mobility;
  std::uint64_t seed = 1;
};

void validate(const ScenarioConfig& cfg);

// Frozen spatially correlated shadowing realization: exponential-correlation
// Gaussian field factorized on a grid (Cholesky of the exact covariance),
// bilinear interpolation off-grid. Deterministic per (seed, station).
class ShadowField {
 public:
  ShadowField(const Rect& area, double sigma_db, double decorrelation_m,
              std::size_t grid_n, std::uint64_t seed, std::uint64_t stream);

  double value_db(const Position& p) const;
  double sigma_db() const { return sigma_db_; }

 private:
  Rect area_;
  double sigma_db_;
  std::size_t n_;
  Eigen::MatrixXd values_;  // n_ x n_, [iy, ix]
};

struct MapEvent {
  enum class Kind { kPl0Shift, kStationOff };
  Kind kind = Kind::kPl0Shift;
  std::size_t station = 0;
  double delta_db = 0.0;  // used by kPl0Shift
};

// Ground-truth strongest-base-station path loss map. Immutable after
// construction; events produce modified copies sharing the shadow fields.
class GroundTruthMap {
 public:
  explicit GroundTruthMap(const ScenarioConfig& cfg);

  // Per-station log-distance loss plus shadowing, clamped at 0.
  // Throws OutOfAreaError when x is outside the configured area.
  double path_loss_bs(std::size_t station, const Position& x) const;

  // (station index, loss) of the minimum-loss active station; ties break to
  // the lowest index. Throws ConfigError when no station is active.
  std::pair<std::size_t, double> strongest_bs(const Position& x) const;

  double value_db(const Position& x) const { return strongest_bs(x).second; }

  GroundTruthMap with_event(const MapEvent& e) const;

  const ScenarioConfig& config() const { return cfg_; }
  bool station_active(std::size_t station) const;
  std::size_t active_station_count() const;

 private:
  ScenarioConfig cfg_;
  std::vector<std::shared_ptr<const ShadowField>> shadows_;
  std::vector<bool> active_;
};

GroundTruthMap apply_event(const GroundTruthMap& map, const MapEvent& e);

// Random-waypoint path inside the area; deterministic per seed; consecutive
// step length <= speed_max * step_seconds.
std::vector<Position> gen_trajectory(const ScenarioConfig& cfg, std::size_t n_steps);

// Noisy measurement stream along a trajectory: the value is the strongest-BS
// loss at the true position plus Gaussian noise (clamped at 0); the reported
// position carries independent Gaussian noise and is clamped into the area.
// Noise draws are keyed by absolute time_index, so streams generated in
// pieces (e.g. around a map event) match the single-shot stream bit-exactly.
std::vector<Measurement> gen_measurements(const GroundTruthMap& map,
                                          const std::vector<Position>& trajectory,
                                          std::int64_t first_time_index = 1);

}  // namespace radiomap
