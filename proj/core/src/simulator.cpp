#include "radiomap/simulator.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <random>

#include "radiomap/errors.hpp"
#include "radiomap/rng.hpp"

namespace radiomap {

namespace {

void validate(const BaseStation& bs) {
  if (!is_finite(bs.position)) throw ConfigError("station position must be finite");
  if (!(bs.exponent >= 1.5) || !(bs.exponent <= 6.0)) {
    throw ConfigError("path loss exponent must lie in [1.5, 6]");
  }
  if (!(bs.d0_m > 0.0)) throw ConfigError("reference distance d0 must be > 0");
  if (!(bs.pl0_db >= 0.0)) throw ConfigError("pl0 must be >= 0");
}

}  // namespace

void validate(const ScenarioConfig& cfg) {
  if (cfg.area.degenerate()) throw ConfigError("scenario area must be non-degenerate");
  if (cfg.stations.empty()) throw ConfigError("scenario needs at least one base station");
  for (const auto& bs : cfg.stations) validate(bs);
  if (cfg.shadow_sigma_db < 0.0 || cfg.meas_noise_sigma_db < 0.0 ||
      cfg.pos_noise_sigma_m < 0.0) {
    throw ConfigError("noise standard deviations must be >= 0");
  }
  if (cfg.shadow_sigma_db > 0.0 && !(cfg.shadow_decorrelation_m > 0.0)) {
    throw ConfigError("shadow decorrelation distance must be > 0");
  }
  if (cfg.shadow_grid_n < 2 || cfg.shadow_grid_n > 64) {
    throw ConfigError("shadow grid must have 2..64 nodes per axis");
  }
  const MobilityConfig& mob = cfg.mobility;
  if (!(mob.speed_min_mps > 0.0) || !(mob.speed_max_mps >= mob.speed_min_mps)) {
    throw ConfigError("mobility speed range must satisfy 0 < min <= max");
  }
  if (!(mob.step_seconds > 0.0)) throw ConfigError("mobility step_seconds must be > 0");
}

ShadowField::ShadowField(const Rect& area, double sigma_db, double decorrelation_m,
                         std::size_t grid_n, std::uint64_t seed, std::uint64_t stream)
    : area_(area), sigma_db_(sigma_db), n_(grid_n) {
  values_.setZero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  if (sigma_db_ == 0.0) return;

  // Exact covariance on the grid, factorized once. Exponential correlation:
  // C(r) = sigma^2 exp(-r / d_corr).
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  const Eigen::Index total = n * n;
  const double dx = area_.width() / static_cast<double>(n_ - 1);
  const double dy = area_.height() / static_cast<double>(n_ - 1);

  Eigen::MatrixXd cov(total, total);
  for (Eigen::Index a = 0; a < total; ++a) {
    const double ax = static_cast<double>(a % n) * dx;
    const double ay = static_cast<double>(a / n) * dy;
    for (Eigen::Index b = a; b < total; ++b) {
      const double bx = static_cast<double>(b % n) * dx;
      const double by = static_cast<double>(b / n) * dy;
      const double r = std::hypot(ax - bx, ay - by);
      const double c = sigma_db_ * sigma_db_ * std::exp(-r / decorrelation_m);
      cov(a, b) = c;
      cov(b, a) = c;
    }
  }
  cov.diagonal().array() += 1e-10 * sigma_db_ * sigma_db_;

  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) {
    throw InvalidInputError("shadow covariance factorization failed");
  }

  std::mt19937_64 rng = make_rng(seed, stream);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd z(total);
  for (Eigen::Index i = 0; i < total; ++i) z[i] = gauss(rng);
  const Eigen::VectorXd field = llt.matrixL() * z;
  for (Eigen::Index i = 0; i < total; ++i) {
    values_(i / n, i % n) = field[i];  // [iy, ix]
  }
}

double ShadowField::value_db(const Position& p) const {
  if (sigma_db_ == 0.0) return 0.0;
  const double fx = (p.x - area_.xmin) / area_.width() * static_cast<double>(n_ - 1);
  const double fy = (p.y - area_.ymin) / area_.height() * static_cast<double>(n_ - 1);
  const auto cell = [this](double f) {
    const double c = std::floor(f);
    const double max_cell = static_cast<double>(n_ - 2);
    return std::min(std::max(c, 0.0), max_cell);
  };
  const double cx = cell(fx);
  const double cy = cell(fy);
  const double tx = std::min(std::max(fx - cx, 0.0), 1.0);
  const double ty = std::min(std::max(fy - cy, 0.0), 1.0);
  const Eigen::Index ix = static_cast<Eigen::Index>(cx);
  const Eigen::Index iy = static_cast<Eigen::Index>(cy);
  return (1.0 - tx) * (1.0 - ty) * values_(iy, ix) + tx * (1.0 - ty) * values_(iy, ix + 1) +
         (1.0 - tx) * ty * values_(iy + 1, ix) + tx * ty * values_(iy + 1, ix + 1);
}

GroundTruthMap::GroundTruthMap(const ScenarioConfig& cfg) : cfg_(cfg) {
  validate(cfg_);
  shadows_.reserve(cfg_.stations.size());
  for (std::size_t s = 0; s < cfg_.stations.size(); ++s) {
    shadows_.push_back(std::make_shared<const ShadowField>(
        cfg_.area, cfg_.shadow_sigma_db, cfg_.shadow_decorrelation_m, cfg_.shadow_grid_n,
        cfg_.seed, rng_stream::kShadowField + s));
  }
  active_.assign(cfg_.stations.size(), true);
}

double GroundTruthMap::path_loss_bs(std::size_t station, const Position& x) const {
  if (station >= cfg_.stations.size()) {
    throw InvalidInputError("unknown station index");
  }
  if (!cfg_.area.contains(x)) {
    throw OutOfAreaError("query position outside the scenario area");
  }
  const BaseStation& bs = cfg_.stations[station];
  const double d = std::max(distance(bs.position, x), bs.d0_m);
  const double trend = bs.pl0_db + 10.0 * bs.exponent * std::log10(d / bs.d0_m);
  return std::max(0.0, trend + shadows_[station]->value_db(x));
}

std::pair<std::size_t, double> GroundTruthMap::strongest_bs(const Position& x) const {
  std::size_t best_idx = cfg_.stations.size();
  double best = 0.0;
  for (std::size_t s = 0; s < cfg_.stations.size(); ++s) {
    if (!active_[s]) continue;
    const double loss = path_loss_bs(s, x);
    if (best_idx == cfg_.stations.size() || loss < best) {
      best_idx = s;
      best = loss;
    }
  }
  if (best_idx == cfg_.stations.size()) {
    throw ConfigError("no active base station");
  }
  return {best_idx, best};
}

GroundTruthMap GroundTruthMap::with_event(const MapEvent& e) const {
  if (e.station >= cfg_.stations.size()) {
    throw InvalidInputError("event references an unknown station index");
  }
  GroundTruthMap out = *this;  // shadow fields shared
  switch (e.kind) {
    case MapEvent::Kind::kPl0Shift:
      out.cfg_.stations[e.station].pl0_db += e.delta_db;
      break;
    case MapEvent::Kind::kStationOff:
      out.active_[e.station] = false;
      break;
  }
  return out;
}

bool GroundTruthMap::station_active(std::size_t station) const {
  return station < active_.size() && active_[station];
}

std::size_t GroundTruthMap::active_station_count() const {
  std::size_t n = 0;
  for (bool a : active_) n += a ? 1 : 0;
  return n;
}

GroundTruthMap apply_event(const GroundTruthMap& map, const MapEvent& e) {
  return map.with_event(e);
}

std::vector<Position> gen_trajectory(const ScenarioConfig& cfg, std::size_t n_steps) {
  validate(cfg);
  if (n_steps == 0) throw InvalidInputError("trajectory needs n_steps >= 1");

  std::mt19937_64 rng = make_rng(cfg.seed, rng_stream::kTrajectory);
  std::uniform_real_distribution<double> ux(cfg.area.xmin, cfg.area.xmax);
  std::uniform_real_distribution<double> uy(cfg.area.ymin, cfg.area.ymax);
  std::uniform_real_distribution<double> uspeed(cfg.mobility.speed_min_mps,
                                                cfg.mobility.speed_max_mps);

  std::vector<Position> path;
  path.reserve(n_steps);
  Position pos{ux(rng), uy(rng)};
  Position waypoint{ux(rng), uy(rng)};
  double speed = uspeed(rng);
  std::size_t pause_left = 0;
  path.push_back(pos);

  for (std::size_t i = 1; i < n_steps; ++i) {
    if (pause_left > 0) {
      --pause_left;
    } else {
      const double d = distance(pos, waypoint);
      const double move = speed * cfg.mobility.step_seconds;
      if (move >= d) {
        pos = waypoint;
        waypoint = {ux(rng), uy(rng)};
        speed = uspeed(rng);
        pause_left = cfg.mobility.pause_steps;
      } else {
        pos.x += (waypoint.x - pos.x) * (move / d);
        pos.y += (waypoint.y - pos.y) * (move / d);
      }
    }
    path.push_back(pos);
  }
  return path;
}

std::vector<Measurement> gen_measurements(const GroundTruthMap& map,
                                          const std::vector<Position>& trajectory,
                                          std::int64_t first_time_index) {
  const ScenarioConfig& cfg = map.config();
  std::vector<Measurement> out;
  out.reserve(trajectory.size());
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const Position& true_pos = trajectory[i];
    if (!cfg.area.contains(true_pos)) {
      throw OutOfAreaError("trajectory point outside the scenario area");
    }
    const std::int64_t t = first_time_index + static_cast<std::int64_t>(i);
    const std::uint64_t key = static_cast<std::uint64_t>(t);

    Position reported = true_pos;
    if (cfg.pos_noise_sigma_m > 0.0) {
      std::mt19937_64 rng = make_rng(cfg.seed, rng_stream::kPositionNoise + key);
      std::normal_distribution<double> noise(0.0, cfg.pos_noise_sigma_m);
      reported.x += noise(rng);
      reported.y += noise(rng);
      reported = cfg.area.clamp(reported);
    }

    // Value noise corrupts the strongest-BS loss at the *true* position.
    double value = map.value_db(true_pos);
    if (cfg.meas_noise_sigma_db > 0.0) {
      std::mt19937_64 rng = make_rng(cfg.seed, rng_stream::kValueNoise + key);
      std::normal_distribution<double> noise(0.0, cfg.meas_noise_sigma_db);
      value += noise(rng);
    }
    out.push_back({reported, std::max(0.0, value), t});
  }
  return out;
}

}  // namespace radiomap
