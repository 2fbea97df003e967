#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>

#include "doctest.h"
#include "radiomap/errors.hpp"
#include "radiomap/rng.hpp"
#include "radiomap/simulator.hpp"

using namespace radiomap;

namespace {

ScenarioConfig base_scenario() {
  ScenarioConfig cfg;
  cfg.area = {0.0, 0.0, 1000.0, 1000.0};
  cfg.stations = {
      {{200.0, 250.0}, 40.0, 3.0, 10.0},
      {{800.0, 300.0}, 40.0, 3.5, 10.0},
      {{450.0, 800.0}, 45.0, 3.2, 10.0},
  };
  cfg.shadow_sigma_db = 0.0;
  cfg.meas_noise_sigma_db = 0.0;
  cfg.pos_noise_sigma_m = 0.0;
  cfg.mobility = {10.0, 30.0, 2, 1.0};
  cfg.seed = 12345;
  return cfg;
}

}  // namespace

TEST_CASE("log-distance path loss closed form") {
  ScenarioConfig cfg = base_scenario();
  cfg.stations = {{{0.0, 0.0}, 40.0, 3.0, 10.0}};
  const GroundTruthMap map(cfg);

  // At the reference distance the loss is pl0 exactly.
  CHECK(map.path_loss_bs(0, {10.0, 0.0}) == doctest::Approx(40.0).epsilon(1e-12));
  // Inside d0 the distance floor applies.
  CHECK(map.path_loss_bs(0, {1.0, 0.0}) == doctest::Approx(40.0).epsilon(1e-12));
  // d = 10 d0 with exponent 3: pl0 + 30.
  CHECK(map.path_loss_bs(0, {100.0, 0.0}) == doctest::Approx(70.0).epsilon(1e-12));

  // Monotone nondecreasing along a ray when shadowing is off.
  double last = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double d = 5.0 + 9.0 * i;
    const double loss = map.path_loss_bs(0, {d, 0.0});
    CHECK(loss >= last);
    last = loss;
  }

  CHECK_THROWS_AS(map.path_loss_bs(0, {-5.0, 0.0}), OutOfAreaError);
  CHECK_THROWS_AS(map.path_loss_bs(7, {10.0, 10.0}), InvalidInputError);
}

TEST_CASE("strongest station selection") {
  ScenarioConfig single = base_scenario();
  single.stations.resize(1);
  const GroundTruthMap one(single);
  CHECK(one.strongest_bs({500.0, 500.0}).first == 0);

  // Identical stations tie-break to the lowest index.
  ScenarioConfig twin = base_scenario();
  twin.stations = {{{300.0, 300.0}, 40.0, 3.0, 10.0}, {{300.0, 300.0}, 40.0, 3.0, 10.0}};
  const GroundTruthMap twins(twin);
  CHECK(twins.strongest_bs({700.0, 100.0}).first == 0);

  // Value equals the independent per-station minimum.
  const GroundTruthMap map(base_scenario());
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1000.0);
  for (int k = 0; k < 200; ++k) {
    const Position x{u(rng), u(rng)};
    const auto [idx, value] = map.strongest_bs(x);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < 3; ++s) best = std::min(best, map.path_loss_bs(s, x));
    CHECK(value == best);
    CHECK(map.path_loss_bs(idx, x) == best);
    CHECK(value >= 0.0);
  }
}

TEST_CASE("random waypoint trajectories") {
  const ScenarioConfig cfg = base_scenario();

  const auto tiny = gen_trajectory(cfg, 1);
  REQUIRE(tiny.size() == 1);
  CHECK(cfg.area.contains(tiny[0]));

  const auto path = gen_trajectory(cfg, 1000);
  REQUIRE(path.size() == 1000);
  const double max_step = cfg.mobility.speed_max_mps * cfg.mobility.step_seconds;
  for (std::size_t i = 0; i < path.size(); ++i) {
    CHECK(cfg.area.contains(path[i]));
    if (i > 0) CHECK(distance(path[i - 1], path[i]) <= max_step + 1e-9);
  }

  const auto again = gen_trajectory(cfg, 1000);
  for (std::size_t i = 0; i < path.size(); ++i) CHECK(same_position(path[i], again[i]));

  CHECK_THROWS_AS(gen_trajectory(cfg, 0), InvalidInputError);
}

TEST_CASE("measurement streams") {
  ScenarioConfig cfg = base_scenario();
  const GroundTruthMap map(cfg);
  const auto path = gen_trajectory(cfg, 300);

  // Noise-free: value equals the strongest-BS loss at the true position.
  const auto clean = gen_measurements(map, path);
  REQUIRE(clean.size() == path.size());
  for (std::size_t i = 0; i < clean.size(); ++i) {
    CHECK(clean[i].time_index == static_cast<std::int64_t>(i + 1));
    CHECK(same_position(clean[i].position, path[i]));
    CHECK(clean[i].path_loss_db == map.value_db(path[i]));
    CHECK(clean[i].path_loss_db >= 0.0);
  }

  // Bit-identical reruns.
  const auto rerun = gen_measurements(map, path);
  for (std::size_t i = 0; i < clean.size(); ++i) {
    CHECK(clean[i].path_loss_db == rerun[i].path_loss_db);
    CHECK(same_position(clean[i].position, rerun[i].position));
  }

  // Piecewise generation matches the single-shot stream (absolute keying).
  const std::vector<Position> head(path.begin(), path.begin() + 120);
  const std::vector<Position> tail(path.begin() + 120, path.end());
  ScenarioConfig noisy_cfg = base_scenario();
  noisy_cfg.meas_noise_sigma_db = 1.5;
  noisy_cfg.pos_noise_sigma_m = 3.0;
  const GroundTruthMap noisy_map(noisy_cfg);
  const auto full = gen_measurements(noisy_map, path);
  auto pieces = gen_measurements(noisy_map, head, 1);
  const auto rest = gen_measurements(noisy_map, tail, 121);
  pieces.insert(pieces.end(), rest.begin(), rest.end());
  REQUIRE(pieces.size() == full.size());
  for (std::size_t i = 0; i < full.size(); ++i) {
    CHECK(full[i].path_loss_db == pieces[i].path_loss_db);
    CHECK(same_position(full[i].position, pieces[i].position));
  }

  // Values clamp at zero but positions stay inside the area.
  for (const auto& m : full) {
    CHECK(m.path_loss_db >= 0.0);
    CHECK(noisy_cfg.area.contains(m.position));
  }
}

TEST_CASE("measurement noise statistics") {
  ScenarioConfig cfg = base_scenario();
  cfg.meas_noise_sigma_db = 1.0;
  const GroundTruthMap map(cfg);
  const auto path = gen_trajectory(cfg, 10000);
  const auto ms = gen_measurements(map, path);

  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    const double diff = ms[i].path_loss_db - map.value_db(path[i]);
    sum += diff;
    sq += diff * diff;
  }
  const double n = static_cast<double>(ms.size());
  const double std_dev = std::sqrt(sq / n - (sum / n) * (sum / n));
  CHECK(std_dev == doctest::Approx(1.0).epsilon(0.10));
}

TEST_CASE("shadow field statistics") {
  // Decorrelation distance aligned with the node lattice (5 * 31.25 m), so
  // node pairs probe the correlation at exactly that distance without
  // interpolation bias. Statistics pool several independent realizations.
  const Rect area{0.0, 0.0, 1000.0, 1000.0};
  const double sigma = 6.0;
  const std::size_t grid_n = 33;
  const double spacing = 1000.0 / 32.0;  // 31.25
  const double dcorr = 5.0 * spacing;    // 156.25
  const int lag = 5;

  double sum = 0.0, sq = 0.0;
  double pair_xy = 0.0, pair_x = 0.0, pair_y = 0.0, pair_xx = 0.0, pair_yy = 0.0;
  std::size_t n = 0, pairs = 0;
  for (std::uint64_t stream = 0; stream < 6; ++stream) {
    const ShadowField field(area, sigma, dcorr, grid_n, 2024,
                            rng_stream::kShadowField + stream);
    for (std::size_t iy = 0; iy < grid_n; ++iy) {
      for (std::size_t ix = 0; ix < grid_n; ++ix) {
        const double v = field.value_db({ix * spacing, iy * spacing});
        sum += v;
        sq += v * v;
        ++n;
        if (ix + lag < grid_n) {
          const double w = field.value_db({(ix + lag) * spacing, iy * spacing});
          pair_xy += v * w;
          pair_x += v;
          pair_y += w;
          pair_xx += v * v;
          pair_yy += w * w;
          ++pairs;
        }
      }
    }
  }

  const double mean = sum / static_cast<double>(n);
  const double std_dev = std::sqrt(sq / static_cast<double>(n) - mean * mean);
  CHECK(std_dev == doctest::Approx(sigma).epsilon(0.15));

  const double np = static_cast<double>(pairs);
  const double mx = pair_x / np;
  const double my = pair_y / np;
  const double corr = (pair_xy / np - mx * my) /
                      std::sqrt((pair_xx / np - mx * mx) * (pair_yy / np - my * my));
  CHECK(corr > std::exp(-1.0) - 0.15);
  CHECK(corr < std::exp(-1.0) + 0.15);
}

TEST_CASE("map events") {
  ScenarioConfig cfg = base_scenario();
  cfg.shadow_sigma_db = 4.0;
  cfg.shadow_decorrelation_m = 150.0;
  const GroundTruthMap map(cfg);

  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1000.0);

  // Zero shift changes nothing at 100 probe points.
  const GroundTruthMap same = apply_event(map, {MapEvent::Kind::kPl0Shift, 1, 0.0});
  for (int k = 0; k < 100; ++k) {
    const Position x{u(rng), u(rng)};
    CHECK(same.value_db(x) == map.value_db(x));
  }

  // +6 dB shift moves that station's per-BS loss by exactly 6.
  const GroundTruthMap shifted = apply_event(map, {MapEvent::Kind::kPl0Shift, 1, 6.0});
  for (int k = 0; k < 100; ++k) {
    const Position x{u(rng), u(rng)};
    if (map.path_loss_bs(1, x) > 0.0) {
      CHECK(shifted.path_loss_bs(1, x) - map.path_loss_bs(1, x) ==
            doctest::Approx(6.0).epsilon(1e-12));
    }
    CHECK(shifted.path_loss_bs(0, x) == map.path_loss_bs(0, x));
  }

  // Switching off all but one station leaves that station's per-BS map.
  GroundTruthMap only2 = apply_event(map, {MapEvent::Kind::kStationOff, 0, 0.0});
  only2 = apply_event(only2, {MapEvent::Kind::kStationOff, 1, 0.0});
  CHECK(only2.active_station_count() == 1);
  for (int k = 0; k < 100; ++k) {
    const Position x{u(rng), u(rng)};
    const auto [idx, value] = only2.strongest_bs(x);
    CHECK(idx == 2);
    CHECK(value == only2.path_loss_bs(2, x));
  }

  // Old map is untouched (value semantics).
  CHECK(map.active_station_count() == 3);
  CHECK_THROWS_AS(apply_event(map, {MapEvent::Kind::kStationOff, 9, 0.0}), InvalidInputError);
}

TEST_CASE("scenario validation") {
  ScenarioConfig cfg = base_scenario();
  cfg.stations.clear();
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = base_scenario();
  cfg.stations[0].exponent = 7.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = base_scenario();
  cfg.area = {0.0, 0.0, 0.0, 1000.0};
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = base_scenario();
  cfg.shadow_grid_n = 65;
  CHECK_THROWS_AS(validate(cfg), ConfigError);

  cfg = base_scenario();
  cfg.mobility.speed_min_mps = 0.0;
  CHECK_THROWS_AS(validate(cfg), ConfigError);
}
