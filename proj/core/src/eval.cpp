#include "radiomap/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "radiomap/errors.hpp"
#include "radiomap/parallel.hpp"

namespace radiomap {

void validate(const GridSpec& grid) {
  if (grid.area.degenerate()) throw ConfigError("grid area must be non-degenerate");
  if (grid.nx < 2 || grid.ny < 2) throw ConfigError("grid needs nx, ny >= 2");
}

Position cell_center(const GridSpec& grid, std::size_t ix, std::size_t iy) {
  const double dx = grid.area.width() / static_cast<double>(grid.nx);
  const double dy = grid.area.height() / static_cast<double>(grid.ny);
  return {grid.area.xmin + (static_cast<double>(ix) + 0.5) * dx,
          grid.area.ymin + (static_cast<double>(iy) + 0.5) * dy};
}

double RkhsMapEstimate::value_db(const Position& x) const {
  return std::max(0.0, evaluate(f_, x));
}

MkMapEstimate::MkMapEstimate(ParamMatrix A, Dictionary dict, KernelBank bank)
    : A_(std::move(A)), dict_(std::move(dict)), bank_(std::move(bank)) {
  if (A_.cols() != static_cast<Eigen::Index>(dict_.size()) ||
      A_.rows() != static_cast<Eigen::Index>(bank_.size())) {
    throw DimensionError("parameter matrix out of sync with bank/dictionary");
  }
}

double MkMapEstimate::value_db(const Position& x) const {
  if (dict_.empty()) return 0.0;
  return std::max(0.0, estimate_mk(A_, kernel_matrix_at(bank_, dict_, x)));
}

IdwMapEstimate::IdwMapEstimate(std::vector<Measurement> ms, double power)
    : ms_(std::move(ms)), power_(power) {}

double IdwMapEstimate::value_db(const Position& x) const {
  return baseline_idw(ms_, x, power_);
}

NnMapEstimate::NnMapEstimate(std::vector<Measurement> ms) : ms_(std::move(ms)) {}

double NnMapEstimate::value_db(const Position& x) const {
  return baseline_nn(ms_, x);
}

double baseline_idw(const std::vector<Measurement>& ms, const Position& x, double power) {
  if (ms.empty()) throw InvalidInputError("idw baseline needs measurements");
  if (!(power > 0.0)) throw ConfigError("idw power must be > 0");

  // Exact positional hit short-circuits (lowest time_index wins ties).
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& m : ms) dmin = std::min(dmin, distance(m.position, x));
  if (dmin == 0.0) {
    for (const auto& m : ms) {
      if (distance(m.position, x) == 0.0) return m.path_loss_db;
    }
  }

  // Weights normalized by the nearest distance to keep d^-p in range for
  // large p.
  double wsum = 0.0;
  double vsum = 0.0;
  for (const auto& m : ms) {
    const double w = std::pow(dmin / distance(m.position, x), power);
    wsum += w;
    vsum += w * m.path_loss_db;
  }
  return vsum / wsum;
}

double baseline_nn(const std::vector<Measurement>& ms, const Position& x) {
  if (ms.empty()) throw InvalidInputError("nn baseline needs measurements");
  const Measurement* best = &ms.front();
  double best_d = distance(best->position, x);
  for (const auto& m : ms) {
    const double d = distance(m.position, x);
    if (d < best_d || (d == best_d && m.time_index < best->time_index)) {
      best = &m;
      best_d = d;
    }
  }
  return best->path_loss_db;
}

double sampled_region_radius(const std::vector<Measurement>& ms) {
  if (ms.size() < 2) return 0.0;
  std::vector<double> nearest(ms.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < ms.size(); ++i) {
    for (std::size_t j = 0; j < ms.size(); ++j) {
      if (i == j) continue;
      nearest[i] = std::min(nearest[i], distance(ms[i].position, ms[j].position));
    }
  }
  std::nth_element(nearest.begin(), nearest.begin() + static_cast<std::ptrdiff_t>((nearest.size() - 1) / 2),
                   nearest.end());
  return 2.0 * nearest[(nearest.size() - 1) / 2];
}

EvalReport grid_eval(const MapEstimate& est, const GroundTruthMap& truth,
                     const GridSpec& grid, const std::vector<Measurement>* sampled,
                     double radius_m) {
  validate(grid);
  const auto start = std::chrono::steady_clock::now();

  const std::size_t nx = grid.nx;
  const std::size_t ny = grid.ny;
  const std::size_t cells = nx * ny;

  EvalReport report;
  report.grid = grid;
  report.estimator_name = est.name();
  report.truth_grid.resize(static_cast<Eigen::Index>(ny), static_cast<Eigen::Index>(nx));
  report.estimate_grid.resize(static_cast<Eigen::Index>(ny), static_cast<Eigen::Index>(nx));
  report.abs_err_grid.resize(static_cast<Eigen::Index>(ny), static_cast<Eigen::Index>(nx));

  // Pure reads of frozen snapshots; cells write disjoint slots.
  parallel_for(cells, [&](std::size_t c) {
    const std::size_t ix = c % nx;
    const std::size_t iy = c / nx;
    const Position p = cell_center(grid, ix, iy);
    const double t = truth.value_db(p);
    const double e = est.value_db(p);
    report.truth_grid(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix)) = t;
    report.estimate_grid(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix)) = e;
    report.abs_err_grid(static_cast<Eigen::Index>(iy), static_cast<Eigen::Index>(ix)) =
        std::abs(t - e);
  });

  double sq_sum = 0.0;
  double abs_sum = 0.0;
  for (Eigen::Index iy = 0; iy < report.abs_err_grid.rows(); ++iy) {
    for (Eigen::Index ix = 0; ix < report.abs_err_grid.cols(); ++ix) {
      const double e = report.abs_err_grid(iy, ix);
      sq_sum += e * e;
      abs_sum += e;
    }
  }
  report.rmse_db = std::sqrt(sq_sum / static_cast<double>(cells));
  report.mae_db = abs_sum / static_cast<double>(cells);

  report.sampled_rmse_db = report.rmse_db;
  if (sampled != nullptr && !sampled->empty()) {
    const double radius = radius_m > 0.0 ? radius_m : sampled_region_radius(*sampled);
    report.sampled_radius_m = radius;
    std::vector<char> mask(cells, 0);
    parallel_for(cells, [&](std::size_t c) {
      const Position p = cell_center(grid, c % nx, c / nx);
      const double r2 = radius * radius;
      for (const auto& m : *sampled) {
        if (squared_distance(m.position, p) <= r2) {
          mask[c] = 1;
          return;
        }
      }
    });
    double s_sq = 0.0;
    std::size_t s_n = 0;
    for (std::size_t c = 0; c < cells; ++c) {
      if (!mask[c]) continue;
      const double e = report.abs_err_grid(static_cast<Eigen::Index>(c / nx),
                                           static_cast<Eigen::Index>(c % nx));
      s_sq += e * e;
      ++s_n;
    }
    report.sampled_cell_count = s_n;
    if (s_n > 0) report.sampled_rmse_db = std::sqrt(s_sq / static_cast<double>(s_n));
  }

  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

// --- experiment drivers ------------------------------------------------

std::string estimator_name(const EstimatorSetup& setup) {
  if (std::holds_alternative<ApsmSetup>(setup)) return "apsm";
  if (std::holds_alternative<MkSetup>(setup)) return "multikernel";
  if (std::holds_alternative<IdwSetup>(setup)) return "idw";
  return "nn";
}

struct OnlineEstimator::Impl {
  EstimatorSetup setup;
  std::optional<ApsmEstimator> apsm;
  std::optional<MultiKernelEstimator> mk;
  std::vector<Measurement> seen;  // idw / nn memory
  bool has_last_time = false;
  std::int64_t last_time = 0;
};

OnlineEstimator::OnlineEstimator(const EstimatorSetup& setup) : impl_(new Impl) {
  impl_->setup = setup;
  if (const auto* a = std::get_if<ApsmSetup>(&setup)) {
    impl_->apsm.emplace(a->kernel, a->cfg, a->dict);
  } else if (const auto* m = std::get_if<MkSetup>(&setup)) {
    impl_->mk.emplace(m->bank, m->cfg, m->dict);
  }
}

OnlineEstimator::~OnlineEstimator() = default;
OnlineEstimator::OnlineEstimator(OnlineEstimator&&) noexcept = default;
OnlineEstimator& OnlineEstimator::operator=(OnlineEstimator&&) noexcept = default;

void OnlineEstimator::ingest(const Measurement& m) {
  if (impl_->apsm) {
    impl_->apsm->ingest(m);
    return;
  }
  if (impl_->mk) {
    impl_->mk->ingest(m);
    return;
  }
  if (impl_->has_last_time && m.time_index <= impl_->last_time) {
    throw OrderingError("measurement stream must be strictly time-ordered");
  }
  impl_->has_last_time = true;
  impl_->last_time = m.time_index;
  impl_->seen.push_back(m);
}

std::unique_ptr<MapEstimate> OnlineEstimator::snapshot() const {
  if (impl_->apsm) {
    return std::make_unique<RkhsMapEstimate>(impl_->apsm->function());
  }
  if (impl_->mk) {
    return std::make_unique<MkMapEstimate>(impl_->mk->params(), impl_->mk->dictionary(),
                                           impl_->mk->bank());
  }
  if (std::holds_alternative<IdwSetup>(impl_->setup)) {
    return std::make_unique<IdwMapEstimate>(impl_->seen,
                                            std::get<IdwSetup>(impl_->setup).power);
  }
  return std::make_unique<NnMapEstimate>(impl_->seen);
}

std::vector<LearningCurvePoint> learning_curve_over_stream(
    const GroundTruthMap& truth, const std::vector<Measurement>& stream,
    const EstimatorSetup& setup, const GridSpec& grid,
    const std::vector<std::size_t>& checkpoints) {
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] == 0 || checkpoints[i] > stream.size()) {
      throw ConfigError("checkpoint beyond stream length");
    }
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw ConfigError("checkpoints must be strictly increasing");
    }
  }

  std::vector<LearningCurvePoint> curve;
  if (checkpoints.empty()) return curve;

  OnlineEstimator est(setup);
  std::size_t next = 0;
  std::vector<Measurement> seen;
  seen.reserve(stream.size());
  for (std::size_t n = 0; n < stream.size() && next < checkpoints.size(); ++n) {
    est.ingest(stream[n]);
    seen.push_back(stream[n]);
    if (n + 1 == checkpoints[next]) {
      const auto snapshot = est.snapshot();
      LearningCurvePoint point;
      point.n = checkpoints[next];
      point.report = grid_eval(*snapshot, truth, grid, &seen);
      curve.push_back(std::move(point));
      ++next;
    }
  }
  return curve;
}

std::vector<LearningCurvePoint> learning_curve(const ScenarioConfig& scenario,
                                               std::size_t n_measurements,
                                               const EstimatorSetup& setup,
                                               const GridSpec& grid,
                                               const std::vector<std::size_t>& checkpoints) {
  const GroundTruthMap truth(scenario);
  const auto trajectory = gen_trajectory(scenario, n_measurements);
  const auto stream = gen_measurements(truth, trajectory);
  return learning_curve_over_stream(truth, stream, setup, grid, checkpoints);
}

std::vector<TrackingPoint> tracking_experiment(const ScenarioConfig& scenario,
                                               const TrackingConfig& tracking,
                                               const EstimatorSetup& setup,
                                               const GridSpec& grid) {
  if (tracking.event_step == 0 || tracking.event_step > tracking.n_measurements) {
    throw ConfigError("event_step must lie within the stream");
  }
  if (tracking.eval_every == 0) throw ConfigError("eval_every must be >= 1");

  const GroundTruthMap before(scenario);
  const GroundTruthMap after = before.with_event(tracking.event);
  const auto trajectory = gen_trajectory(scenario, tracking.n_measurements);

  const std::vector<Position> pre(trajectory.begin(),
                                  trajectory.begin() + static_cast<std::ptrdiff_t>(tracking.event_step));
  const std::vector<Position> post(trajectory.begin() + static_cast<std::ptrdiff_t>(tracking.event_step),
                                   trajectory.end());
  std::vector<Measurement> stream = gen_measurements(before, pre, 1);
  const std::vector<Measurement> tail =
      gen_measurements(after, post, static_cast<std::int64_t>(tracking.event_step) + 1);
  stream.insert(stream.end(), tail.begin(), tail.end());

  OnlineEstimator est(setup);
  std::vector<Measurement> seen;
  seen.reserve(stream.size());
  std::vector<TrackingPoint> series;
  for (std::size_t n = 0; n < stream.size(); ++n) {
    est.ingest(stream[n]);
    seen.push_back(stream[n]);
    const std::size_t done = n + 1;
    if (done % tracking.eval_every == 0 || done == stream.size()) {
      const GroundTruthMap& truth = done <= tracking.event_step ? before : after;
      const auto snapshot = est.snapshot();
      const EvalReport report = grid_eval(*snapshot, truth, grid, &seen);
      series.push_back({done, report.sampled_rmse_db});
    }
  }
  return series;
}

}  // namespace radiomap
