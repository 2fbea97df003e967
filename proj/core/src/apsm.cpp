#include "radiomap/apsm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radiomap/errors.hpp"

namespace radiomap {

namespace {

constexpr double kWeightSumTol = 1e-9;
// Gate for folding a temporary (non-admitted) projection center into the
// dictionary-backed expansion: |beta| must exceed kMergeRel * ||gamma||_inf.
constexpr double kMergeRel = 1e-6;

std::size_t find_center(const std::vector<Position>& centers, const Position& p) {
  for (std::size_t i = 0; i < centers.size(); ++i) {
    if (same_position(centers[i], p)) return i;
  }
  return centers.size();
}

void check_weights(const std::vector<double>& w, std::size_t expected) {
  if (w.size() != expected) {
    throw ConfigError("weight count does not match the number of hyperslabs");
  }
  double sum = 0.0;
  for (double v : w) {
    if (!(v > 0.0)) throw ConfigError("projection weights must be positive");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) {
    throw ConfigError("projection weights must sum to 1");
  }
}

// Truncated-and-renormalized weight prefix used during stream warmup, when
// fewer than q measurements exist. Explicit here, never inside apsm_update.
std::vector<double> warmup_weights(const std::vector<double>& full, std::size_t k) {
  std::vector<double> w(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(k));
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return w;
}

}  // namespace

RkhsFunction zero_function(const KernelSpec& kernel) {
  validate(kernel);
  return {kernel, {}, Eigen::VectorXd(0)};
}

double evaluate(const RkhsFunction& f, const Position& x) {
  double sum = 0.0;
  for (std::size_t i = 0; i < f.centers.size(); ++i) {
    sum += f.coefficients[static_cast<Eigen::Index>(i)] * eval_kernel(f.kernel, f.centers[i], x);
  }
  return sum;
}

double rkhs_norm(const RkhsFunction& f) {
  if (f.centers.empty()) return 0.0;
  const Eigen::MatrixXd g = gram_matrix(f.kernel, f.centers);
  const double sq = f.coefficients.dot(g * f.coefficients);
  return std::sqrt(std::max(sq, 0.0));
}

void validate(const Hyperslab& s) {
  if (!is_finite(s.position) || !std::isfinite(s.target_db)) {
    throw InvalidInputError("hyperslab position/target must be finite");
  }
  if (!(s.epsilon_db > 0.0)) {
    throw ConfigError("hyperslab epsilon must be > 0");
  }
}

void validate(const ApsmConfig& cfg) {
  if (!(cfg.epsilon_db > 0.0)) throw ConfigError("epsilon must be > 0");
  if (cfg.window_q == 0) throw ConfigError("window_q must be >= 1");
  if (!(cfg.relaxation_mu > 0.0) || !(cfg.relaxation_mu < 2.0)) {
    throw ConfigError("relaxation_mu must lie in (0, 2)");
  }
  if (!cfg.weights.empty()) check_weights(cfg.weights, cfg.window_q);
}

std::vector<double> resolved_weights(const ApsmConfig& cfg) {
  if (!cfg.weights.empty()) return cfg.weights;
  return std::vector<double>(cfg.window_q, 1.0 / static_cast<double>(cfg.window_q));
}

RkhsFunction project_hyperslab(const RkhsFunction& f, const Hyperslab& s) {
  validate(s);
  const double r = s.target_db - evaluate(f, s.position);
  if (std::abs(r) <= s.epsilon_db) return f;

  const double self = eval_kernel(f.kernel, s.position, s.position);  // = 1
  const double beta = (r > 0.0 ? 1.0 : -1.0) * (std::abs(r) - s.epsilon_db) / self;

  RkhsFunction out = f;
  const std::size_t idx = find_center(out.centers, s.position);
  if (idx == out.centers.size()) {
    out.centers.push_back(s.position);
    out.coefficients.conservativeResize(out.coefficients.size() + 1);
    out.coefficients[out.coefficients.size() - 1] = beta;
  } else {
    out.coefficients[static_cast<Eigen::Index>(idx)] += beta;
  }
  return out;
}

ApsmUpdateResult apsm_update_detail(const RkhsFunction& f,
                                    const std::vector<Hyperslab>& recent,
                                    const ApsmConfig& cfg) {
  if (recent.empty()) throw ConfigError("apsm_update needs at least one hyperslab");
  if (!(cfg.relaxation_mu > 0.0) || !(cfg.relaxation_mu < 2.0)) {
    throw ConfigError("relaxation_mu must lie in (0, 2)");
  }
  const std::vector<double> weights = resolved_weights(cfg);
  check_weights(weights, recent.size());

  ApsmUpdateResult result;
  result.f = f;
  result.slabs.resize(recent.size());

  // With sum(w) = 1 the parallel combination collapses to
  // f' = f + mu * sum_j w_j beta_j kappa(x_j, .), each beta_j taken from the
  // projection of the *base* f. Slabs already containing f contribute nothing
  // and never grow the expansion.
  for (std::size_t j = 0; j < recent.size(); ++j) {
    const Hyperslab& s = recent[j];
    validate(s);
    SlabProjectionInfo& info = result.slabs[j];
    info.residual = s.target_db - evaluate(f, s.position);
    info.center_index = find_center(result.f.centers, s.position);

    if (std::abs(info.residual) <= s.epsilon_db) continue;

    const double self = eval_kernel(f.kernel, s.position, s.position);
    info.beta = (info.residual > 0.0 ? 1.0 : -1.0) *
                (std::abs(info.residual) - s.epsilon_db) / self;
    if (info.center_index == result.f.centers.size()) {
      info.new_center = true;
      result.f.centers.push_back(s.position);
      result.f.coefficients.conservativeResize(result.f.coefficients.size() + 1);
      result.f.coefficients[result.f.coefficients.size() - 1] = 0.0;
    }
    result.f.coefficients[static_cast<Eigen::Index>(info.center_index)] +=
        cfg.relaxation_mu * (weights[j] * info.beta);
  }

  return result;
}

RkhsFunction apsm_update(const RkhsFunction& f, const std::vector<Hyperslab>& recent,
                         const ApsmConfig& cfg) {
  return apsm_update_detail(f, recent, cfg).f;
}

ApsmEstimator::ApsmEstimator(const KernelSpec& kernel, const ApsmConfig& cfg,
                             const DictionaryConfig& dict_cfg)
    : cfg_(cfg), f_(zero_function(kernel)) {
  validate(cfg_);
  validate(dict_cfg);
  dict_.config = dict_cfg;
}

StepDiagnostics ApsmEstimator::ingest(const Measurement& m) {
  if (has_last_time_ && m.time_index <= last_time_) {
    throw OrderingError("measurement stream must be strictly time-ordered");
  }
  if (!std::isfinite(m.path_loss_db) || m.path_loss_db < 0.0) {
    throw InvalidInputError("path loss must be finite and >= 0");
  }
  last_time_ = m.time_index;
  has_last_time_ = true;
  ++step_count_;

  // Admission first; the expansion mirrors the dictionary entry-for-entry.
  AdmissionResult adm = admit_or_evict(dict_, m);
  if (adm.admitted) {
    if (adm.evicted_time_index.has_value()) {
      // Oldest entry left the dictionary; its coefficient goes with it.
      f_.centers.erase(f_.centers.begin());
      Eigen::VectorXd rest = f_.coefficients.tail(f_.coefficients.size() - 1);
      f_.coefficients = std::move(rest);
    }
    f_.centers.push_back(m.position);
    f_.coefficients.conservativeResize(f_.coefficients.size() + 1);
    f_.coefficients[f_.coefficients.size() - 1] = 0.0;
  }
  dict_ = std::move(adm.dict);

  window_.push_back({m.position, m.path_loss_db, cfg_.epsilon_db});
  while (window_.size() > cfg_.window_q) window_.pop_front();

  const double gamma_inf =
      f_.coefficients.size() > 0 ? f_.coefficients.cwiseAbs().maxCoeff() : 0.0;

  StepDiagnostics diag;
  diag.step = step_count_;
  diag.residual_before = std::abs(m.path_loss_db - evaluate(f_, m.position));

  std::vector<Hyperslab> slabs(window_.begin(), window_.end());
  ApsmConfig step_cfg = cfg_;
  const std::vector<double> full = resolved_weights(cfg_);
  step_cfg.window_q = slabs.size();
  step_cfg.weights = slabs.size() < full.size() ? warmup_weights(full, slabs.size()) : full;

  ApsmUpdateResult upd = apsm_update_detail(f_, slabs, step_cfg);

  // Fold temporary centers (slabs at non-admitted positions) back onto the
  // dictionary-backed expansion: merge onto the nearest admitted center when
  // |beta| clears the gate, discard otherwise.
  const std::size_t backed = dict_.size();
  if (upd.f.centers.size() > backed) {
    const double gate = kMergeRel * gamma_inf;
    std::vector<double> max_beta(upd.f.centers.size() - backed, 0.0);
    for (const auto& info : upd.slabs) {
      if (info.new_center && info.center_index >= backed) {
        max_beta[info.center_index - backed] =
            std::max(max_beta[info.center_index - backed], std::abs(info.beta));
      }
    }
    for (std::size_t t = backed; t < upd.f.centers.size(); ++t) {
      const double coeff = upd.f.coefficients[static_cast<Eigen::Index>(t)];
      if (coeff == 0.0 || max_beta[t - backed] <= gate || backed == 0) continue;
      std::size_t nearest = 0;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < backed; ++i) {
        const double d2 = squared_distance(upd.f.centers[i], upd.f.centers[t]);
        if (d2 < best) {
          best = d2;
          nearest = i;
        }
      }
      upd.f.coefficients[static_cast<Eigen::Index>(nearest)] += coeff;
    }
    upd.f.centers.resize(backed);
    upd.f.coefficients.conservativeResize(static_cast<Eigen::Index>(backed));
  }

  f_ = std::move(upd.f);
  diag.residual_after = std::abs(m.path_loss_db - evaluate(f_, m.position));
  diag.dict_size = dict_.size();
  return diag;
}

ApsmRunResult run_stream_apsm(const std::vector<Measurement>& stream,
                              const KernelSpec& kernel, const ApsmConfig& cfg,
                              const DictionaryConfig& dict_cfg) {
  ApsmEstimator est(kernel, cfg, dict_cfg);
  ApsmRunResult result;
  result.diagnostics.reserve(stream.size());
  for (const Measurement& m : stream) {
    result.diagnostics.push_back(est.ingest(m));
  }
  result.f = est.function();
  result.dict = est.dictionary();
  return result;
}

}  // namespace radiomap
