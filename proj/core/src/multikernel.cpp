#include "radiomap/multikernel.hpp"

#include <algorithm>
#include <cmath>

#include "radiomap/errors.hpp"

namespace radiomap {

namespace {

constexpr double kWeightSumTol = 1e-9;

void check_weights(const std::vector<double>& w, std::size_t expected) {
  if (w.size() != expected) {
    throw ConfigError("weight count does not match the number of measurement sets");
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

std::vector<double> warmup_weights(const std::vector<double>& full, std::size_t k) {
  std::vector<double> w(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(k));
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
  return w;
}

Eigen::MatrixXd without_column(const Eigen::MatrixXd& a, Eigen::Index col) {
  Eigen::MatrixXd out(a.rows(), a.cols() - 1);
  if (col > 0) out.leftCols(col) = a.leftCols(col);
  if (col < a.cols() - 1) out.rightCols(a.cols() - 1 - col) = a.rightCols(a.cols() - 1 - col);
  return out;
}

}  // namespace

void validate(const MeasurementSet& s) {
  if (!(s.epsilon_db > 0.0)) throw ConfigError("measurement set epsilon must be > 0");
  if (!s.kernel_matrix.allFinite()) {
    throw InvalidInputError("kernel matrix must be finite");
  }
}

void validate(const MkConfig& cfg) {
  if (!(cfg.epsilon_db > 0.0)) throw ConfigError("epsilon must be > 0");
  if (!(cfg.step_gamma > 0.0) || !(cfg.step_gamma < 2.0)) {
    throw ConfigError("step_gamma must lie in (0, 2)");
  }
  if (cfg.lambda_kernel < 0.0 || cfg.lambda_dict < 0.0) {
    throw ConfigError("regularization weights must be >= 0");
  }
  if (!(cfg.reweight_delta > 0.0)) throw ConfigError("reweight_delta must be > 0");
  if (cfg.window_q == 0) throw ConfigError("window_q must be >= 1");
  if (!cfg.weights.empty()) check_weights(cfg.weights, cfg.window_q);
}

std::vector<double> resolved_weights(const MkConfig& cfg) {
  if (!cfg.weights.empty()) return cfg.weights;
  return std::vector<double>(cfg.window_q, 1.0 / static_cast<double>(cfg.window_q));
}

double estimate_mk(const ParamMatrix& A, const Eigen::MatrixXd& K) {
  if (A.rows() != K.rows() || A.cols() != K.cols()) {
    throw DimensionError("parameter and kernel matrices must share a shape");
  }
  return A.cwiseProduct(K).sum();
}

ParamMatrix project_measurement_set(const ParamMatrix& A, const MeasurementSet& s) {
  validate(s);
  const double knorm2 = s.kernel_matrix.squaredNorm();
  if (knorm2 == 0.0) {
    throw DegenerateConstraintError("measurement set has a zero kernel matrix");
  }
  const double r = s.target_db - estimate_mk(A, s.kernel_matrix);
  if (std::abs(r) <= s.epsilon_db) return A;
  const double scale = (r > 0.0 ? 1.0 : -1.0) * (std::abs(r) - s.epsilon_db) / knorm2;
  return A + scale * s.kernel_matrix;
}

ParamMatrix prox_col_groups(const ParamMatrix& A, double tau, const Eigen::VectorXd& col_w) {
  if (tau < 0.0) throw ConfigError("prox threshold must be >= 0");
  if (tau == 0.0) return A;
  if (col_w.size() != A.cols()) throw DimensionError("column weight count mismatch");
  ParamMatrix out = A;
  for (Eigen::Index i = 0; i < out.cols(); ++i) {
    const double w = col_w[i];
    if (!(w > 0.0)) throw ConfigError("group weights must be positive");
    const double norm = out.col(i).norm();
    if (norm <= tau * w) {
      out.col(i).setZero();
    } else {
      out.col(i) *= 1.0 - tau * w / norm;
    }
  }
  return out;
}

ParamMatrix prox_row_groups(const ParamMatrix& A, double tau, const Eigen::VectorXd& row_w) {
  if (tau < 0.0) throw ConfigError("prox threshold must be >= 0");
  if (tau == 0.0) return A;
  if (row_w.size() != A.rows()) throw DimensionError("row weight count mismatch");
  ParamMatrix out = A;
  for (Eigen::Index m = 0; m < out.rows(); ++m) {
    const double w = row_w[m];
    if (!(w > 0.0)) throw ConfigError("group weights must be positive");
    const double norm = out.row(m).norm();
    if (norm <= tau * w) {
      out.row(m).setZero();
    } else {
      out.row(m) *= 1.0 - tau * w / norm;
    }
  }
  return out;
}

ParamMatrix fb_update(const ParamMatrix& A, const std::vector<MeasurementSet>& recent,
                      const MkConfig& cfg, const RowColWeights& w) {
  if (recent.empty()) throw ConfigError("fb_update needs at least one measurement set");
  validate(cfg);
  const std::vector<double> weights = resolved_weights(cfg);
  check_weights(weights, recent.size());

  // Forward: A - gamma * sum_j w_j (A - P_j(A)), written as
  // (1 - gamma) A + gamma * sum_j w_j P_j(A) so that gamma = 1, q = 1
  // collapses bit-exactly to the single projection.
  ParamMatrix forward = weights[0] * project_measurement_set(A, recent[0]);
  for (std::size_t j = 1; j < recent.size(); ++j) {
    forward += weights[j] * project_measurement_set(A, recent[j]);
  }
  forward = cfg.step_gamma * forward + (1.0 - cfg.step_gamma) * A;

  // Backward: sequential group proxes, columns (dictionary) then rows (kernels).
  forward = prox_col_groups(forward, cfg.step_gamma * cfg.lambda_dict, w.col_w);
  forward = prox_row_groups(forward, cfg.step_gamma * cfg.lambda_kernel, w.row_w);
  return forward;
}

RowColWeights update_weights(const ParamMatrix& A, double delta) {
  if (!(delta > 0.0)) throw ConfigError("reweight delta must be > 0");
  RowColWeights w;
  w.row_w.resize(A.rows());
  w.col_w.resize(A.cols());
  for (Eigen::Index m = 0; m < A.rows(); ++m) {
    w.row_w[m] = 1.0 / (A.row(m).norm() + delta);
  }
  for (Eigen::Index i = 0; i < A.cols(); ++i) {
    w.col_w[i] = 1.0 / (A.col(i).norm() + delta);
  }
  return w;
}

PruneResult prune_dictionary_mk(const ParamMatrix& A, const Dictionary& dict, double tol) {
  if (tol < 0.0) throw ConfigError("prune tolerance must be >= 0");
  if (A.cols() != static_cast<Eigen::Index>(dict.size())) {
    throw DimensionError("parameter columns and dictionary entries out of sync");
  }
  PruneResult result;
  result.dict.config = dict.config;
  std::vector<Eigen::Index> kept;
  for (Eigen::Index i = 0; i < A.cols(); ++i) {
    if (A.col(i).norm() <= tol) {
      result.removed_columns.push_back(static_cast<std::size_t>(i));
    } else {
      kept.push_back(i);
    }
  }
  result.A.resize(A.rows(), static_cast<Eigen::Index>(kept.size()));
  result.dict.entries.reserve(kept.size());
  for (std::size_t k = 0; k < kept.size(); ++k) {
    result.A.col(static_cast<Eigen::Index>(k)) = A.col(kept[k]);
    result.dict.entries.push_back(dict.entries[static_cast<std::size_t>(kept[k])]);
  }
  return result;
}

MultiKernelEstimator::MultiKernelEstimator(const KernelBank& bank, const MkStreamConfig& cfg,
                                           const DictionaryConfig& dict_cfg)
    : bank_(bank), cfg_(cfg) {
  validate(bank_);
  validate(cfg_.update);
  validate(dict_cfg);
  if (cfg_.prune_tol < 0.0) throw ConfigError("prune_tol must be >= 0");
  dict_.config = dict_cfg;
  A_.resize(static_cast<Eigen::Index>(bank_.size()), 0);
  weights_.row_w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(bank_.size()));
  weights_.col_w = Eigen::VectorXd(0);
}

MkStepDiagnostics MultiKernelEstimator::ingest(const Measurement& m) {
  if (has_last_time_ && m.time_index <= last_time_) {
    throw OrderingError("measurement stream must be strictly time-ordered");
  }
  if (!std::isfinite(m.path_loss_db) || m.path_loss_db < 0.0) {
    throw InvalidInputError("path loss must be finite and >= 0");
  }
  last_time_ = m.time_index;
  has_last_time_ = true;
  ++step_count_;

  AdmissionResult adm = admit_or_evict(dict_, m);
  if (adm.admitted) {
    if (adm.evicted_time_index.has_value()) {
      A_ = without_column(A_, 0);
      Eigen::VectorXd rest = weights_.col_w.tail(weights_.col_w.size() - 1);
      weights_.col_w = std::move(rest);
    }
    // New entries start as zero columns: the estimate is unchanged at admission.
    A_.conservativeResize(Eigen::NoChange, A_.cols() + 1);
    A_.col(A_.cols() - 1).setZero();
    weights_.col_w.conservativeResize(weights_.col_w.size() + 1);
    weights_.col_w[weights_.col_w.size() - 1] = 1.0;
  }
  dict_ = std::move(adm.dict);

  window_.push_back(m);
  while (window_.size() > cfg_.update.window_q) window_.pop_front();

  // Kernel matrices are rebuilt against the current dictionary so every
  // windowed set matches the present shape of A.
  std::vector<MeasurementSet> sets;
  sets.reserve(window_.size());
  for (const Measurement& wm : window_) {
    sets.push_back({kernel_matrix_at(bank_, dict_, wm.position), wm.path_loss_db,
                    cfg_.update.epsilon_db});
  }

  MkStepDiagnostics diag;
  diag.step = step_count_;
  diag.residual_before = std::abs(m.path_loss_db - estimate_mk(A_, sets.back().kernel_matrix));

  MkConfig step_cfg = cfg_.update;
  const std::vector<double> full = resolved_weights(cfg_.update);
  step_cfg.window_q = sets.size();
  step_cfg.weights = sets.size() < full.size() ? warmup_weights(full, sets.size()) : full;

  A_ = fb_update(A_, sets, step_cfg, weights_);
  diag.residual_after = std::abs(m.path_loss_db - estimate_mk(A_, sets.back().kernel_matrix));

  if (cfg_.reweight_period > 0 &&
      step_count_ % static_cast<std::int64_t>(cfg_.reweight_period) == 0) {
    if (cfg_.prune_enabled) {
      PruneResult pruned = prune_dictionary_mk(A_, dict_, cfg_.prune_tol);
      A_ = std::move(pruned.A);
      dict_ = std::move(pruned.dict);
    }
    weights_ = update_weights(A_, cfg_.update.reweight_delta);
  }

  diag.dict_size = dict_.size();
  for (Eigen::Index r = 0; r < A_.rows(); ++r) {
    if (A_.row(r).norm() == 0.0) ++diag.zero_row_count;
  }
  for (Eigen::Index c = 0; c < A_.cols(); ++c) {
    if (A_.col(c).norm() == 0.0) ++diag.zero_col_count;
  }
  return diag;
}

double MultiKernelEstimator::estimate_at(const Position& x) const {
  if (dict_.empty()) return 0.0;
  return estimate_mk(A_, kernel_matrix_at(bank_, dict_, x));
}

MkRunResult run_stream_mk(const std::vector<Measurement>& stream, const KernelBank& bank,
                          const MkStreamConfig& cfg, const DictionaryConfig& dict_cfg) {
  MultiKernelEstimator est(bank, cfg, dict_cfg);
  MkRunResult result;
  result.diagnostics.reserve(stream.size());
  for (const Measurement& m : stream) {
    result.diagnostics.push_back(est.ingest(m));
  }
  result.A = est.params();
  result.dict = est.dictionary();
  return result;
}

}  // namespace radiomap
