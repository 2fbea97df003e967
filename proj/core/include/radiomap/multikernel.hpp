#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <deque>
#include <vector>

#include "radiomap/dictionary.hpp"

namespace radiomap {

// M x I parameter matrix; row m <-> kernel kappa_m, column i <-> dictionary
// entry i. Entries are dB-valued expansion weights.
using ParamMatrix = Eigen::MatrixXd;

// Measurement-consistency set in parameter space:
// { A : |<A, K> - target| <= epsilon }, with K the kernel matrix at the
// measurement position.
struct MeasurementSet {
  Eigen::MatrixXd kernel_matrix;  // M x I
  double target_db = 0.0;
  double epsilon_db = 1.0;
};

void validate(const MeasurementSet& s);

struct MkConfig {
  double epsilon_db = 1.0;
  double step_gamma = 1.0;       // forward step size, in (0, 2)
  double lambda_kernel = 1e-3;   // row-group (kernel selection) weight, >= 0
  double lambda_dict = 1e-3;     // column-group (dictionary pruning) weight, >= 0
  double reweight_delta = 1e-2;  // > 0
  std::size_t window_q = 2;
  std::vector<double> weights;   // q positive entries summing to 1; empty = uniform
};

void validate(const MkConfig& cfg);
std::vector<double> resolved_weights(const MkConfig& cfg);

// Iteratively reweighted group penalties: row_w[m] = 1 / (||row m||_2 + delta),
// col_w[i] = 1 / (||col i||_2 + delta).
struct RowColWeights {
  Eigen::VectorXd row_w;
  Eigen::VectorXd col_w;
};

// <A, K> = trace(A^T K) = sum_{m,i} A[m,i] * K[m,i].
double estimate_mk(const ParamMatrix& A, const Eigen::MatrixXd& K);

// Frobenius-metric projection onto the measurement set. Outside the slab:
// A + sign(r) * (|r| - eps) / ||K||_F^2 * K.
ParamMatrix project_measurement_set(const ParamMatrix& A, const MeasurementSet& s);

// Weighted group soft-threshold per column (resp. row):
// a -> a * max(0, 1 - tau * w / ||a||_2), exactly zero when ||a||_2 <= tau * w.
ParamMatrix prox_col_groups(const ParamMatrix& A, double tau, const Eigen::VectorXd& col_w);
ParamMatrix prox_row_groups(const ParamMatrix& A, double tau, const Eigen::VectorXd& row_w);

// Forward-backward step: forward = gradient step on the weighted
// half-squared-distance sum to the recent measurement sets, backward =
// sequential column-group then row-group prox. With lambda = 0, q = 1,
// gamma = 1 this reduces exactly to project_measurement_set.
ParamMatrix fb_update(const ParamMatrix& A, const std::vector<MeasurementSet>& recent,
                      const MkConfig& cfg, const RowColWeights& w);

RowColWeights update_weights(const ParamMatrix& A, double delta);

struct PruneResult {
  ParamMatrix A;
  Dictionary dict;
  std::vector<std::size_t> removed_columns;
};

// Drops dictionary entries whose parameter column norm is <= tol, keeping the
// matrix and dictionary shapes synchronized.
PruneResult prune_dictionary_mk(const ParamMatrix& A, const Dictionary& dict, double tol);

struct MkStreamConfig {
  MkConfig update;
  std::size_t reweight_period = 25;  // recompute weights / prune every W steps
  double prune_tol = 1e-8;
  bool prune_enabled = true;
};

struct MkStepDiagnostics {
  std::int64_t step = 0;
  double residual_before = 0.0;
  double residual_after = 0.0;
  std::size_t dict_size = 0;
  std::size_t zero_row_count = 0;
  std::size_t zero_col_count = 0;
};

// Online multi-kernel estimator. Per measurement: dictionary admission (new
// entries start as zero columns), fb_update over the q most recent
// measurement sets (kernel matrices rebuilt against the current dictionary),
// and periodic reweighting/pruning.
class MultiKernelEstimator {
 public:
  MultiKernelEstimator(const KernelBank& bank, const MkStreamConfig& cfg,
                       const DictionaryConfig& dict_cfg);

  MkStepDiagnostics ingest(const Measurement& m);

  double estimate_at(const Position& x) const;  // raw, unclamped

  const ParamMatrix& params() const { return A_; }
  const Dictionary& dictionary() const { return dict_; }
  const KernelBank& bank() const { return bank_; }
  const RowColWeights& reweights() const { return weights_; }

 private:
  KernelBank bank_;
  MkStreamConfig cfg_;
  ParamMatrix A_;
  Dictionary dict_;
  RowColWeights weights_;
  std::deque<Measurement> window_;
  std::int64_t step_count_ = 0;
  bool has_last_time_ = false;
  std::int64_t last_time_ = 0;
};

struct MkRunResult {
  ParamMatrix A;
  Dictionary dict;
  std::vector<MkStepDiagnostics> diagnostics;
};

MkRunResult run_stream_mk(const std::vector<Measurement>& stream, const KernelBank& bank,
                          const MkStreamConfig& cfg, const DictionaryConfig& dict_cfg);

}  // namespace radiomap
