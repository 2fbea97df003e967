#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <deque>
#include <vector>

#include "radiomap/dictionary.hpp"

namespace radiomap {

// Dictionary-expanded RKHS function f(x) = sum_i gamma_i kappa(c_i, x).
// Coefficients are dB-valued; evaluation is never clamped here (reporting
// adaptors clamp at 0, the update loop must see raw values).
struct RkhsFunction {
  KernelSpec kernel;
  std::vector<Position> centers;
  Eigen::VectorXd coefficients;  // one per center
};

RkhsFunction zero_function(const KernelSpec& kernel);

double evaluate(const RkhsFunction& f, const Position& x);

// ||f||_H via the Gram matrix of the centers.
double rkhs_norm(const RkhsFunction& f);

// Set of functions whose prediction at `position` lies within epsilon of
// `target_db`; closed and convex in the RKHS.
struct Hyperslab {
  Position position;
  double target_db = 0.0;
  double epsilon_db = 1.0;
};

void validate(const Hyperslab& s);

struct ApsmConfig {
  double epsilon_db = 1.0;
  std::size_t window_q = 2;           // hyperslabs per update
  std::vector<double> weights;        // q positive entries summing to 1; empty = uniform
  double relaxation_mu = 1.0;         // in (0, 2)
};

void validate(const ApsmConfig& cfg);
std::vector<double> resolved_weights(const ApsmConfig& cfg);

// Metric projection onto the hyperslab. Inside the slab f is returned
// unchanged; otherwise f + beta * kappa(s.position, .) with
// beta = sign(r) * (|r| - eps) / kappa(s.position, s.position).
// Grows the expansion by a center at s.position when none coincides.
RkhsFunction project_hyperslab(const RkhsFunction& f, const Hyperslab& s);

struct SlabProjectionInfo {
  std::size_t center_index = 0;  // index in the returned function's centers
  double beta = 0.0;             // raw projection coefficient (0 inside the slab)
  bool new_center = false;       // true when the slab position was not a center of f
  double residual = 0.0;         // target - f(position) before the update
};

struct ApsmUpdateResult {
  RkhsFunction f;
  std::vector<SlabProjectionInfo> slabs;
};

// Weighted parallel projection: f' = f + mu * (sum_j w_j P_j(f) - f).
// cfg.weights must match recent.size() (no silent renormalization).
ApsmUpdateResult apsm_update_detail(const RkhsFunction& f,
                                    const std::vector<Hyperslab>& recent,
                                    const ApsmConfig& cfg);
RkhsFunction apsm_update(const RkhsFunction& f, const std::vector<Hyperslab>& recent,
                         const ApsmConfig& cfg);

struct StepDiagnostics {
  std::int64_t step = 0;
  double residual_before = 0.0;
  double residual_after = 0.0;
  std::size_t dict_size = 0;
};

// Online single-kernel estimator: coherence-gated dictionary plus one APSM
// update per arriving measurement over the q most recent hyperslabs.
//
// Measurements rejected by admission still generate hyperslabs. Their exact
// projection introduces a temporary center at the measurement position; after
// the update the temporary contribution is merged onto the nearest admitted
// center when |beta| > 1e-6 * ||gamma||_inf and discarded otherwise, so the
// expansion always tracks the dictionary between updates.
class ApsmEstimator {
 public:
  ApsmEstimator(const KernelSpec& kernel, const ApsmConfig& cfg,
                const DictionaryConfig& dict_cfg);

  StepDiagnostics ingest(const Measurement& m);

  const RkhsFunction& function() const { return f_; }
  const Dictionary& dictionary() const { return dict_; }
  std::int64_t steps_ingested() const { return step_count_; }

 private:
  ApsmConfig cfg_;
  RkhsFunction f_;
  Dictionary dict_;
  std::deque<Hyperslab> window_;
  std::int64_t step_count_ = 0;
  bool has_last_time_ = false;
  std::int64_t last_time_ = 0;
};

struct ApsmRunResult {
  RkhsFunction f;
  Dictionary dict;
  std::vector<StepDiagnostics> diagnostics;
};

// Throws OrderingError if the stream is not strictly time-ordered.
ApsmRunResult run_stream_apsm(const std::vector<Measurement>& stream,
                              const KernelSpec& kernel, const ApsmConfig& cfg,
                              const DictionaryConfig& dict_cfg);

}  // namespace radiomap
