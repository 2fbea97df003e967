#pragma once

#include <string>
#include <vector>

#include "radiomap/apsm.hpp"
#include "radiomap/eval.hpp"
#include "radiomap/multikernel.hpp"

namespace radiomap {

// Measurement streams: header "time_index,x,y,path_loss_db". Values are
// written with round-trip precision so import reproduces the stream exactly.
void write_measurements_csv(const std::string& path, const std::vector<Measurement>& ms);
std::vector<Measurement> read_measurements_csv(const std::string& path);

// Diagnostics: "step,residual_before,residual_after,dict_size" (+ zero row /
// column counts for the multi-kernel estimator).
void write_apsm_diagnostics_csv(const std::string& path, const std::vector<StepDiagnostics>& d);
void write_mk_diagnostics_csv(const std::string& path, const std::vector<MkStepDiagnostics>& d);

// Per-cell report grid: "x,y,truth_db,estimate_db,abs_err_db".
void write_eval_grid_csv(const std::string& path, const EvalReport& report);

// Plain map dump: "x,y,path_loss_db".
void write_map_grid_csv(const std::string& path, const GridSpec& grid,
                        const Eigen::MatrixXd& values);

}  // namespace radiomap
