#pragma once

#include <Eigen/Core>
#include <vector>

#include "radiomap/geometry.hpp"

namespace radiomap {

enum class KernelFamily { kGaussian, kLaplacian };

const char* to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

// Reproducing kernel on R^2. Both families are radial, strictly positive,
// and evaluate to 1 at coincident points.
struct KernelSpec {
  KernelFamily family = KernelFamily::kGaussian;
  double bandwidth_m = 1.0;
};

void validate(const KernelSpec& spec);

// Gaussian: exp(-||a-b||^2 / (2 sigma^2)); Laplacian: exp(-||a-b|| / sigma).
double eval_kernel(const KernelSpec& spec, const Position& a, const Position& b);

// Entry (i, j) = eval_kernel(spec, positions[i], positions[j]).
Eigen::MatrixXd gram_matrix(const KernelSpec& spec,
                            const std::vector<Position>& positions);

// Ordered bank of M kernels with pairwise distinct bandwidths.
struct KernelBank {
  std::vector<KernelSpec> kernels;

  std::size_t size() const { return kernels.size(); }

  // Geometric bandwidth ladder sigma_m = sigma0 * 2^m, m = 0..count-1.
  static KernelBank geometric(KernelFamily family, double sigma0_m, std::size_t count);

  // Lower-median bandwidth kernel; default reference for dictionary coherence.
  const KernelSpec& median_bandwidth_kernel() const;
};

void validate(const KernelBank& bank);

}  // namespace radiomap
