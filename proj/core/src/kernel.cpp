#include "radiomap/kernel.hpp"

#include <cmath>
#include <set>
#include <string>

#include "radiomap/errors.hpp"

namespace radiomap {

const char* to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::kGaussian:
      return "gaussian";
    case KernelFamily::kLaplacian:
      return "laplacian";
  }
  return "unknown";
}

KernelFamily kernel_family_from_string(const std::string& name) {
  if (name == "gaussian") return KernelFamily::kGaussian;
  if (name == "laplacian") return KernelFamily::kLaplacian;
  throw ConfigError("unknown kernel family: " + name);
}

void validate(const KernelSpec& spec) {
  if (!(spec.bandwidth_m > 0.0) || !std::isfinite(spec.bandwidth_m)) {
    throw ConfigError("kernel bandwidth must be positive and finite");
  }
}

double eval_kernel(const KernelSpec& spec, const Position& a, const Position& b) {
  validate(spec);
  if (!is_finite(a) || !is_finite(b)) {
    throw InvalidInputError("kernel evaluated at non-finite position");
  }
  const double sigma = spec.bandwidth_m;
  switch (spec.family) {
    case KernelFamily::kGaussian:
      return std::exp(-squared_distance(a, b) / (2.0 * sigma * sigma));
    case KernelFamily::kLaplacian:
      return std::exp(-distance(a, b) / sigma);
  }
  throw InvalidInputError("unknown kernel family");
}

Eigen::MatrixXd gram_matrix(const KernelSpec& spec,
                            const std::vector<Position>& positions) {
  if (positions.empty()) {
    throw InvalidInputError("gram_matrix requires at least one position");
  }
  const Eigen::Index n = static_cast<Eigen::Index>(positions.size());
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    g(i, i) = 1.0;  // kappa(x, x) = 1 for both families
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = eval_kernel(spec, positions[static_cast<std::size_t>(i)],
                                   positions[static_cast<std::size_t>(j)]);
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

KernelBank KernelBank::geometric(KernelFamily family, double sigma0_m, std::size_t count) {
  if (!(sigma0_m > 0.0) || count == 0) {
    throw ConfigError("geometric kernel bank needs sigma0 > 0 and count >= 1");
  }
  KernelBank bank;
  bank.kernels.reserve(count);
  double sigma = sigma0_m;
  for (std::size_t m = 0; m < count; ++m) {
    bank.kernels.push_back({family, sigma});
    sigma *= 2.0;
  }
  return bank;
}

const KernelSpec& KernelBank::median_bandwidth_kernel() const {
  validate(*this);
  // Lower median by bandwidth.
  std::vector<std::size_t> order(kernels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return kernels[a].bandwidth_m < kernels[b].bandwidth_m;
  });
  return kernels[order[(order.size() - 1) / 2]];
}

void validate(const KernelBank& bank) {
  if (bank.kernels.empty()) {
    throw ConfigError("kernel bank must contain at least one kernel");
  }
  std::set<double> bandwidths;
  for (const auto& k : bank.kernels) {
    validate(k);
    if (!bandwidths.insert(k.bandwidth_m).second) {
      throw ConfigError("kernel bank bandwidths must be pairwise distinct");
    }
  }
}

}  // namespace radiomap
