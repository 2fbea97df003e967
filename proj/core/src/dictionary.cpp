#include "radiomap/dictionary.hpp"

#include <algorithm>

#include "radiomap/errors.hpp"

namespace radiomap {

void validate(const DictionaryConfig& cfg) {
  if (cfg.max_size == 0) {
    throw ConfigError("dictionary max_size must be >= 1");
  }
  if (!(cfg.coherence_threshold > 0.0) || !(cfg.coherence_threshold < 1.0)) {
    throw ConfigError("coherence_threshold must lie in (0, 1)");
  }
  validate(cfg.reference_kernel);
}

std::vector<Position> Dictionary::positions() const {
  std::vector<Position> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.position);
  return out;
}

double coherence(const Dictionary& dict, const Position& candidate) {
  double best = 0.0;
  for (const auto& e : dict.entries) {
    best = std::max(best, eval_kernel(dict.config.reference_kernel, candidate, e.position));
  }
  return best;
}

AdmissionResult admit_or_evict(const Dictionary& dict, const Measurement& m) {
  validate(dict.config);
  if (!is_finite(m.position)) {
    throw InvalidInputError("measurement position must be finite");
  }
  if (!dict.entries.empty() && m.time_index <= dict.entries.back().time_index) {
    throw OrderingError("measurement time_index is not newer than the dictionary");
  }

  AdmissionResult result;
  result.dict = dict;
  if (coherence(dict, m.position) > dict.config.coherence_threshold) {
    return result;  // too close to an existing entry
  }

  result.admitted = true;
  if (result.dict.entries.size() >= dict.config.max_size) {
    result.evicted_time_index = result.dict.entries.front().time_index;
    result.dict.entries.erase(result.dict.entries.begin());
  }
  result.dict.entries.push_back({m.position, m.path_loss_db, m.time_index});
  return result;
}

Eigen::MatrixXd kernel_matrix_at(const KernelBank& bank, const Dictionary& dict,
                                 const Position& x) {
  validate(bank);
  if (dict.empty()) {
    throw EmptyDictionaryError("kernel_matrix_at requires a non-empty dictionary");
  }
  const Eigen::Index m_count = static_cast<Eigen::Index>(bank.size());
  const Eigen::Index i_count = static_cast<Eigen::Index>(dict.size());
  Eigen::MatrixXd k(m_count, i_count);
  for (Eigen::Index i = 0; i < i_count; ++i) {
    const Position& xi = dict.entries[static_cast<std::size_t>(i)].position;
    for (Eigen::Index m = 0; m < m_count; ++m) {
      k(m, i) = eval_kernel(bank.kernels[static_cast<std::size_t>(m)], x, xi);
    }
  }
  return k;
}

}  // namespace radiomap
