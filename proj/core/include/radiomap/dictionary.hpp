#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "radiomap/geometry.hpp"
#include "radiomap/kernel.hpp"

namespace radiomap {

struct DictionaryEntry {
  Position position;
  double path_loss_db = 0.0;
  std::int64_t time_index = 0;
};

struct DictionaryConfig {
  std::size_t max_size = 100;
  double coherence_threshold = 0.95;  // in (0,1)
  KernelSpec reference_kernel;
};

void validate(const DictionaryConfig& cfg);

// Retained measurement subset used as kernel expansion centers. Admission is
// coherence-gated against the reference kernel; eviction is oldest-first.
// Value type: updates return new dictionaries.
struct Dictionary {
  DictionaryConfig config;
  std::vector<DictionaryEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  std::vector<Position> positions() const;
};

// max over entries of reference-kernel similarity to the candidate; 0 when empty.
double coherence(const Dictionary& dict, const Position& candidate);

struct AdmissionResult {
  Dictionary dict;
  bool admitted = false;
  // time_index of the evicted (oldest) entry, when admission displaced one.
  std::optional<std::int64_t> evicted_time_index;
};

// Admit iff coherence(dict, m.position) <= threshold; evict the oldest entry
// when admission would exceed max_size. Throws OrderingError on stale time_index.
AdmissionResult admit_or_evict(const Dictionary& dict, const Measurement& m);

// Kernel matrix at x over (bank, dictionary): entry (m, i) = kappa_m(x, x_i).
// Shape M x I with rows indexed by kernels, columns by dictionary entries.
Eigen::MatrixXd kernel_matrix_at(const KernelBank& bank, const Dictionary& dict,
                                 const Position& x);

}  // namespace radiomap
