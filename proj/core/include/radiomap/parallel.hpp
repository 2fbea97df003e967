#pragma once

#include <cstddef>
#include <functional>

namespace radiomap {

// Worker pool size: min(hardware_concurrency, RADIOMAP_THREADS) with a floor
// of 1. RADIOMAP_THREADS is read once per call so tests can vary it.
std::size_t worker_count();

// Chunked index-parallel loop. Deterministic as long as iterations write to
// disjoint slots; falls back to a plain loop for small n or a single worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace radiomap
