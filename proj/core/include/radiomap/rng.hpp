#pragma once

#include <cstdint>
#include <random>

namespace radiomap {

// splitmix64 finalizer; decorrelates nearby seed/stream pairs.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic substream: every random draw in the toolkit is keyed by
// (scenario seed, stream id), never by shared generator state.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(mix64(mix64(seed) ^ stream));
}

namespace rng_stream {
constexpr std::uint64_t kShadowField = 0x0100;   // + station index
constexpr std::uint64_t kTrajectory = 0x0200;
constexpr std::uint64_t kPositionNoise = 0x10000000;  // + time index
constexpr std::uint64_t kValueNoise = 0x20000000;     // + time index
}  // namespace rng_stream

}  // namespace radiomap
