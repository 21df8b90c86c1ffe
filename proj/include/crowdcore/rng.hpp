#pragma once

#include <cstdint>

namespace crowdcore::rng {

// Counter-based generator: every draw is a pure function of (seed, stream
// tag, counters). Draws can be made in any order, from any thread, and two
// runs with the same seed produce bit-identical streams.

inline constexpr std::uint64_t kStreamTruth = 0x74727574686b6579ull;
inline constexpr std::uint64_t kStreamLabel = 0x6c6162656c6b6579ull;
inline constexpr std::uint64_t kStreamTie = 0x7469656272656b30ull;
inline constexpr std::uint64_t kStreamPerm = 0x7065726d6b657930ull;

inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t stream) {
  return mix(mix(seed) ^ stream);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t stream, std::uint64_t a) {
  return mix(key(seed, stream) ^ a);
}

inline std::uint64_t key(std::uint64_t seed, std::uint64_t stream, std::uint64_t a,
                         std::uint64_t b) {
  return mix(key(seed, stream, a) ^ b);
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform(std::uint64_t k) {
  return static_cast<double>(mix(k) >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n). Multiply-shift map of a 64-bit draw; the bias
// is O(n / 2^64), far below anything our statistics can resolve.
inline std::uint64_t bounded(std::uint64_t k, std::uint64_t n) {
  const unsigned __int128 wide = static_cast<unsigned __int128>(mix(k)) * n;
  return static_cast<std::uint64_t>(wide >> 64);
}

}  // namespace crowdcore::rng
