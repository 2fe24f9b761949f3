#pragma once

#include <cstdint>

namespace robscatter::streams {

// Substream ids are tag << 40 | index so that different consumers of one
// seed never share a stream.
inline constexpr std::uint64_t kMveSubset = 1;
inline constexpr std::uint64_t kKurtosisRestart = 2;
inline constexpr std::uint64_t kSpecificDirection = 3;
inline constexpr std::uint64_t kSubsamplingDirection = 4;
inline constexpr std::uint64_t kReplicate = 5;
inline constexpr std::uint64_t kCalibration = 6;

inline constexpr std::uint64_t id(std::uint64_t tag, std::uint64_t index) { return (tag << 40) | index; }

// splitmix64 finalizer; derives child seeds for nested consumers.
inline constexpr std::uint64_t mix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t child_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix(mix(mix(seed) ^ a) ^ b);
}

}  // namespace robscatter::streams
