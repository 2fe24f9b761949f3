#pragma once

#include <cstdint>
#include <random>

#include "robscatter/numkernel.hpp"

namespace robscatter {

/// Deterministic generator keyed by (seed, stream_id). Distinct stream ids
/// give independent substreams, so work items can draw from their own stream
/// in any order or on any thread and still reproduce bit for bit.
/// A handle is single-owner; do not share one across threads.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream_id);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  /// n x p matrix of iid N(0, 1) draws, filled row by row.
  Matrix normal_matrix(Eigen::Index n, Eigen::Index p);

  /// k distinct indices from [0, n), in draw order.
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Convenience for the (seed, stream_id) factory spelled as in the docs.
inline Rng rng_stream(std::uint64_t seed, std::uint64_t stream_id) { return Rng(seed, stream_id); }

}  // namespace robscatter
