#include "robscatter/rng.hpp"

#include <numeric>

#include "robscatter/errors.hpp"
#include "robscatter/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace robscatter {

namespace {
std::seed_seq make_seed(std::uint64_t seed, std::uint64_t stream_id) {
  return std::seed_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32),
                       0x9e3779b9u};
}
}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream_id) {
  auto seq = make_seed(seed, stream_id);
  engine_.seed(seq);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) {
    throw DomainError("Rng::index on an empty range");
  }
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(engine_);
}

Matrix Rng::normal_matrix(Eigen::Index n, Eigen::Index p) {
  Matrix m(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      m(i, j) = normal();
    }
  }
  return m;
}

std::vector<int> Rng::sample_without_replacement(int n, int k) {
  if (k < 0 || k > n) {
    throw DomainError("sample_without_replacement: need 0 <= k <= n");
  }
  // partial Fisher-Yates
  std::vector<int> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<int>(i + index(static_cast<std::size_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

void set_threads(int threads) {
#ifdef _OPENMP
  if (threads >= 1) {
    omp_set_num_threads(threads);
  }
#else
  (void)threads;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace robscatter
