// Parallel kernels against their serial reference loops.

#include <benchmark/benchmark.h>

#include "robscatter/evalsim.hpp"
#include "robscatter/initial.hpp"
#include "robscatter/numkernel.hpp"
#include "robscatter/parallel.hpp"
#include "robscatter/pipeline.hpp"
#include "robscatter/rng.hpp"

using namespace robscatter;

namespace {

struct DistanceCase {
  Matrix x;
  Vector mu;
  Matrix scatter;
};

DistanceCase distance_case(int n, int p) {
  Rng r(1, 0);
  DistanceCase c{r.normal_matrix(n, p), Vector::Zero(p), Matrix::Identity(p, p)};
  const Matrix a = r.normal_matrix(p, p);
  c.scatter += a * a.transpose() / p;
  return c;
}

void BM_MahalanobisSerial(benchmark::State& state) {
  const DistanceCase c = distance_case(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::mahalanobis(c.x, c.mu, c.scatter));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_MahalanobisParallel(benchmark::State& state) {
  const DistanceCase c = distance_case(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(mahalanobis(c.x, c.mu, c.scatter));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void mve_scoring(benchmark::State& state, Execution exec) {
  const int n = static_cast<int>(state.range(0)), p = static_cast<int>(state.range(1));
  Rng r(2, 0);
  const Matrix x = r.normal_matrix(n, p);
  std::vector<std::vector<int>> subsets;
  for (int k = 0; k < 500; ++k) subsets.push_back(r.sample_without_replacement(n, p + 1));
  for (auto _ : state) benchmark::DoNotOptimize(mve_best_candidate(x, subsets, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(subsets.size()));
}

void BM_MveScoringSerial(benchmark::State& state) { mve_scoring(state, Execution::Serial); }
void BM_MveScoringParallel(benchmark::State& state) { mve_scoring(state, Execution::Parallel); }

Scenario bench_scenario() {
  Scenario sc;
  sc.p = 5;
  sc.n = 50;
  sc.k_grid = {2, 8};
  sc.replicates = 20;
  sc.estimators = {parse_estimator("mm-opt+ksd"), parse_estimator("s-e+mve")};
  return sc;
}

void BM_ScenarioSerial(benchmark::State& state) {
  const Scenario sc = bench_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(reference::run_scenario(sc));
}

void BM_ScenarioParallel(benchmark::State& state) {
  const Scenario sc = bench_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(sc));
}

}  // namespace

BENCHMARK(BM_MahalanobisSerial)->Args({2000, 5})->Args({100000, 10})->Args({100000, 30});
BENCHMARK(BM_MahalanobisParallel)->Args({2000, 5})->Args({100000, 10})->Args({100000, 30});
BENCHMARK(BM_MveScoringSerial)->Args({100, 5})->Args({500, 20});
BENCHMARK(BM_MveScoringParallel)->Args({100, 5})->Args({500, 20});
BENCHMARK(BM_ScenarioSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScenarioParallel)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::AddCustomContext("omp_max_threads", std::to_string(max_threads()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
