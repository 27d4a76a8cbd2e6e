#include "sbmcv/community.hpp"
#include "sbmcv/cv_risk.hpp"
#include "sbmcv/folds.hpp"
#include "sbmcv/netgen.hpp"
#include "sbmcv/sbm_fit.hpp"

#include <benchmark/benchmark.h>

using namespace sbmcv;

namespace {

Adjacency network(int n, int k) {
  Rng rng(7);
  const auto truth = tie_probabilities(planted_partition(k, 0.05, 5), memberships_from_sizes(equal_block_sizes(n, k)));
  return sample_network(truth, rng);
}

void BM_FitSbm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const Adjacency y = network(n, 3);
  const TrainingMask mask = TrainingMask::full(n);
  Rng rng(1);
  for (auto _ : state) benchmark::DoNotOptimize(fit_sbm(y, k, mask, rng));
}
BENCHMARK(BM_FitSbm)->Args({60, 3})->Args({120, 3})->Args({300, 3})->Args({120, 11})->Unit(benchmark::kMillisecond);

void BM_CvCurve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Adjacency y = network(n, 3);
  Rng rng(2);
  const FoldAssignment a = latin_assign(n, 10, rng);
  for (auto _ : state) benchmark::DoNotOptimize(cv_risk_curve(y, 1, 6, a, 3));
}
BENCHMARK(BM_CvCurve)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_Folds(benchmark::State& state) {
  const auto scheme = static_cast<FoldScheme>(state.range(0));
  Rng rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(assign_folds(scheme, 300, 10, rng));
}
BENCHMARK(BM_Folds)->DenseRange(0, 2);

void BM_GreedyModularity(benchmark::State& state) {
  const Adjacency y = network(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_modularity(y));
}
BENCHMARK(BM_GreedyModularity)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

void BM_Infomap(benchmark::State& state) {
  const Adjacency y = network(static_cast<int>(state.range(0)), 3);
  Rng rng(5);
  for (auto _ : state) benchmark::DoNotOptimize(infomap(y, rng));
}
BENCHMARK(BM_Infomap)->Arg(60)->Arg(120)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
