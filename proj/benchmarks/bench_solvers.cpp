#include <benchmark/benchmark.h>

#include "sparse_align/sparse_align.hpp"

using namespace sparse_align;

namespace {

CostMatrix costs(std::size_t n, std::size_t m, double lo = 0.0) {
  Rng rng(n * 1000 + m);
  return CostMatrix(random_matrix(n, m, lo, 1.0, rng));
}

void BM_SinkhornEpsilonScaled(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto c = costs(n, n);
  const auto a = Marginals::uniform(n);
  for (auto _ : state) benchmark::DoNotOptimize(sinkhorn_epsilon_scaled(c, a, a));
}
BENCHMARK(BM_SinkhornEpsilonScaled)->RangeMultiplier(2)->Range(4, 64)->Unit(benchmark::kMillisecond);

void BM_SinkhornFixedEpsilon(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto c = costs(n, n);
  const auto a = Marginals::uniform(n);
  SolverConfig config;
  config.epsilon_final = 1e-2;
  for (auto _ : state) benchmark::DoNotOptimize(sinkhorn_solve(c, a, a, config));
}
BENCHMARK(BM_SinkhornFixedEpsilon)->RangeMultiplier(2)->Range(4, 64)->Unit(benchmark::kMillisecond);

void BM_SolveConstrained(benchmark::State& state) {
  const auto variant = static_cast<Variant>(state.range(0));
  const auto c = variant == Variant::RelaxedOneToK ? costs(30, 20, -1.0) : costs(30, 20, 0.01);
  const ConstraintSpec spec{variant, variant == Variant::ExactK ? 4u : 1u};
  state.SetLabel(to_string(variant));
  for (auto _ : state) benchmark::DoNotOptimize(solve_constrained(c, spec));
}
BENCHMARK(BM_SolveConstrained)
    ->Arg(static_cast<int>(Variant::Vanilla))
    ->Arg(static_cast<int>(Variant::OneToK))
    ->Arg(static_cast<int>(Variant::RelaxedOneToK))
    ->Arg(static_cast<int>(Variant::ExactK))
    ->Unit(benchmark::kMillisecond);

void BM_BruteForceAssignment(benchmark::State& state) {
  const auto c = costs(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_assignment(c));
}
BENCHMARK(BM_BruteForceAssignment)->DenseRange(4, 8)->Unit(benchmark::kMicrosecond);

void BM_BirkhoffDecompose(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto plan = sinkhorn_epsilon_scaled(costs(n, n), Marginals::uniform(n), Marginals::uniform(n)).plan;
  for (auto _ : state) benchmark::DoNotOptimize(birkhoff_decompose(plan));
}
BENCHMARK(BM_BirkhoffDecompose)->DenseRange(4, 8, 2)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
