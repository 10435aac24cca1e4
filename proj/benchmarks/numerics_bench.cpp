#include <benchmark/benchmark.h>

#include "qnewton/numerics.hpp"
#include "qnewton/rng.hpp"

namespace {

qnewton::Matrix random_symmetric(std::size_t n) {
  qnewton::CounterRng rng(qnewton::derive_stream(1, n));
  std::vector<double> v(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) v[i * n + j] = v[j * n + i] = rng.uniform() - 0.5;
    v[i * n + i] += static_cast<double>(n);
  }
  return qnewton::Matrix(n, n, std::move(v));
}

void BM_SymmetricEigen(benchmark::State& state) {
  const auto a = random_symmetric(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qnewton::symmetric_eigen(a));
}
BENCHMARK(BM_SymmetricEigen)->RangeMultiplier(2)->Range(2, 32);

void BM_SingularValues(benchmark::State& state) {
  const auto a = random_symmetric(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(qnewton::singular_values(a));
}
BENCHMARK(BM_SingularValues)->RangeMultiplier(2)->Range(2, 32);

void BM_SolveSymmetric(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = random_symmetric(n);
  const auto z = qnewton::Vector::filled(n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(qnewton::solve_symmetric(a, z));
}
BENCHMARK(BM_SolveSymmetric)->RangeMultiplier(2)->Range(2, 32);

}  // namespace

BENCHMARK_MAIN();
