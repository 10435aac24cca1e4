#include <benchmark/benchmark.h>

#include "qnewton/newton.hpp"
#include "qnewton/rng.hpp"

namespace {

std::unique_ptr<qnewton::SumObjective> logistic(std::size_t d) {
  qnewton::CounterRng rng(qnewton::derive_stream(2, d));
  const std::size_t n = 64;
  std::vector<double> x(n * d);
  for (double& v : x) v = rng.uniform();
  std::vector<double> y(n);
  for (double& v : y) v = rng.uniform() < 0.5 ? -1.0 : 1.0;
  return qnewton::make_logistic(qnewton::Matrix(n, d, std::move(x)), std::move(y), 0.2);
}

void BM_QaeNewtonRun(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto obj = logistic(d);
  const qnewton::ConvexityCertificate cert{obj->analytic_mu(), obj->analytic_hessian_lipschitz()};
  qnewton::NewtonOptions opts;
  opts.eps = 0.01;
  opts.delta0 = 0.5 * cert.mu / cert.m_lip;
  const qnewton::SimulatedQae engine;
  const qnewton::Vector a0 = qnewton::Vector::zeros(d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qnewton::run_qae_newton(*obj, cert, a0, opts, engine));
    ++opts.seed;
  }
}
BENCHMARK(BM_QaeNewtonRun)->DenseRange(1, 4, 1)->Unit(benchmark::kMillisecond);

void BM_CmcGradient(benchmark::State& state) {
  const auto obj = logistic(3);
  const qnewton::Vector a{0.1, 0.2, 0.3};
  const auto n = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(qnewton::cmc_gradient(*obj, a, n, seed++));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(3 * n));
}
BENCHMARK(BM_CmcGradient)->RangeMultiplier(8)->Range(64, 32768);

}  // namespace

BENCHMARK_MAIN();
