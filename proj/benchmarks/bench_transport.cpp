#include <random>

#include <benchmark/benchmark.h>

#include "lbreg/transport.hpp"

namespace {

struct Sample {
  Eigen::VectorXd x, y, mu, nu;
};

Sample sample(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Sample s{Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    s.x[i] = g(rng);
    s.y[i] = g(rng);
    s.mu[i] = u(rng);
    s.nu[i] = u(rng);
  }
  s.mu /= s.mu.sum();
  s.nu /= s.nu.sum();
  return s;
}

void BM_ot_1d(benchmark::State& state) {
  const auto s = sample(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(lbreg::ot_1d(s.x, s.mu, s.y, s.nu).cost);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ot_1d)->RangeMultiplier(4)->Range(64, 65536)->Complexity(benchmark::oNLogN);

void BM_ot_exact(benchmark::State& state) {
  const auto s = sample(static_cast<int>(state.range(0)), 2);
  const Eigen::MatrixXd c = lbreg::squared_distances(s.x, s.y);
  for (auto _ : state) benchmark::DoNotOptimize(lbreg::ot_exact(c, s.mu, s.nu).cost);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ot_exact)->RangeMultiplier(2)->Range(16, 256)->Unit(benchmark::kMillisecond);

}  // namespace
