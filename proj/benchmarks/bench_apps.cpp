#include <benchmark/benchmark.h>

#include "revhyp/nicd.hpp"
#include "revhyp/rng.hpp"
#include "revhyp/social_choice.hpp"

using namespace revhyp;

static void BM_NicdExactAgreement(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  NicdConfig cfg{3, n, 4, 0.5, 1, 3};
  std::vector<Protocol> protocols(4, Protocol::plurality(3, n));
  for (auto _ : state)
    benchmark::DoNotOptimize(agreement_probability(cfg, protocols, 1));
}
BENCHMARK(BM_NicdExactAgreement)->Arg(4)->Arg(7)->Arg(10);

static void BM_NicdMcAgreement(benchmark::State& state) {
  NicdConfig cfg{3, 101, 4, 0.5, state.range(0), 11};
  std::vector<Protocol> protocols(4, Protocol::plurality(3, 101));
  for (auto _ : state)
    benchmark::DoNotOptimize(agreement_probability_mc(cfg, protocols, 1));
}
BENCHMARK(BM_NicdMcAgreement)->Arg(1000)->Arg(10000);

static void BM_ParadoxProbability(benchmark::State& state) {
  Rng rng(9);
  const int n = static_cast<int>(state.range(0));
  std::vector<double> table(std::size_t{1} << n);
  auto mk = [&] {
    for (double& v : table) v = rng.bernoulli(0.5) ? 1.0 : -1.0;
    return CubeFunction(n, {0.5}, table);
  };
  CubeFunction f1 = mk(), f2 = mk(), f3 = mk();
  RankingDistribution law{{1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}};
  for (auto _ : state) benchmark::DoNotOptimize(paradox_probability(f1, f2, f3, law));
}
BENCHMARK(BM_ParadoxProbability)->Arg(8)->Arg(12)->Arg(16);

static void BM_Fourier(benchmark::State& state) {
  Rng rng(11);
  const int n = static_cast<int>(state.range(0));
  std::vector<double> table(std::size_t{1} << n);
  for (double& v : table) v = rng.bernoulli(0.5) ? 1.0 : -1.0;
  for (auto _ : state) {
    CubeFunction f(n, {0.35}, table);
    benchmark::DoNotOptimize(f.fourier());
  }
}
BENCHMARK(BM_Fourier)->Arg(10)->Arg(14)->Arg(18);

BENCHMARK_MAIN();
