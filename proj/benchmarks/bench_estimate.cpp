#include <benchmark/benchmark.h>

#include "revhyp/hypercon.hpp"
#include "revhyp/logsob.hpp"

using namespace revhyp;

static void BM_TwoPointGridEstimate(benchmark::State& state) {
  Generator simple = simple_generator(uniform_space(2));
  EstimateBudget budget;
  budget.grid_points = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_constant(simple, 1.0, budget, 7));
}
BENCHMARK(BM_TwoPointGridEstimate)->Arg(1001)->Arg(10001);

static void BM_MultistartEstimate(benchmark::State& state) {
  Generator simple = simple_generator(uniform_space(static_cast<std::size_t>(state.range(0))));
  EstimateBudget budget;
  budget.restarts = 8;
  for (auto _ : state)
    benchmark::DoNotOptimize(estimate_constant(simple, 1.0, budget, 7, 1));
}
BENCHMARK(BM_MultistartEstimate)->Arg(4)->Arg(8)->Arg(16);

static void BM_VerifyReverse(benchmark::State& state) {
  Generator simple = simple_generator(uniform_space(static_cast<std::size_t>(state.range(0))));
  VerifyBudget budget;
  budget.restarts = 16;
  HyperQuery query{Direction::reverse, 0.5, 0.0, 0.7};
  for (auto _ : state) benchmark::DoNotOptimize(verify(simple, query, budget, 7, 1));
}
BENCHMARK(BM_VerifyReverse)->Arg(2)->Arg(4)->Arg(8);
