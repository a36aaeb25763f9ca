#include <benchmark/benchmark.h>

#include "revhyp/generator.hpp"
#include "revhyp/rng.hpp"

using namespace revhyp;

namespace {

Generator make_generator(std::size_t n) {
  Rng rng(7);
  std::vector<double> mu(n);
  double sum = 0.0;
  for (double& w : mu) sum += (w = rng.uniform(0.2, 1.0));
  for (double& w : mu) w /= sum;
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  auto space = make_space(std::move(labels), std::move(mu));
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      double w = rng.uniform(0.05, 0.5);
      L(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) -= w / space->mu(x);
      L(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) -= w / space->mu(y);
    }
  for (std::size_t x = 0; x < n; ++x)
    L(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) =
        -L.row(static_cast<Eigen::Index>(x)).sum();
  return validate_generator(std::move(L), space);
}

}  // namespace

static void BM_SpectralDecomposition(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    Generator g = make_generator(n);  // fresh: spectral cache must recompute
    state.ResumeTiming();
    benchmark::DoNotOptimize(g.eigenvalues());
  }
}
BENCHMARK(BM_SpectralDecomposition)->Arg(16)->Arg(64)->Arg(256);

static void BM_HeatApply(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Generator g = make_generator(n);
  g.eigenvalues();  // warm the cache
  Eigen::VectorXd f = Eigen::VectorXd::Random(static_cast<Eigen::Index>(n)).cwiseAbs();
  for (auto _ : state) benchmark::DoNotOptimize(g.heat_vec(0.7, f));
}
BENCHMARK(BM_HeatApply)->Arg(16)->Arg(64)->Arg(256);

static void BM_TensorHeatLazy(benchmark::State& state) {
  const int folds = static_cast<int>(state.range(0));
  std::vector<Generator> factors(static_cast<std::size_t>(folds),
                                 simple_generator(uniform_space(2)));
  TensorGenerator tensor(std::move(factors));
  std::vector<double> f(tensor.total_states(), 1.0);
  Rng rng(3);
  for (double& v : f) v = rng.uniform(0.1, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(tensor.heat(0.5, f));
}
BENCHMARK(BM_TensorHeatLazy)->Arg(8)->Arg(12)->Arg(16);

static void BM_DirichletForm(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Generator g = make_generator(n);
  Rng rng(5);
  std::vector<double> fv(n), gv(n);
  for (std::size_t i = 0; i < n; ++i) {
    fv[i] = rng.uniform(0.1, 2.0);
    gv[i] = rng.uniform(0.1, 2.0);
  }
  RealFunction f(g.space(), fv), h(g.space(), gv);
  for (auto _ : state) benchmark::DoNotOptimize(dirichlet_form(g, f, h));
}
BENCHMARK(BM_DirichletForm)->Arg(16)->Arg(64)->Arg(256);
