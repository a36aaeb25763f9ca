#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "revhyp/generator.hpp"
#include "revhyp/logsob.hpp"

using namespace revhyp;

namespace {

RealFunction abs_fn(const RealFunction& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = std::abs(f[i]);
  return RealFunction(f.space(), std::move(v));
}

}  // namespace

TEST_CASE("generator validation") {
  auto space = uniform_space(3);
  CHECK_NOTHROW(simple_generator(space));
  CHECK_NOTHROW(validate_generator(Eigen::MatrixXd::Zero(3, 3), space));  // degenerate

  // positive off-diagonal entry violates the maximum principle
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 3);
  bad(0, 1) = 0.5;
  bad(0, 0) = -0.5;
  bad(1, 0) = 0.5;
  bad(1, 1) = -0.5;
  try {
    validate_generator(bad, space);
    CHECK(false);
  } catch (const GeneratorValidationError& e) {
    bool saw_max_principle = false;
    for (const auto& v : e.report().violations)
      if (v.axiom == "maximum principle") saw_max_principle = true;
    CHECK(saw_max_principle);
  }

  Eigen::MatrixXd rowbad = Eigen::MatrixXd::Identity(3, 3);
  CHECK(!check_generator(rowbad, *space).ok());
}

TEST_CASE("simple generator spectrum and Dirichlet form") {
  auto space = uniform_space(2);
  Generator g = simple_generator(space);
  CHECK(g.eigenvalues()[0] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(g.eigenvalues()[1] == doctest::Approx(1.0).epsilon(1e-12));

  RealFunction constant = RealFunction::constant(space, 4.2);
  Eigen::VectorXd lc = g.apply(Eigen::Vector2d(4.2, 4.2));
  CHECK(lc.cwiseAbs().maxCoeff() <= 1e-12);

  // E(f,g) = Cov(f,g) for the simple generator
  Rng rng(5);
  for (int rep = 0; rep < 30; ++rep) {
    auto sp = testutil::random_space(rng, 5);
    Generator simple = simple_generator(sp);
    RealFunction f = testutil::random_positive(rng, sp);
    RealFunction h = testutil::random_positive(rng, sp);
    CHECK(dirichlet_form(simple, f, h) == doctest::Approx(covariance(f, h)).epsilon(1e-10));
  }
}

TEST_CASE("heat operator") {
  Rng rng(13);
  auto space = testutil::random_space(rng, 4);
  Generator g = testutil::random_reversible_generator(rng, space);
  RealFunction f = testutil::random_positive(rng, space);

  RealFunction t0 = heat_operator(g, 0.0, f);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(t0[i] == doctest::Approx(f[i]).epsilon(1e-12));

  RealFunction t1 = heat_operator(g, 0.7, f);
  CHECK(expectation(t1) == doctest::Approx(expectation(f)).epsilon(1e-9));
  for (double v : t1.values()) CHECK(v > 0.0);

  // semigroup law
  RealFunction t2a = heat_operator(g, 0.5, t1);
  RealFunction t2b = heat_operator(g, 1.2, f);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(t2a[i] == doctest::Approx(t2b[i]).epsilon(1e-8));

  // ergodic limit
  RealFunction tinf = heat_operator(g, 50.0, f);
  for (double v : tinf.values()) CHECK(v == doctest::Approx(expectation(f)).epsilon(1e-9));

  CHECK_THROWS_AS(heat_operator(g, -0.1, f), std::domain_error);

  // closed form for the simple semigroup: T_t f = Ef + e^{-t}(f - Ef)
  Generator simple = simple_generator(space);
  RealFunction ts = heat_operator(simple, 0.9, f);
  double ef = expectation(f);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(ts[i] == doctest::Approx(ef + std::exp(-0.9) * (f[i] - ef)).epsilon(1e-12));
}

TEST_CASE("heat operator contraction and order preservation") {
  Rng rng(17);
  for (int rep = 0; rep < 10; ++rep) {
    auto space = testutil::random_space(rng, 5);
    Generator g = testutil::random_reversible_generator(rng, space);
    std::vector<double> raw(5);
    for (double& v : raw) v = rng.uniform(-2.0, 2.0);
    RealFunction f(space, raw);
    double t = rng.uniform(0.05, 3.0);
    RealFunction tf = heat_operator(g, t, f);
    for (double p : {1.0, 2.0, 4.0}) CHECK(p_norm(tf, p) <= p_norm(f, p) * (1.0 + 1e-12));

    // order preservation
    RealFunction h = testutil::random_positive(rng, space, 0.5);
    std::vector<double> above(raw);
    for (std::size_t i = 0; i < above.size(); ++i) above[i] += h[i];
    RealFunction tg = heat_operator(g, t, RealFunction(space, above));
    for (std::size_t i = 0; i < above.size(); ++i) CHECK(tg[i] >= tf[i] - 1e-12);

    // reverse contraction: E Phi(T_t f) >= E Phi(f) for concave Phi
    RealFunction pos = testutil::random_positive(rng, space);
    RealFunction tpos = heat_operator(g, t, pos);
    auto log_mean = [](const RealFunction& x) {
      std::vector<double> v(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) v[i] = std::log(x[i]);
      return expectation(RealFunction(x.space(), std::move(v)));
    };
    CHECK(log_mean(tpos) >= log_mean(pos) - 1e-12);
    auto neg_square_mean = [](const RealFunction& x) {
      std::vector<double> v(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) v[i] = -x[i] * x[i];
      return expectation(RealFunction(x.space(), std::move(v)));
    };
    CHECK(neg_square_mean(tpos) >= neg_square_mean(pos) - 1e-12);
    for (double q : {-1.0, 0.0, 0.5})
      CHECK(p_norm(tpos, q) >= p_norm(pos, q) * (1.0 - 1e-12));
  }
}

TEST_CASE("dirichlet form identities") {
  Rng rng(23);
  auto space = testutil::random_space(rng, 5);
  Generator g = testutil::random_reversible_generator(rng, space);
  RealFunction f = testutil::random_positive(rng, space);
  RealFunction ones = RealFunction::constant(space, 1.0);

  CHECK(dirichlet_form(g, f, ones) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dirichlet_form(g, f, f) >= -1e-12);

  RealFunction h = testutil::random_positive(rng, space);
  CHECK(dirichlet_form(g, f, h) == doctest::Approx(dirichlet_form(g, h, f)).epsilon(1e-10));
  CHECK(dirichlet_form(g, f, h) ==
        doctest::Approx(dirichlet_form_pairsum(g, f, h)).epsilon(1e-9));

  // E(|f|,|f|) <= E(f,f) on sign-mixed functions
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> raw(5);
    for (double& v : raw) v = rng.uniform(-2.0, 2.0);
    RealFunction mixed(space, raw);
    CHECK(dirichlet_form(g, abs_fn(mixed), abs_fn(mixed)) <=
          dirichlet_form(g, mixed, mixed) + 1e-10);
  }

  // two-point simple generator: E(f,f) = Var(f)
  auto u2 = uniform_space(2);
  Generator s2 = simple_generator(u2);
  RealFunction pm(u2, {1.0, -1.0});
  CHECK(dirichlet_form(s2, pm, pm) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("spectral gap") {
  auto space = uniform_space(3);
  CHECK(spectral_gap(simple_generator(space)).gap == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(!spectral_gap(simple_generator(space)).reducible);

  SpectralGapResult zero = spectral_gap(validate_generator(Eigen::MatrixXd::Zero(3, 3), space));
  CHECK(zero.gap == 0.0);
  CHECK(zero.reducible);

  // unscaled tensor of two simple generators: eigenvalue additivity oracle
  Generator factor = simple_generator(uniform_space(2));
  TensorGenerator tensor({factor, factor});
  Generator mat = tensor.materialize();
  CHECK(spectral_gap(mat).gap == doctest::Approx(1.0).epsilon(1e-10));
  // eigenvalues must be all sums {0,1}+{0,1}
  std::vector<double> expected{0.0, 1.0, 1.0, 2.0};
  for (int i = 0; i < 4; ++i)
    CHECK(mat.eigenvalues()[i] == doctest::Approx(expected[static_cast<std::size_t>(i)])
                                      .epsilon(1e-10));
}

TEST_CASE("tensor generator identity") {
  Rng rng(31);
  std::vector<Generator> factors;
  for (int i = 0; i < 3; ++i)
    factors.push_back(testutil::random_reversible_generator(rng, 3));
  TensorGenerator tensor(factors, {0.5, 1.0, 2.0});
  Generator mat = tensor.materialize();
  CHECK(mat.size() == 27);

  RealFunction f = testutil::random_positive(rng, tensor.space());
  RealFunction lazy = tensor.heat(0.4, f);
  RealFunction dense = heat_operator(mat, 0.4, f);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(lazy[i] == doctest::Approx(dense[i]).epsilon(1e-10));
}

TEST_CASE("log-convexity of the normalized Dirichlet map") {
  Rng rng(37);
  for (int rep = 0; rep < 10; ++rep) {
    auto space = testutil::random_space(rng, 4);
    Generator g = testutil::random_reversible_generator(rng, space);
    RealFunction w = testutil::random_positive(rng, space);
    auto value = [&](double u) {
      std::vector<double> a(w.size()), b(w.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        a[i] = std::pow(w[i], u);
        b[i] = std::pow(w[i], 1.0 - u);
      }
      return dirichlet_form(g, RealFunction(space, std::move(a)),
                            RealFunction(space, std::move(b))) /
             (u * (1.0 - u));
    };
    for (double u = 0.1; u <= 0.7001; u += 0.1) {
      double v1 = value(u), v2 = value(u + 0.2), vm = value(u + 0.1);
      CHECK(vm * vm <= v1 * v2 * (1.0 + 1e-9) + 1e-300);  // midpoint log-convexity
    }
    for (double u = 0.1; u <= 0.9001; u += 0.1)
      CHECK(value(u) == doctest::Approx(value(1.0 - u)).epsilon(1e-9));
  }
}

TEST_CASE("markov kernels: alpha and decomposition") {
  auto space = uniform_space(2);

  // K = E_mu: jump straight to stationarity
  Eigen::MatrixXd stationary(2, 2);
  stationary << 0.5, 0.5, 0.5, 0.5;
  KernelAlpha a = kernel_alpha(MarkovKernel(space, stationary));
  CHECK(a.alpha == doctest::Approx(1.0));
  CHECK(std::isinf(a.alpha_star));

  // the paper's two-state kernel with alpha = 0
  Eigen::MatrixXd k0(2, 2);
  k0 << 0.0, 1.0, 0.5, 0.5;
  MarkovKernel paper_kernel(space, k0);
  CHECK(kernel_alpha(paper_kernel).alpha == doctest::Approx(0.0));
  CHECK(paper_kernel.nu[0] == doctest::Approx(0.25));
  CHECK_THROWS_AS(kernel_decompose(paper_kernel), std::domain_error);

  CHECK(kernel_alpha(MarkovKernel(space, Eigen::MatrixXd::Identity(2, 2))).alpha ==
        doctest::Approx(0.0));

  // K = T_s for the simple semigroup: S = T_{s - alpha*}
  Rng rng3(41);
  auto space3 = testutil::random_space(rng3, 3);
  Generator simple = simple_generator(space3);
  double s = 0.8;
  Eigen::MatrixXd Ts = Eigen::MatrixXd::Zero(3, 3);
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y)
      Ts(x, y) = (x == y ? std::exp(-s) : 0.0) +
                 (1.0 - std::exp(-s)) * space3->mu(static_cast<std::size_t>(y));
  MarkovKernel kernel(space3, Ts);
  KernelAlpha ka = kernel_alpha(kernel);
  CHECK(ka.alpha_star == doctest::Approx(s).epsilon(1e-12));
  KernelDecomposition dec = kernel_decompose(kernel);
  CHECK((dec.S.K - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-10);

  // random kernels: round-trip T_{alpha*} S = K and mu S = nu
  Rng rng(43);
  for (int rep = 0; rep < 25; ++rep) {
    auto sp = testutil::random_space(rng, 3);
    Eigen::MatrixXd K(3, 3);
    for (int x = 0; x < 3; ++x) {
      double row = 0.0;
      for (int y = 0; y < 3; ++y) row += (K(x, y) = rng.uniform(0.05, 1.0));
      for (int y = 0; y < 3; ++y) K(x, y) /= row;
    }
    MarkovKernel mk(sp, K);
    if (kernel_alpha(mk).alpha <= 0.0) continue;
    KernelDecomposition dec2 = kernel_decompose(mk);
    double astar = dec2.alpha_star;
    Eigen::MatrixXd Tback = Eigen::MatrixXd::Zero(3, 3);
    for (int x = 0; x < 3; ++x)
      for (int y = 0; y < 3; ++y)
        Tback(x, y) = (x == y ? std::exp(-astar) : 0.0) +
                      (1.0 - std::exp(-astar)) * sp->mu(static_cast<std::size_t>(y));
    CHECK((Tback * dec2.S.K - K).cwiseAbs().maxCoeff() <= 1e-10);
    Eigen::VectorXd mu = Eigen::Map<const Eigen::VectorXd>(sp->mu().data(), 3);
    CHECK((dec2.S.K.transpose() * mu - mk.nu).cwiseAbs().maxCoeff() <= 1e-10);
  }
}
