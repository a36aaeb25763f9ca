#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "revhyp/mixing.hpp"

using namespace revhyp;

TEST_CASE("two-set bound formula") {
  // e^{-2t/C} = 1/2, e^{-4t/C} = 1/4 at C = 4, t = 2 log 2
  CHECK(two_set_bound(4.0, 1.0, 1.0, 2.0 * std::log(2.0)) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-13));
  CHECK(two_set_bound(4.0, 1.0, 1.0, 0.0) == 0.0);

  // t -> infinity: pi(A) pi(B)
  double a = set_measure_parameter(0.3), b = set_measure_parameter(0.2);
  CHECK(two_set_bound(4.0, a, b, 1e4) == doctest::Approx(0.06).epsilon(1e-10));

  // a = 0: exp(-b^2 / (2 (1 - e^{-4t/C})))
  double t = 0.7, C = 3.0;
  CHECK(two_set_bound(C, 0.0, b, t) ==
        doctest::Approx(std::exp(-b * b / (2.0 * (1.0 - std::exp(-4.0 * t / C)))))
            .epsilon(1e-13));

  // monotone in t, decreasing in a and b
  double prev = 0.0;
  for (double tt : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    double v = two_set_bound(4.0, 1.0, 1.2, tt);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK(two_set_bound(4.0, 1.5, 1.0, 1.0) <= two_set_bound(4.0, 1.0, 1.0, 1.0));
  CHECK(two_set_bound(4.0, 1.0, 1.5, 1.0) <= two_set_bound(4.0, 1.0, 1.0, 1.0));
}

TEST_CASE("classical comparison bounds") {
  ClassicalBounds zeroed = classical_bounds(1.0, 0.5, 0.4, 0.3, 1.0);
  CHECK(zeroed.mixing_time == 0.0);  // eps >= pi(B)
  // small sets: expander term clamps at zero
  CHECK(classical_bounds(1.0, 0.0, 1e-4, 1e-4, 1.0).expander == 0.0);
  // t -> infinity: expander -> pi(A) pi(B)
  CHECK(classical_bounds(1.0, 0.0, 0.4, 0.3, 1e4).expander ==
        doctest::Approx(0.12).epsilon(1e-10));
}

TEST_CASE("product improved bound") {
  // tau = 2 log 2: exp(-[(7/4)*2 + 1] / 3) = e^{-1.5}
  CHECK(product_improved_bound(2.0 * std::log(2.0), 1.0, 1.0) ==
        doctest::Approx(std::exp(-1.5)).epsilon(1e-13));
  CHECK(product_improved_bound(1e4, 1.0, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));

  // dominates the C = 4 two-set bound at matching times on a grid
  for (double aa = 0.0; aa <= 2.0; aa += 0.5)
    for (double bb = 0.0; bb <= 2.0; bb += 0.5)
      for (double tau = 0.2; tau <= 4.0; tau += 0.2) {
        double coarse = two_set_bound(4.0, aa, bb, tau);  // e^{-2t/C} = e^{-tau/2}
        CHECK(product_improved_bound(tau, aa, bb) >= coarse - 1e-12);
      }
}

TEST_CASE("exact joint probabilities") {
  Rng rng(5);
  auto space = testutil::random_space(rng, 6);
  Generator g = testutil::random_reversible_generator(rng, space);
  std::vector<std::size_t> A{0, 2, 3}, B{1, 2};

  CHECK(exact_joint(g, A, A, 0.0) == doctest::Approx(set_measure(*space, A)).epsilon(1e-12));
  CHECK(exact_joint(g, std::vector<std::size_t>{0}, std::vector<std::size_t>{1}, 0.0) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(exact_joint(g, A, B, 0.8) == doctest::Approx(exact_joint(g, B, A, 0.8)).epsilon(1e-11));
  CHECK(exact_joint(g, A, B, 1e3) ==
        doctest::Approx(set_measure(*space, A) * set_measure(*space, B)).epsilon(1e-9));

  // tensor route agrees with the materialized generator
  Generator factor = simple_generator(two_point_space(0.35));
  TensorGenerator tensor({factor, factor, factor});
  Generator dense = tensor.materialize();
  std::vector<std::size_t> A2{0, 3, 5}, B2{1, 3, 6, 7};
  CHECK(exact_joint(tensor, A2, B2, 0.6) ==
        doctest::Approx(exact_joint(dense, A2, B2, 0.6)).epsilon(1e-11));

  // Theorem 1.9 with C = 4 on a small hypercube
  std::vector<Generator> factors(6, simple_generator(uniform_space(2)));
  TensorGenerator cube(factors);
  Rng rng2(9);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<std::size_t> A3, B3;
    for (std::size_t s = 0; s < 64; ++s) {
      if (rng2.bernoulli(0.4)) A3.push_back(s);
      if (rng2.bernoulli(0.4)) B3.push_back(s);
    }
    if (A3.empty() || B3.empty()) continue;
    double t = rng2.uniform(0.05, 4.0);
    double piA = set_measure(*cube.space(), A3), piB = set_measure(*cube.space(), B3);
    double bound =
        two_set_bound(4.0, set_measure_parameter(piA), set_measure_parameter(piB), t);
    CHECK(exact_joint(cube, A3, B3, t) >= bound - 1e-12);
  }
}

TEST_CASE("correlated set bounds") {
  CHECK(correlated_set_bound_rho(0.0, 0.3) == doctest::Approx(0.09).epsilon(1e-13));
  CHECK(correlated_set_bound_rho(0.25, 0.3) == doctest::Approx(0.027).epsilon(1e-13));
  CHECK(rho_set_exponent(0.25) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(!correlated_set_bound_kernel(0.0, 0.3).has_value());
  CHECK(*correlated_set_bound_kernel(0.75, 0.3) ==
        doctest::Approx(std::pow(0.3, 3.0)).epsilon(1e-12));

  // improved exponent scales as 2/(1-rho) + kappa (1-rho)
  CHECK(correlated_set_bound_improved(0.5, 0.3, 1.0) ==
        doctest::Approx(std::pow(0.3, 4.5)).epsilon(1e-12));

  // exponent sandwich of Remark 7.5
  Rng rng(13);
  for (int rep = 0; rep < 1000; ++rep) {
    double rho = rng.uniform01() * 0.999;
    double e = rho_set_exponent(rho);
    CHECK(e - 0.5 <= 2.0 / (1.0 - rho) + 1e-12);
    CHECK(2.0 / (1.0 - rho) <= e + 1e-12);
  }
}

TEST_CASE("correlated sampler statistics") {
  CorrelatedProductInstance inst;
  inst.factor = two_point_space(0.35);
  inst.n = 6;
  inst.rho = 0.4;
  CorrelatedSampler sampler(inst, 21);

  long equal = 0, total = 0, x_ones = 0, y_ones = 0;
  const long draws = 20000;
  for (long i = 0; i < draws; ++i) {
    auto [x, y] = sampler.next();
    for (int c = 0; c < inst.n; ++c) {
      ++total;
      if (x[static_cast<std::size_t>(c)] == y[static_cast<std::size_t>(c)]) ++equal;
      x_ones += x[static_cast<std::size_t>(c)];
      y_ones += y[static_cast<std::size_t>(c)];
    }
  }
  double collision = 0.35 * 0.35 + 0.65 * 0.65;
  double expect_equal = 0.4 + 0.6 * collision;
  double sd = std::sqrt(expect_equal * (1.0 - expect_equal) / static_cast<double>(total));
  CHECK(std::abs(static_cast<double>(equal) / total - expect_equal) <= 3.0 * sd);

  // marginals of both coordinates follow mu
  double sd_marginal = std::sqrt(0.65 * 0.35 / static_cast<double>(total));
  CHECK(std::abs(static_cast<double>(x_ones) / total - 0.65) <= 3.0 * sd_marginal);
  CHECK(std::abs(static_cast<double>(y_ones) / total - 0.65) <= 3.0 * sd_marginal);
}

TEST_CASE("exact pair probabilities and the kernel counterexample") {
  // rho coupling, exhaustive small check against the Lemma 7.4 bound
  CorrelatedProductInstance inst;
  inst.factor = uniform_space(2);
  inst.n = 3;
  inst.rho = 0.25;
  double expnt = rho_set_exponent(0.25);
  for (std::size_t amask = 1; amask < 256; ++amask)
    for (std::size_t bmask = 1; bmask < 256; ++bmask) {
      std::vector<std::size_t> A, B;
      for (std::size_t s = 0; s < 8; ++s) {
        if (amask >> s & 1) A.push_back(s);
        if (bmask >> s & 1) B.push_back(s);
      }
      double eps = std::min(A.size(), B.size()) / 8.0;
      CHECK(exact_pair_probability(inst, A, B) >= std::pow(eps, expnt) - 1e-12);
    }

  // independence at rho = 0
  inst.rho = 0.0;
  std::vector<std::size_t> A{0, 1, 5}, B{2, 5, 7};
  CHECK(exact_pair_probability(inst, A, B) ==
        doctest::Approx((3.0 / 8.0) * (3.0 / 8.0)).epsilon(1e-12));

  // the paper's alpha = 0 kernel: P{x_1 = 0, y_1 = 0} is exactly zero
  Eigen::MatrixXd K(2, 2);
  K << 0.0, 1.0, 0.5, 0.5;
  CorrelatedProductInstance ker;
  ker.factor = uniform_space(2);
  ker.n = 1;
  ker.kernel = MarkovKernel(uniform_space(2), K);
  CHECK(exact_pair_probability(ker, {0}, {0}) == 0.0);
  CHECK(ker.y_marginal()[0] == doctest::Approx(0.25));
}

TEST_CASE("wilson interval") {
  WilsonInterval ci = wilson99(50, 100);
  CHECK(ci.estimate == doctest::Approx(0.5));
  CHECK(ci.lo < 0.5);
  CHECK(ci.hi > 0.5);
  CHECK(ci.hi - ci.lo < 0.3);
  WilsonInterval zero = wilson99(0, 100);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi > 0.0);
}
