#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "revhyp/social_choice.hpp"

using namespace revhyp;

TEST_CASE("influences on reference functions") {
  std::vector<double> fair(3, 0.5);
  CubeFunction dict = CubeFunction::dictator(3, fair, 0);
  CHECK(influence(dict, 0) == doctest::Approx(1.0));
  CHECK(influence(dict, 1) == doctest::Approx(0.0));
  CHECK(variance_influence(dict, 0) == doctest::Approx(1.0).epsilon(1e-12));

  // majority of three unbiased bits: every influence is 1/2
  std::vector<double> table(8);
  for (std::uint32_t mask = 0; mask < 8; ++mask) {
    int ones = __builtin_popcount(mask);
    table[mask] = ones >= 2 ? 1.0 : -1.0;
  }
  CubeFunction maj(3, fair, table);
  for (int i = 0; i < 3; ++i) CHECK(influence(maj, i) == doctest::Approx(0.5).epsilon(1e-12));

  CubeFunction cst = CubeFunction::constant(3, fair, 1.0);
  for (int i = 0; i < 3; ++i) CHECK(influence(cst, i) == doctest::Approx(0.0));

  // low-degree influence sums to the full tail at d = n
  CHECK(low_degree_influence(maj, 0, 3) == doctest::Approx(variance_influence(maj, 0)));
  CHECK(low_degree_influence(maj, 0, 1) <= variance_influence(maj, 0));
}

TEST_CASE("parseval and the influence sandwich on random functions") {
  Rng rng(3);
  for (double p : {0.1, 0.5, 0.9}) {
    for (int rep = 0; rep < 340; ++rep) {
      int n = 2 + static_cast<int>(rng.below(4));
      CubeFunction f = testutil::random_pm_function(rng, n, std::vector<double>(n, p));
      // Parseval: sum fhat^2 = E f^2 = 1 for +-1 tables
      double sum = 0.0;
      for (double c : f.fourier()) sum += c * c;
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
      // the sandwich is verified internally on every influence() call
      for (int i = 0; i < n; ++i) CHECK_NOTHROW(influence(f, i));
    }
  }
}

TEST_CASE("ranking distributions") {
  RankingDistribution uniform{{1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}};
  uniform.validate();
  auto law = uniform.triple_law();
  CHECK(law[0b111] == 0.0);  // cyclic cells carry no mass
  CHECK(law[0b000] == 0.0);
  CHECK(uniform.alpha() == doctest::Approx(1.0 / 6.0));
  CHECK(uniform.marginal_plus(0) == doctest::Approx(0.5));

  Rng rng(7);
  for (int rep = 0; rep < 300; ++rep) {
    RankingDistribution rand = testutil::random_law(rng);
    double alpha = rand.alpha();
    CHECK(alpha > 0.0);
    for (auto [c1, c2] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{2, 0}})
      CHECK(std::abs(rand.pair_correlation(c1, c2)) <= 1.0 - 4.0 * alpha + 1e-10);
  }
}

TEST_CASE("paradox probability via the correlation formula") {
  RankingDistribution uniform{{1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6, 1.0 / 6}};
  std::vector<double> bias(2, 0.5);

  // constant +1 outcome is the cyclic pattern (1,1,1)
  CubeFunction one = CubeFunction::constant(2, bias, 1.0);
  CHECK(paradox_probability(one, one, one, uniform) == doctest::Approx(1.0).epsilon(1e-12));

  // dictator triples are transitive by construction
  CubeFunction dict = CubeFunction::dictator(2, bias, 0);
  CHECK(paradox_probability(dict, dict, dict, uniform) == doctest::Approx(0.0).epsilon(1e-12));

  // random +-1 triples match the 36-profile brute-force count exactly
  Rng rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    RankingDistribution law = testutil::random_law(rng);
    double pab = law.marginal_plus(0), pbc = law.marginal_plus(1), pca = law.marginal_plus(2);
    CubeFunction f1 = testutil::random_pm_function(rng, 2, {pab, pab});
    CubeFunction f2 = testutil::random_pm_function(rng, 2, {pbc, pbc});
    CubeFunction f3 = testutil::random_pm_function(rng, 2, {pca, pca});
    double formula = paradox_probability(f1, f2, f3, law);
    double oracle = testutil::px_exhaustive(f1, f2, f3, law);
    CHECK(formula == doctest::Approx(oracle).epsilon(1e-12));
  }

  // Monte Carlo agrees within a few sigma
  CubeFunction f1 = testutil::random_pm_function(rng, 3, std::vector<double>(3, 0.5));
  CubeFunction f2 = testutil::random_pm_function(rng, 3, std::vector<double>(3, 0.5));
  CubeFunction f3 = testutil::random_pm_function(rng, 3, std::vector<double>(3, 0.5));
  double exact = paradox_probability(f1, f2, f3, uniform);
  double mc = paradox_probability_mc(f1, f2, f3, uniform, 200000, 5, 2);
  CHECK(std::abs(mc - exact) <= 4.0 * std::sqrt(0.25 / 200000.0));
}

TEST_CASE("pivotal intersection bound") {
  CHECK(*pivotal_intersection_bound(1.0, 0.5) == doctest::Approx(1.0));
  CHECK(*pivotal_intersection_bound(0.1, 0.75) == doctest::Approx(1e-3).epsilon(1e-10));
  CHECK(!pivotal_intersection_bound(0.1, 0.0).has_value());

  Rng rng(13);
  int violations = 0;
  for (int rep = 0; rep < 150; ++rep) {
    RankingDistribution law = testutil::random_law(rng);
    int n = 2 + static_cast<int>(rng.below(4));
    double pab = law.marginal_plus(0), pbc = law.marginal_plus(1);
    CubeFunction f_ab = testutil::random_pm_function(rng, n, std::vector<double>(n, pab));
    CubeFunction f_bc = testutil::random_pm_function(rng, n, std::vector<double>(n, pbc));
    int i = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    PivotalCheck check = pivotal_intersection_exact(f_ab, i, f_bc, j, law);
    if (!check.holds) ++violations;
    CHECK(check.eps == doctest::Approx(std::min(check.inf_i, check.inf_j)));
  }
  CHECK(violations == 0);
}

TEST_CASE("delta for epsilon evaluator") {
  // eps -> 1: the log term vanishes and delta -> 1
  DeltaForEpsilon near_one = delta_for_epsilon(1.0 - 1e-12, 0.5, 1.0);
  CHECK(near_one.delta == doctest::Approx(1.0).epsilon(1e-9));

  // monotone decreasing as eps shrinks
  CHECK(delta_for_epsilon(0.2, 0.5, 1.0).log_delta >
        delta_for_epsilon(0.1, 0.5, 1.0).log_delta);

  // alpha = 1/2, eps = 0.1, C = 1: independent arithmetic route
  DeltaForEpsilon d = delta_for_epsilon(0.1, 0.5, 1.0);
  long double expected = -1.0L;
  expected *= 128.0L;                      // alpha^{-7}
  expected *= 16.0L;                       // 2^{alpha^{-2}}
  long double lg = std::log(10.0L);        // log(1/eps)
  expected *= lg * lg;
  expected /= std::pow(0.1L, 4.0L);        // eps^{2 + 1/(2 alpha^2)} = eps^4
  CHECK(d.log_delta == doctest::Approx(static_cast<double>(expected)).epsilon(1e-12));
  CHECK(d.delta == 0.0);  // underflows; the log form is the usable output

  CHECK_THROWS_AS(delta_for_epsilon(0.0, 0.5, 1.0), std::domain_error);
  CHECK_THROWS_AS(delta_for_epsilon(0.5, 1.5, 1.0), std::domain_error);
}
