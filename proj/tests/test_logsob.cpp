#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "revhyp/logsob.hpp"

using namespace revhyp;

TEST_CASE("logsob evaluation reference values") {
  auto u2 = uniform_space(2);
  Generator simple = simple_generator(u2);

  // constant functions: both sides vanish for every p
  for (double p : {-1.0, 0.0, 0.5, 1.0, 2.0}) {
    LogSobEvaluation ev = logsob_evaluate(simple, p, RealFunction::constant(u2, 3.0));
    CHECK(std::abs(ev.entropy_side) <= 1e-12);
    CHECK(std::abs(ev.dirichlet_side) <= 1e-12);
    CHECK(!ev.ratio.has_value());
  }

  // p = 1, f = (2,1): Ent(f) and (1/4) E(f, log f) = Cov(f, log f)/4 = log(2)/16
  RealFunction f(u2, {2.0, 1.0});
  LogSobEvaluation ev = logsob_evaluate(simple, 1.0, f);
  CHECK(ev.entropy_side == doctest::Approx(0.084949518397699).epsilon(1e-12));
  CHECK(ev.dirichlet_side == doctest::Approx(std::log(2.0) / 16.0).epsilon(1e-12));

  CHECK_THROWS_AS(logsob_evaluate(simple, 1.0, RealFunction(u2, {1.0, -1.0})),
                  std::domain_error);
}

TEST_CASE("self-dual evaluation is invariant under conjugation") {
  Rng rng(19);
  for (auto [p, pc] : {std::pair{0.5, -1.0}, std::pair{3.0, 1.5}, std::pair{0.25, -1.0 / 3.0}}) {
    auto space = testutil::random_space(rng, 4);
    Generator g = testutil::random_reversible_generator(rng, space);
    RealFunction witness = testutil::random_positive(rng, space);
    LogSobEvaluation a = logsob_evaluate_selfdual(g, p, witness);
    LogSobEvaluation b = logsob_evaluate_selfdual(g, pc, witness);
    CHECK(a.entropy_side == doctest::Approx(b.entropy_side).epsilon(1e-12));
    CHECK(a.dirichlet_side == doctest::Approx(b.dirichlet_side).epsilon(1e-10));
  }
}

TEST_CASE("stroock-varopoulos comparison") {
  Rng rng(29);
  CHECK_THROWS_AS(sv_check(simple_generator(uniform_space(2)),
                           RealFunction::constant(uniform_space(2), 1.0), 0.5, 0.7),
                  std::domain_error);

  // constants give (0, 0, holds)
  auto u3 = uniform_space(3);
  SvCheck c = sv_check(simple_generator(u3), RealFunction::constant(u3, 2.0), 2.0, 0.5);
  CHECK(c.lhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.rhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(c.holds);

  // randomized instances, including the classical (q,p) = (0.5, 2) case
  int violations = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    auto space = testutil::random_space(rng, 2 + static_cast<std::size_t>(rng.below(4)));
    Generator g = testutil::random_reversible_generator(rng, space);
    RealFunction witness = testutil::random_positive(rng, space);
    double q = rep == 0 ? 0.5 : rng.uniform(0.3, 1.95);
    double p = rep == 0 ? 2.0 : rng.uniform(q + 0.02, 2.0);
    if (!sv_check(g, witness, p, q).holds) ++violations;
  }
  CHECK(violations == 0);

  // Corollary: E(log f, log f) <= -E(f, 1/f)
  for (int rep = 0; rep < 200; ++rep) {
    auto space = testutil::random_space(rng, 4);
    Generator g = testutil::random_reversible_generator(rng, space);
    RealFunction f = testutil::random_positive(rng, space);
    std::vector<double> lf(f.size()), invf(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      lf[i] = std::log(f[i]);
      invf[i] = 1.0 / f[i];
    }
    RealFunction logf(space, lf), inv(space, invf);
    CHECK(dirichlet_form(g, logf, logf) <= -dirichlet_form(g, f, inv) + 1e-10);
  }
}

TEST_CASE("two-point constant estimates") {
  EstimateBudget budget;
  Generator simple = simple_generator(uniform_space(2));

  ConstantEstimate c1 = estimate_constant(simple, 1.0, budget, 7);
  CHECK(c1.method == EstimateMethod::grid_2pt);
  CHECK(c1.c_hat == doctest::Approx(2.0).epsilon(0.02));

  ConstantEstimate c0 = estimate_constant(simple, 0.0, budget, 7);
  CHECK(c0.c_hat == doctest::Approx(2.0).epsilon(0.01));

  Generator biased = simple_generator(two_point_space(0.1));
  ConstantEstimate cb = estimate_constant(biased, 1.0, budget, 7);
  CHECK(cb.c_hat <= 2.5 * 1.02);  // paper: C <= 4/(1+2 sqrt(alpha(1-alpha))) = 2.5
  CHECK(cb.c_hat > 2.0 * 0.98);   // must at least reach the Poincare floor

  // witness reproduces c_hat
  REQUIRE(c1.witness.has_value());
  LogSobEvaluation at_witness = logsob_evaluate_selfdual(simple, 1.0, *c1.witness);
  CHECK(*at_witness.ratio == doctest::Approx(c1.c_hat).epsilon(1e-9));
}

TEST_CASE("poincare constant and consistency of the p=0 estimate") {
  CHECK(poincare_constant(simple_generator(uniform_space(4))) == doctest::Approx(1.0));
  auto u3 = uniform_space(3);
  CHECK(std::isinf(poincare_constant(validate_generator(Eigen::MatrixXd::Zero(3, 3), u3))));

  // product walk with rate 1/n: kappa = n (eigenvalue oracle on the matrix)
  for (int n : {2, 4}) {
    std::vector<Generator> factors(static_cast<std::size_t>(n),
                                   simple_generator(uniform_space(2)));
    std::vector<double> rates(static_cast<std::size_t>(n), 1.0 / n);
    Generator walk = TensorGenerator(factors, rates).materialize();
    CHECK(poincare_constant(walk) == doctest::Approx(n).epsilon(1e-9));
  }

  Rng rng(53);
  EstimateBudget budget;
  budget.restarts = 8;
  for (int rep = 0; rep < 5; ++rep) {
    Generator g = testutil::random_reversible_generator(rng, 4);
    double target = 2.0 * poincare_constant(g);
    ConstantEstimate est = estimate_constant(g, 0.0, budget, 101 + rep);
    CHECK(est.c_hat >= target * 0.97);
    CHECK(est.c_hat <= target * (1.0 + 1e-8));
  }

  ConstantEstimate unbounded =
      estimate_constant(validate_generator(Eigen::MatrixXd::Zero(3, 3), u3), 1.0, budget, 3);
  CHECK(unbounded.unbounded);
  CHECK(std::isinf(unbounded.c_hat));
}

TEST_CASE("estimate duality") {
  Rng rng(59);
  EstimateBudget budget;
  budget.restarts = 8;
  for (double p : {0.5, -1.0, 3.0}) {
    Generator g = testutil::random_reversible_generator(rng, 4);
    double pc = holder_conjugate(p);
    double a = estimate_constant(g, p, budget, 11).c_hat;
    double b = estimate_constant(g, pc, budget, 11).c_hat;
    CHECK(a == doctest::Approx(b).epsilon(0.05));
  }
}

TEST_CASE("simple-operator 1-logSob bound: Ent(f) <= E(f, log f)") {
  Rng rng(61);
  for (int rep = 0; rep < 10000; ++rep) {
    auto space = testutil::random_space(rng, 2 + static_cast<std::size_t>(rng.below(5)));
    Generator simple = simple_generator(space);
    RealFunction f = testutil::random_positive(rng, space);
    LogSobEvaluation ev = logsob_evaluate(simple, 1.0, f);
    CHECK(ev.entropy_side <= 4.0 * ev.dirichlet_side + 1e-10);
  }
}

TEST_CASE("tensorization of estimates") {
  EstimateBudget budget;
  budget.restarts = 12;
  Generator f1 = simple_generator(two_point_space(0.3));
  Generator f2 = simple_generator(two_point_space(0.5));
  for (double p : {0.5, 1.0}) {
    double c1 = estimate_constant(f1, p, budget, 5).c_hat;
    double c2 = estimate_constant(f2, p, budget, 5).c_hat;
    Generator tensor = TensorGenerator({f1, f2}).materialize();
    double ct = estimate_constant(tensor, p, budget, 5).c_hat;
    CHECK(ct <= std::max(c1, c2) * 1.05);
  }
}

TEST_CASE("monotonicity audit") {
  EstimateBudget budget;
  budget.restarts = 8;
  Generator simple = simple_generator(uniform_space(2));
  MonotonicityAudit audit =
      monotonicity_audit(simple, {0.0, 0.5, 1.0, 1.5, 2.0}, budget, 21, 1, 16);
  CHECK(audit.pointwise_ok);
  for (std::size_t i = 1; i < audit.estimates.size(); ++i)
    CHECK(audit.estimates[i - 1].c_hat <= audit.estimates[i].c_hat * 1.03);

  Generator tensor =
      TensorGenerator({simple_generator(uniform_space(2)), simple_generator(uniform_space(2))})
          .materialize();
  MonotonicityAudit audit2 =
      monotonicity_audit(tensor, {0.25, 0.75, 1.25, 2.0}, budget, 22, 1, 16);
  CHECK(audit2.pointwise_ok);
  for (std::size_t i = 1; i < audit2.estimates.size(); ++i)
    CHECK(audit2.estimates[i - 1].c_hat <= audit2.estimates[i].c_hat * 1.03);
}

TEST_CASE("reversing bound") {
  CHECK(reversing_bound(3.0, 1.7, 1.7) == doctest::Approx(3.0));
  CHECK(reversing_bound(3.0, 1.5, 2.0) == doctest::Approx(3.375).epsilon(1e-12));
  CHECK_THROWS_AS(reversing_bound(1.0, 0.9, 1.5), std::domain_error);
  CHECK_THROWS_AS(reversing_bound(1.0, 1.5, 2.5), std::domain_error);

  // certified value dominates the direct estimate at p
  Rng rng(67);
  EstimateBudget budget;
  budget.restarts = 8;
  for (int rep = 0; rep < 4; ++rep) {
    Generator g = testutil::random_reversible_generator(rng, 3);
    double q = 1.3, p = 1.9;
    double cq = estimate_constant(g, q, budget, 31 + rep).c_hat;
    double cp = estimate_constant(g, p, budget, 32 + rep).c_hat;
    CHECK(reversing_bound(cq, q, p) >= cp * (1.0 - 0.05));
  }
}
