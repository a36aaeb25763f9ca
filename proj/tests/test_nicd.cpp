#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "revhyp/nicd.hpp"

using namespace revhyp;

TEST_CASE("dictator agreement reference value") {
  NicdConfig cfg{2, 1, 2, 0.5, 1000, 3};
  std::vector<Protocol> dictators(2, Protocol::dictator(2, 1, 0));
  AgreementResult exact = agreement_probability(cfg, dictators);
  CHECK(exact.exact);
  CHECK(exact.estimate == doctest::Approx(0.625).epsilon(1e-12));  // (1 + rho^2)/2
}

TEST_CASE("independent sources agree with probability m^{1-k}") {
  for (int m : {2, 3})
    for (int k : {2, 3}) {
      NicdConfig cfg{m, 2, k, 0.0, 40000, 11};
      std::vector<Protocol> protocols(static_cast<std::size_t>(k), Protocol::plurality(m, 2));
      AgreementResult exact = agreement_probability(cfg, protocols);
      double expected = std::pow(static_cast<double>(m), 1.0 - k);
      CHECK(exact.estimate == doctest::Approx(expected).epsilon(1e-12));
      AgreementResult mc = agreement_probability_mc(cfg, protocols, 2);
      CHECK(mc.ci->lo <= expected);
      CHECK(expected <= mc.ci->hi);
    }
}

TEST_CASE("plurality balance and equivariance") {
  for (int m : {2, 3})
    for (int n : {1, 3, 5, 8}) {
      Protocol plu = Protocol::plurality(m, n);
      CHECK(plu.balanced_exact());
    }

  // PLU(sigma o x) = sigma(PLU(x)) for all face permutations, m = 3, n = 5
  Protocol plu = Protocol::plurality(3, 5);
  std::array<std::array<std::uint8_t, 3>, 6> perms{{{0, 1, 2},
                                                    {0, 2, 1},
                                                    {1, 0, 2},
                                                    {1, 2, 0},
                                                    {2, 0, 1},
                                                    {2, 1, 0}}};
  std::vector<std::uint8_t> x(5), sx(5);
  for (int code = 0; code < 243; ++code) {
    int rest = code;
    for (int i = 0; i < 5; ++i) {
      x[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rest % 3);
      rest /= 3;
    }
    for (const auto& sigma : perms) {
      for (int i = 0; i < 5; ++i) sx[static_cast<std::size_t>(i)] = sigma[x[static_cast<std::size_t>(i)]];
      CHECK(plu.evaluate(sx) == sigma[static_cast<std::size_t>(plu.evaluate(x))]);
    }
  }
}

TEST_CASE("exact and Monte Carlo agreement coincide") {
  for (auto [m, n, k, rho] : {std::tuple{2, 3, 2, 0.5}, std::tuple{3, 2, 3, 0.3},
                              std::tuple{2, 4, 4, 0.8}}) {
    NicdConfig cfg{m, n, k, rho, 60000, 17};
    std::vector<Protocol> protocols(static_cast<std::size_t>(k), Protocol::plurality(m, n));
    AgreementResult exact = agreement_probability(cfg, protocols);
    AgreementResult mc = agreement_probability_mc(cfg, protocols, 2);
    CHECK(exact.exact);
    CHECK(mc.ci->lo <= exact.estimate);
    CHECK(exact.estimate <= mc.ci->hi);
  }
}

TEST_CASE("agreement is monotone in rho under paired seeds") {
  std::vector<Protocol> protocols(2, Protocol::plurality(2, 5));
  double prev = 0.0;
  for (double rho : {0.0, 0.3, 0.6, 0.9}) {
    NicdConfig cfg{2, 5, 2, rho, 1000, 23};
    double est = agreement_probability(cfg, protocols).estimate;  // exact path
    CHECK(est >= prev - 1e-12);
    prev = est;
  }
}

TEST_CASE("unbalanced protocols are rejected") {
  NicdConfig cfg{2, 2, 2, 0.5, 1000, 3};
  std::vector<std::uint8_t> skewed{0, 0, 0, 1};
  std::vector<Protocol> bad(2, Protocol::from_table(2, 2, skewed));
  CHECK_THROWS_AS(agreement_probability(cfg, bad), std::invalid_argument);
}

TEST_CASE("power bound sweep") {
  // f == 0
  PowerBoundCheck zero = power_bound_check(2, 3, std::vector<std::uint8_t>(8, 0), 0.5, {2, 4});
  for (const auto& row : zero.rows) CHECK(row.lhs == 0.0);

  // half cube via the first coordinate, m = 2, n = 6, rho = 0.25
  std::vector<std::uint8_t> half(64, 0);
  for (int x = 0; x < 64; ++x) half[static_cast<std::size_t>(x)] = x & 1;
  std::vector<int> ks{2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64};
  PowerBoundCheck check = power_bound_check(2, 6, half, 0.25, ks);
  CHECK(check.beta == doctest::Approx((1.0 - 1e-3) * 2.0).epsilon(1e-12));
  for (std::size_t i = 1; i < check.rows.size(); ++i)
    CHECK(check.rows[i].lhs < check.rows[i - 1].lhs);  // decreasing in k
  // k^beta * lhs stays bounded over the sweep
  double worst = 0.0;
  for (const auto& row : check.rows)
    worst = std::max(worst, std::pow(row.k, check.beta) * row.lhs);
  CHECK(worst <= 2.0 * check.calibration_c);
  CHECK(check.k_dominating >= 2);
  // the envelope dominates from k_dominating on
  for (const auto& row : check.rows)
    if (row.k >= check.k_dominating) CHECK(row.lhs <= row.envelope * (1.0 + 1e-12));

  // E f > 1/2 rejected
  CHECK_THROWS_AS(power_bound_check(2, 2, {1, 1, 1, 0}, 0.5, {2}), std::domain_error);

  // admissible exponent degenerates as rho -> 1
  CHECK(power_bound_exponent(0.999) < 0.01);
}

TEST_CASE("holder bound dominates the exact agreement") {
  for (auto [m, n, k, rho] : {std::tuple{2, 3, 2, 0.5}, std::tuple{2, 4, 3, 0.25},
                              std::tuple{3, 2, 2, 0.6}}) {
    NicdConfig cfg{m, n, k, rho, 1000, 29};
    std::vector<Protocol> protocols(static_cast<std::size_t>(k), Protocol::plurality(m, n));
    double exact = agreement_probability(cfg, protocols).estimate;
    CHECK(holder_upper_bound(cfg, protocols) >= exact - 1e-12);
    // mixed protocols as well
    if (n >= 2) {
      protocols[0] = Protocol::dictator(m, n, 1);
      double exact2 = agreement_probability(cfg, protocols).estimate;
      CHECK(holder_upper_bound(cfg, protocols) >= exact2 - 1e-12);
    }
  }
}

TEST_CASE("envelope shape") {
  CHECK(upper_bound_envelope(3, 0.5, 8.0) < upper_bound_envelope(3, 0.5, 4.0));
  CHECK(upper_bound_envelope(6, 0.5, 4.0) ==
        doctest::Approx(2.0 * upper_bound_envelope(3, 0.5, 4.0)).epsilon(1e-12));
}

TEST_CASE("plurality sweep decays with k") {
  std::vector<int> ks{2, 4, 8, 16};
  auto rows = plurality_lower_sweep(2, 0.5, ks, 9, 20000, 31, 2);
  REQUIRE(rows.size() == 4);
  // log-log slope negative
  double slope_num = 0.0, slope_den = 0.0;
  double mx = 0.0, my = 0.0;
  for (const auto& r : rows) {
    mx += std::log(r.k);
    my += std::log(r.estimate);
  }
  mx /= 4.0;
  my /= 4.0;
  for (const auto& r : rows) {
    slope_num += (std::log(r.k) - mx) * (std::log(r.estimate) - my);
    slope_den += (std::log(r.k) - mx) * (std::log(r.k) - mx);
  }
  CHECK(slope_num / slope_den < -0.2);
  // rho = 0 sanity: estimates near m^{1-k}
  auto rows0 = plurality_lower_sweep(2, 0.0, {2, 3}, 5, 40000, 37, 2);
  CHECK(std::abs(rows0[0].estimate - 0.5) <= 0.01);
  CHECK(std::abs(rows0[1].estimate - 0.25) <= 0.01);
}
