#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "revhyp/generator.hpp"
#include "revhyp/measure.hpp"
#include "revhyp/rng.hpp"
#include "revhyp/social_choice.hpp"

namespace testutil {

using namespace revhyp;

inline SpacePtr random_space(Rng& rng, std::size_t n) {
  std::vector<double> mu(n);
  double sum = 0.0;
  for (double& w : mu) sum += (w = rng.uniform(0.2, 1.0));
  for (double& w : mu) w /= sum;
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return make_space(std::move(labels), std::move(mu));
}

// Random reversible generator from symmetric conductances w_{xy} >= 0:
// L(x,y) = -w_{xy}/mu(x). Satisfies all four axioms by construction.
inline Generator random_reversible_generator(Rng& rng, SpacePtr space) {
  const std::size_t n = space->size();
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = x + 1; y < n; ++y) {
      double w = rng.uniform(0.05, 0.5);
      L(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)) -= w / space->mu(x);
      L(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(x)) -= w / space->mu(y);
    }
  for (std::size_t x = 0; x < n; ++x) {
    double row = 0.0;
    for (std::size_t y = 0; y < n; ++y)
      if (y != x) row += L(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    L(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(x)) = -row;
  }
  return validate_generator(std::move(L), std::move(space));
}

inline Generator random_reversible_generator(Rng& rng, std::size_t n) {
  return random_reversible_generator(rng, random_space(rng, n));
}

inline RealFunction random_positive(Rng& rng, const SpacePtr& space, double range = 1.5) {
  std::vector<double> v(space->size());
  for (double& x : v) x = std::exp(rng.uniform(-range, range));
  return RealFunction(space, std::move(v));
}

// Brute-force paradox probability: enumerates all 6^n ranking profiles and
// counts non-transitive outcomes (all three comparisons equal) by weight.
// Oracle for +-1 valued IIA triples; independent of the correlation formula.
inline double px_exhaustive(const CubeFunction& f_ab, const CubeFunction& f_bc,
                            const CubeFunction& f_ca, const RankingDistribution& law) {
  const int n = f_ab.n();
  // signs of (a>b, b>c, c>a) per ranking, kRankings order
  static constexpr int kSigns[6][3] = {{+1, +1, -1}, {+1, -1, -1}, {-1, +1, -1},
                                       {-1, +1, +1}, {+1, -1, +1}, {-1, -1, +1}};
  std::size_t profiles = 1;
  for (int i = 0; i < n; ++i) profiles *= 6;
  double paradox = 0.0;
  for (std::size_t code = 0; code < profiles; ++code) {
    std::size_t rest = code;
    double weight = 1.0;
    std::uint32_t m_ab = 0, m_bc = 0, m_ca = 0;
    for (int voter = 0; voter < n; ++voter) {
      int r = static_cast<int>(rest % 6);
      rest /= 6;
      weight *= law.probs[static_cast<std::size_t>(r)];
      if (kSigns[r][0] > 0) m_ab |= std::uint32_t{1} << voter;
      if (kSigns[r][1] > 0) m_bc |= std::uint32_t{1} << voter;
      if (kSigns[r][2] > 0) m_ca |= std::uint32_t{1} << voter;
    }
    double v1 = f_ab.value(m_ab), v2 = f_bc.value(m_bc), v3 = f_ca.value(m_ca);
    if (v1 == v2 && v2 == v3) paradox += weight;
  }
  return paradox;
}

inline RankingDistribution random_law(Rng& rng) {
  RankingDistribution law{};
  double sum = 0.0;
  for (double& p : law.probs) sum += (p = rng.uniform(0.05, 1.0));
  for (double& p : law.probs) p /= sum;
  return law;
}

inline CubeFunction random_pm_function(Rng& rng, int n, std::vector<double> bias) {
  std::vector<double> table(std::size_t{1} << n);
  for (double& v : table) v = rng.bernoulli(0.5) ? 1.0 : -1.0;
  return CubeFunction(n, std::move(bias), std::move(table));
}

}  // namespace testutil
