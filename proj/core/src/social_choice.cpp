#include "revhyp/social_choice.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "revhyp/parallel.hpp"
#include "revhyp/rng.hpp"

namespace revhyp {

namespace {

constexpr double kTableTol = 1e-12;

void require_coord(const CubeFunction& f, int i) {
  if (i < 0 || i >= f.n()) throw std::invalid_argument("coordinate out of range");
}

}  // namespace

CubeFunction::CubeFunction(int n, std::vector<double> bias, std::vector<double> table)
    : n_(n), bias_(std::move(bias)), table_(std::move(table)) {
  if (n_ < 1 || n_ > kMaxCoordinates)
    throw std::invalid_argument("cube functions support 1 <= n <= 20 coordinates");
  if (bias_.size() == 1) bias_.assign(static_cast<std::size_t>(n_), bias_[0]);
  if (bias_.size() != static_cast<std::size_t>(n_))
    throw std::invalid_argument("one bias per coordinate expected");
  for (double p : bias_)
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("biases must lie in (0,1)");
  if (table_.size() != (std::size_t{1} << n_))
    throw std::invalid_argument("truth table must have 2^n entries");
  for (double v : table_)
    if (!(v >= -1.0 - kTableTol && v <= 1.0 + kTableTol))
      throw std::invalid_argument("table values must lie in [-1,1]");
}

CubeFunction CubeFunction::dictator(int n, std::vector<double> bias, int coord) {
  std::vector<double> table(std::size_t{1} << n);
  for (std::size_t mask = 0; mask < table.size(); ++mask)
    table[mask] = (mask >> coord) & 1 ? 1.0 : -1.0;
  return CubeFunction(n, std::move(bias), std::move(table));
}

CubeFunction CubeFunction::constant(int n, std::vector<double> bias, double value) {
  return CubeFunction(n, std::move(bias),
                      std::vector<double>(std::size_t{1} << n, value));
}

bool CubeFunction::plus_minus_one() const {
  for (double v : table_)
    if (std::abs(std::abs(v) - 1.0) > kTableTol) return false;
  return true;
}

const std::vector<double>& CubeFunction::fourier() const {
  if (!fourier_.empty()) return fourier_;
  std::vector<double> coeff = table_;
  const std::size_t size = coeff.size();
  for (int i = 0; i < n_; ++i) {
    const double p = bias_[static_cast<std::size_t>(i)];
    const double s = std::sqrt(p * (1.0 - p));
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t mask = 0; mask < size; ++mask) {
      if (mask & bit) continue;
      double lo = coeff[mask];        // x_i = -1 slot
      double hi = coeff[mask | bit];  // x_i = +1 slot
      coeff[mask] = (1.0 - p) * lo + p * hi;
      coeff[mask | bit] = s * (hi - lo);
    }
  }
  fourier_ = std::move(coeff);
  return fourier_;
}

double CubeFunction::point_weight(std::uint32_t mask) const {
  double w = 1.0;
  for (int i = 0; i < n_; ++i)
    w *= (mask >> i) & 1 ? bias_[static_cast<std::size_t>(i)]
                         : 1.0 - bias_[static_cast<std::size_t>(i)];
  return w;
}

double influence(const CubeFunction& f, int i) {
  require_coord(f, i);
  const std::size_t bit = std::size_t{1} << i;
  const std::size_t size = f.table().size();
  double inf = 0.0;
  for (std::size_t mask = 0; mask < size; ++mask) {
    if (mask & bit) continue;
    if (std::abs(f.value(static_cast<std::uint32_t>(mask)) -
                 f.value(static_cast<std::uint32_t>(mask | bit))) > kTableTol) {
      // weight of the other coordinates' assignment
      double w = f.point_weight(static_cast<std::uint32_t>(mask)) /
                 (1.0 - f.bias(i));
      inf += w;
    }
  }
  if (f.plus_minus_one()) {
    double ii = variance_influence(f, i);
    double cap = ii / (4.0 * f.bias(i) * (1.0 - f.bias(i)));
    if (inf < ii - 1e-9 || inf > cap + 1e-9)
      throw std::logic_error("influence sandwich violated; inconsistent internal state");
  }
  return inf;
}

double variance_influence(const CubeFunction& f, int i) {
  require_coord(f, i);
  const auto& coeff = f.fourier();
  const std::size_t bit = std::size_t{1} << i;
  double sum = 0.0;
  for (std::size_t S = 0; S < coeff.size(); ++S)
    if (S & bit) sum += coeff[S] * coeff[S];
  return sum;
}

double low_degree_influence(const CubeFunction& f, int i, int d) {
  require_coord(f, i);
  const auto& coeff = f.fourier();
  const std::size_t bit = std::size_t{1} << i;
  double sum = 0.0;
  for (std::size_t S = 0; S < coeff.size(); ++S)
    if ((S & bit) && std::popcount(S) <= d) sum += coeff[S] * coeff[S];
  return sum;
}

const std::array<const char*, 6> RankingDistribution::kRankings = {
    "abc", "acb", "bac", "bca", "cab", "cba"};

void RankingDistribution::validate() const {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p > 0.0)) throw std::invalid_argument("ranking probabilities must be positive");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("ranking probabilities must sum to 1");
}

namespace {

// Per ranking: the signs of (a>b, b>c, c>a), in kRankings order.
constexpr int kSigns[6][3] = {
    {+1, +1, -1},  // abc
    {+1, -1, -1},  // acb
    {-1, +1, -1},  // bac
    {-1, +1, +1},  // bca
    {+1, -1, +1},  // cab
    {-1, -1, +1},  // cba
};

int cell_of(int s_ab, int s_bc, int s_ca) {
  return (s_ab > 0 ? 1 : 0) | (s_bc > 0 ? 2 : 0) | (s_ca > 0 ? 4 : 0);
}

}  // namespace

std::array<double, 8> RankingDistribution::triple_law() const {
  validate();
  std::array<double, 8> law{};
  for (int r = 0; r < 6; ++r)
    law[static_cast<std::size_t>(cell_of(kSigns[r][0], kSigns[r][1], kSigns[r][2]))] +=
        probs[static_cast<std::size_t>(r)];
  return law;
}

double RankingDistribution::alpha() const {
  auto law = triple_law();
  double a = 1.0;
  for (double cell : law)
    if (cell > 0.0) a = std::min(a, cell);
  return a;
}

double RankingDistribution::marginal_plus(int comparison) const {
  double m = 0.0;
  for (int r = 0; r < 6; ++r)
    if (kSigns[r][comparison] > 0) m += probs[static_cast<std::size_t>(r)];
  return m;
}

Eigen::Matrix2d RankingDistribution::pair_law(int c1, int c2) const {
  Eigen::Matrix2d M = Eigen::Matrix2d::Zero();
  for (int r = 0; r < 6; ++r) {
    int u = kSigns[r][c1] > 0 ? 1 : 0;
    int v = kSigns[r][c2] > 0 ? 1 : 0;
    M(u, v) += probs[static_cast<std::size_t>(r)];
  }
  return M;
}

double RankingDistribution::pair_correlation(int c1, int c2) const {
  Eigen::Matrix2d M = pair_law(c1, c2);
  double px = M(1, 0) + M(1, 1), py = M(0, 1) + M(1, 1);
  double exy = M(1, 1) - M(1, 0) - M(0, 1) + M(0, 0);
  double ex = 2.0 * px - 1.0, ey = 2.0 * py - 1.0;
  double vx = 1.0 - ex * ex, vy = 1.0 - ey * ey;
  return (exy - ex * ey) / std::sqrt(vx * vy);
}

double correlated_pair_expectation(const CubeFunction& f, const CubeFunction& g,
                                   const Eigen::Matrix2d& joint) {
  if (f.n() != g.n()) throw std::invalid_argument("functions must share n");
  const int n = f.n();
  double mu0 = joint(0, 0) + joint(0, 1);  // P(X = -1)
  double mu1 = joint(1, 0) + joint(1, 1);
  if (!(mu0 > 0.0 && mu1 > 0.0))
    throw std::invalid_argument("pair law needs positive X-marginals");
  // y | x kernel rows
  const double k[2][2] = {{joint(0, 0) / mu0, joint(0, 1) / mu0},
                          {joint(1, 0) / mu1, joint(1, 1) / mu1}};
  std::vector<double> cond = g.table();  // E[g(Y) | X restricted coordinatewise]
  const std::size_t size = cond.size();
  for (int i = 0; i < n; ++i) {
    const std::size_t bit = std::size_t{1} << i;
    for (std::size_t mask = 0; mask < size; ++mask) {
      if (mask & bit) continue;
      double lo = cond[mask], hi = cond[mask | bit];
      cond[mask] = k[0][0] * lo + k[0][1] * hi;
      cond[mask | bit] = k[1][0] * lo + k[1][1] * hi;
    }
  }
  double sum = 0.0;
  for (std::size_t mask = 0; mask < size; ++mask) {
    double w = 1.0;
    for (int i = 0; i < n; ++i) w *= (mask >> i) & 1 ? mu1 : mu0;
    sum += w * f.value(static_cast<std::uint32_t>(mask)) * cond[mask];
  }
  return sum;
}

double paradox_probability(const CubeFunction& f_ab, const CubeFunction& f_bc,
                           const CubeFunction& f_ca, const RankingDistribution& law) {
  double e12 = correlated_pair_expectation(f_ab, f_bc, law.pair_law(0, 1));
  double e23 = correlated_pair_expectation(f_bc, f_ca, law.pair_law(1, 2));
  double e31 = correlated_pair_expectation(f_ca, f_ab, law.pair_law(2, 0));
  return 0.25 * (1.0 + e12 + e23 + e31);
}

double paradox_probability_mc(const CubeFunction& f_ab, const CubeFunction& f_bc,
                              const CubeFunction& f_ca, const RankingDistribution& law,
                              long trials, std::uint64_t seed, int jobs) {
  law.validate();
  const int n = f_ab.n();
  if (f_bc.n() != n || f_ca.n() != n) throw std::invalid_argument("functions must share n");
  std::array<double, 6> cdf{};
  double acc = 0.0;
  for (int r = 0; r < 6; ++r) cdf[static_cast<std::size_t>(r)] = (acc += law.probs[static_cast<std::size_t>(r)]);

  constexpr long kBatch = 8192;
  const long batches = (trials + kBatch - 1) / kBatch;
  std::vector<double> partial(static_cast<std::size_t>(batches), 0.0);
  parallel_for(jobs, static_cast<std::size_t>(batches), [&](std::size_t b) {
    Rng rng(derive_seed(seed, b));
    long count = std::min(kBatch, trials - static_cast<long>(b) * kBatch);
    double sum = 0.0;
    for (long trial = 0; trial < count; ++trial) {
      std::uint32_t m_ab = 0, m_bc = 0, m_ca = 0;
      for (int i = 0; i < n; ++i) {
        double u = rng.uniform01();
        int r = 0;
        while (r < 5 && u >= cdf[static_cast<std::size_t>(r)]) ++r;
        if (kSigns[r][0] > 0) m_ab |= std::uint32_t{1} << i;
        if (kSigns[r][1] > 0) m_bc |= std::uint32_t{1} << i;
        if (kSigns[r][2] > 0) m_ca |= std::uint32_t{1} << i;
      }
      double v1 = f_ab.value(m_ab), v2 = f_bc.value(m_bc), v3 = f_ca.value(m_ca);
      sum += 0.25 * (1.0 + v1 * v2 + v2 * v3 + v3 * v1);
    }
    partial[b] = sum;
  });
  double total = 0.0;
  for (double s : partial) total += s;
  return total / static_cast<double>(trials);
}

std::optional<double> pivotal_intersection_bound(double eps, double alpha) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::domain_error("eps must lie in [0,1]");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("alpha must lie in [0,1]");
  if (alpha == 0.0) return std::nullopt;
  double s = std::sqrt(1.0 - alpha);
  if (s >= 1.0) return std::nullopt;
  return std::pow(eps, (2.0 - s) / (1.0 - s));
}

namespace {

CubeFunction pivotal_indicator(const CubeFunction& f, int i) {
  require_coord(f, i);
  if (!f.plus_minus_one())
    throw std::invalid_argument("pivotal sets are defined for +-1 valued functions");
  const std::size_t bit = std::size_t{1} << i;
  std::vector<double> table(f.table().size());
  for (std::size_t mask = 0; mask < table.size(); ++mask)
    table[mask] =
        std::abs(f.value(static_cast<std::uint32_t>(mask)) -
                 f.value(static_cast<std::uint32_t>(mask ^ bit))) > kTableTol
            ? 1.0
            : 0.0;
  return CubeFunction(f.n(), f.bias(), std::move(table));
}

}  // namespace

PivotalCheck pivotal_intersection_exact(const CubeFunction& f_ab, int i,
                                        const CubeFunction& f_bc, int j,
                                        const RankingDistribution& law) {
  law.validate();
  double p_ab = law.marginal_plus(0), p_bc = law.marginal_plus(1);
  for (int c = 0; c < f_ab.n(); ++c)
    if (std::abs(f_ab.bias(c) - p_ab) > 1e-9 || std::abs(f_bc.bias(c) - p_bc) > 1e-9)
      throw std::invalid_argument("function biases must match the law's marginals");

  CubeFunction piv_i = pivotal_indicator(f_ab, i);
  CubeFunction piv_j = pivotal_indicator(f_bc, j);
  PivotalCheck check;
  check.inf_i = influence(f_ab, i);
  check.inf_j = influence(f_bc, j);
  check.eps = std::min(check.inf_i, check.inf_j);
  check.prob_intersection = correlated_pair_expectation(piv_i, piv_j, law.pair_law(0, 1));
  auto bound = pivotal_intersection_bound(check.eps, law.alpha());
  check.bound = bound.value_or(0.0);
  check.holds = check.prob_intersection >= check.bound - 1e-12;
  return check;
}

DeltaForEpsilon delta_for_epsilon(double eps, double alpha, double C) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("eps must lie in (0,1)");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha must lie in (0,1)");
  if (!(C > 0.0)) throw std::domain_error("C must be positive");
  double lg = std::log(1.0 / eps);
  double log_delta = -C * std::pow(alpha, -7.0) * std::exp2(1.0 / (alpha * alpha)) * lg * lg /
                     std::pow(eps, 2.0 + 1.0 / (2.0 * alpha * alpha));
  return {log_delta, std::exp(log_delta)};
}

}  // namespace revhyp
