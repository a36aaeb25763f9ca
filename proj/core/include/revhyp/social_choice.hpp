#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace revhyp {

/// A function on the biased cube {-1,1}^n with values in [-1,1]. Truth tables
/// are bit-ordered: bit i of the index is 1 iff x_i = +1, and the first
/// coordinate is the least significant bit. bias[i] = P(x_i = +1).
class CubeFunction {
 public:
  static constexpr int kMaxCoordinates = 20;

  CubeFunction(int n, std::vector<double> bias, std::vector<double> table);
  static CubeFunction dictator(int n, std::vector<double> bias, int coord);
  static CubeFunction constant(int n, std::vector<double> bias, double value);

  int n() const { return n_; }
  double bias(int i) const { return bias_[static_cast<std::size_t>(i)]; }
  const std::vector<double>& bias() const { return bias_; }
  const std::vector<double>& table() const { return table_; }
  double value(std::uint32_t mask) const { return table_[mask]; }
  bool plus_minus_one() const;

  /// Fourier coefficients over the orthonormal psi-basis, indexed by subset
  /// mask; psi_1(x) = (x - (2p-1)) / (2 sqrt(p(1-p))) with psi_1(+1) > 0.
  const std::vector<double>& fourier() const;
  /// Probability weight of the full assignment `mask` under the product law.
  double point_weight(std::uint32_t mask) const;

 private:
  int n_;
  std::vector<double> bias_;
  std::vector<double> table_;
  mutable std::vector<double> fourier_;  // computed on first use
};

/// Flip-disagreement influence of coordinate i. For +-1 valued functions the
/// sandwich I_i <= Inf_i <= I_i / (4 p_i (1-p_i)) is verified on every call.
double influence(const CubeFunction& f, int i);
/// Fourier-tail influence I_i = sum_{S : i in S} fhat(S)^2.
double variance_influence(const CubeFunction& f, int i);
/// I_i^{<=d}: the same sum restricted to |S| <= d.
double low_degree_influence(const CubeFunction& f, int i, int d);

/// A positive distribution over the 6 rankings of three alternatives a,b,c.
/// Ranking order strings list alternatives from top to bottom.
struct RankingDistribution {
  static const std::array<const char*, 6> kRankings;  // abc acb bac bca cab cba

  std::array<double, 6> probs;

  void validate() const;  // positive, sum 1 within 1e-12
  /// Law of (x^{a>b}, x^{b>c}, x^{c>a}) on {-1,1}^3; cell index bit0 = ab,
  /// bit1 = bc, bit2 = ca (bit set when the comparison is +1). The two cyclic
  /// cells always carry zero mass.
  std::array<double, 8> triple_law() const;
  /// Smallest atom of the triple law (equivalently the smallest ranking
  /// probability); always positive for a valid distribution.
  double alpha() const;
  /// Marginal P(x_c = +1) of comparison c in {0:ab, 1:bc, 2:ca}.
  double marginal_plus(int comparison) const;
  /// Joint 2x2 law of comparisons (c1, c2); row u, column v with u,v in
  /// {0 -> -1, 1 -> +1}.
  Eigen::Matrix2d pair_law(int c1, int c2) const;
  /// Corr(x_{c1}(i), x_{c2}(i)).
  double pair_correlation(int c1, int c2) const;
};

/// E[f(X) g(Y)] where the coordinate pairs (X_k, Y_k) are i.i.d. with the
/// given joint 2x2 law. Exact tensor contraction, n <= 20.
double correlated_pair_expectation(const CubeFunction& f, const CubeFunction& g,
                                   const Eigen::Matrix2d& joint);

/// PX(f1,f2,f3) = (1 + E f1 f2 + E f2 f3 + E f3 f1) / 4 with the pairwise
/// vectors coupled through the ranking law; equals the exact probability of a
/// non-transitive outcome for +-1 valued IIA triples.
double paradox_probability(const CubeFunction& f_ab, const CubeFunction& f_bc,
                           const CubeFunction& f_ca, const RankingDistribution& law);
double paradox_probability_mc(const CubeFunction& f_ab, const CubeFunction& f_bc,
                              const CubeFunction& f_ca, const RankingDistribution& law,
                              long trials, std::uint64_t seed, int jobs = 1);

/// eps^{(2-sqrt(1-alpha))/(1-sqrt(1-alpha))}; nullopt when alpha = 0.
std::optional<double> pivotal_intersection_bound(double eps, double alpha);

struct PivotalCheck {
  double inf_i, inf_j;          // influences of the two pivotal voters
  double eps;                   // min(inf_i, inf_j)
  double prob_intersection;     // P{ i pivotal for f_ab and j pivotal for f_bc }
  double bound;                 // eps^{(2-sqrt(1-alpha))/(1-sqrt(1-alpha))}
  bool holds;
};
/// Exact pivotal-set intersection check for +-1 valued IIA pairs whose biases
/// match the law's marginals.
PivotalCheck pivotal_intersection_exact(const CubeFunction& f_ab, int i,
                                        const CubeFunction& f_bc, int j,
                                        const RankingDistribution& law);

struct DeltaForEpsilon {
  double log_delta;
  double delta;  // exp(log_delta); underflows to 0 for small eps
};
/// delta(eps) = exp(-C alpha^{-7} 2^{alpha^{-2}} log(1/eps)^2 / eps^{2+1/(2 alpha^2)}).
DeltaForEpsilon delta_for_epsilon(double eps, double alpha, double C);

}  // namespace revhyp
