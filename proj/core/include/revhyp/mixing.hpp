#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "revhyp/generator.hpp"
#include "revhyp/measure.hpp"
#include "revhyp/rng.hpp"

namespace revhyp {

/// Two-set mixing lower bound for chains with 1-logSob constant C:
/// exp(-(a^2 + 2 e^{-2t/C} ab + b^2) / (2 (1 - e^{-4t/C}))); 0 at t = 0.
double two_set_bound(double C, double a, double b, double t);

/// a = sqrt(-2 log pi(A)) for pi(A) in (0, 1].
double set_measure_parameter(double pi);

struct ClassicalBounds {
  double expander;     // pi(A)pi(B) - sqrt(pi(A)pi(B)) e^{-t/D}, clamped at 0
  double mixing_time;  // pi(A)(pi(B) - eps), clamped at 0
};
ClassicalBounds classical_bounds(double D, double eps, double piA, double piB, double t);

/// Product-walk improvement: exp(-((2-e^{-tau})(a^2+b^2) + 2 e^{-tau/2} ab)
/// / (4 (1 - e^{-tau}))); dominates two_set_bound(C=4) at matching times.
double product_improved_bound(double tau, double a, double b);

/// E[1_A T_t 1_B], exactly, via the spectral (or factor-wise) heat action.
double exact_joint(const Generator& g, const std::vector<std::size_t>& A,
                   const std::vector<std::size_t>& B, double t);
double exact_joint(const TensorGenerator& g, const std::vector<std::size_t>& A,
                   const std::vector<std::size_t>& B, double t);

double set_measure(const ProbabilitySpace& space, const std::vector<std::size_t>& A);

/// Exponent (2 - sqrt(rho)) / (1 - sqrt(rho)) of the rho-correlated bound.
double rho_set_exponent(double rho);
/// eps^{(2-sqrt(rho))/(1-sqrt(rho))} for rho in [0,1).
double correlated_set_bound_rho(double rho, double eps);
/// eps^{(2-sqrt(1-alpha))/(1-sqrt(1-alpha))}; nullopt when alpha = 0 (the
/// paper's two-state kernel shows no such bound can exist).
std::optional<double> correlated_set_bound_kernel(double alpha, double eps);
/// eps^{2/(1-rho) + kappa (1-rho)} with a user-supplied kappa.
double correlated_set_bound_improved(double rho, double eps, double kappa);

/// A coupled pair law on a product space: either every coordinate copies x
/// with probability rho (refreshing from the factor otherwise), or each
/// coordinate moves through an explicit Markov kernel.
struct CorrelatedProductInstance {
  SpacePtr factor;
  int n = 1;
  std::optional<double> rho;          // exactly one of rho/kernel is set
  std::optional<MarkovKernel> kernel;

  void validate() const;
  /// Per-coordinate transition kernel K(x, .) of y given x.
  Eigen::MatrixXd coordinate_kernel() const;
  /// Marginal law of a y-coordinate (mu K).
  Eigen::VectorXd y_marginal() const;
};

/// P{x in A, y in B} computed exactly as E[1_A K^{tensor n} 1_B].
double exact_pair_probability(const CorrelatedProductInstance& inst,
                              const std::vector<std::size_t>& A,
                              const std::vector<std::size_t>& B);

class CorrelatedSampler {
 public:
  CorrelatedSampler(CorrelatedProductInstance inst, std::uint64_t seed);
  /// One coupled draw (x, y); coordinates index into the factor space.
  std::pair<std::vector<int>, std::vector<int>> next();

 private:
  CorrelatedProductInstance inst_;
  Rng rng_;
  std::vector<double> mu_cdf_;
  std::vector<double> kernel_cdf_;  // row-major CDFs of the coordinate kernel
};

struct WilsonInterval {
  double estimate, lo, hi;
};
/// Wilson score interval at 99% confidence.
WilsonInterval wilson99(long successes, long trials);

}  // namespace revhyp
