#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "revhyp/generator.hpp"
#include "revhyp/measure.hpp"

namespace revhyp {

enum class Direction { forward, reverse };

/// forward: ||T_t f||_p <= ||f||_q for 1 < q <= p;
/// reverse: ||T_t f||_q >= ||f||_p for q < p < 1 and positive f.
struct HyperQuery {
  Direction dir;
  double p;
  double q;
  double t;
  void validate() const;  // throws std::domain_error on bad exponents or t < 0
};

enum class VerdictStatus { no_counterexample_found, violated };

struct InequalityVerdict {
  HyperQuery query;
  VerdictStatus status;
  std::optional<RealFunction> witness;  // normalized to inner norm 1 when violated
  double deficit;                       // min over searched f of the signed log-norm gap
  int restarts;
  std::uint64_t seed;
};

struct VerifyBudget {
  int restarts = 64;
  int max_iters = 0;       // Nelder-Mead cap; 0 -> default
  int grid_points = 4001;  // two-point exhaustive grid resolution
  double log_range = 8.0;
};

/// Falsification search: minimizes the inequality's log-norm gap over
/// positive f = exp(u). Absence of a counterexample under the budget is the
/// deliverable, never a proof. Deterministic given seed; independent of jobs.
InequalityVerdict verify(const Generator& g, const HyperQuery& query,
                         const VerifyBudget& budget, std::uint64_t seed, int jobs = 1);

struct CriticalTime {
  double t_star;
  double lo, hi;   // final bracket (width <= 1e-3 when bracketed)
  bool bracketed;  // false when no sign change was found in [0, 50]
};

/// Bisection on t of the inner minimization from verify; empirical and
/// search-limited by construction.
CriticalTime critical_time(const Generator& g, Direction dir, double p, double q,
                           const VerifyBudget& budget, std::uint64_t seed, int jobs = 1);

enum class ThresholdFamily {
  borell,               // (1/2) log((1-q)/(1-p)), q < p < 1
  general,              // (C/4) log((1-q)/(1-p)), q < p < 1
  simple,               // log((1-q)/(1-p)), q < p < 1
  simple_strong,        // log((1-q)(2-p)/((1-p)(2-q))) on 0<=q<p<1; log((2-q)/(2-p)) on q<p<=0
  two_function_general, // -(C/4) log((1-p)(1-q)), 0 < p,q < 1
  two_function_simple,  // log((2-p)(2-q)/(4(1-p)(1-q))), 0 < p,q < 1
};

ThresholdFamily threshold_family_from_string(const std::string& name);
std::string to_string(ThresholdFamily family);

double threshold(ThresholdFamily family, double p, double q,
                 std::optional<double> C = std::nullopt);

/// theta(q) = 1 + q (2-q)^(-1+2/q) [4(1-q)]^(-1/q) for q < 0; lies in (0,1).
double theta(double q);
/// eta(q) = -log theta(q): ||T_t f||_q >= ||f||_0 for t >= eta(q), simple semigroups.
double eta(double q);
/// tau(p) = -log theta(p') for p in (0,1): ||T_t f||_0 >= ||f||_p for t >= tau(p).
double tau(double p);

struct TwoFunctionCheck {
  double lhs;  // E[f T_t g]
  double rhs;  // ||f||_p ||g||_q
  bool holds;  // lhs >= rhs - 1e-10
};
/// E[f T_t g] >= ||f||_p ||g||_q for nonnegative f, g and 0 < p, q < 1.
TwoFunctionCheck two_function_check(const Generator& g, const RealFunction& f,
                                    const RealFunction& h, double p, double q, double t);

struct ReverseHolderCheck {
  double norm;           // ||f||_p
  double analytic_value; // E[f g*] at the optimizer g* ~ f^{p-1}
  double inf_estimate;   // min over g* and the random feasible sample
};
/// ||f||_p = inf { E f g : g > 0, ||g||_{p'} >= 1 } for p < 1.
ReverseHolderCheck reverse_holder_check(const RealFunction& f, double p, int trials,
                                        std::uint64_t seed);

/// Poincare constant 2t/(log(1-q) - log(1-p)) implied by reverse
/// hypercontractivity at (p, q, t), q < p < 1, t > 0.
double implied_poincare(double p, double q, double t);

/// d/dp log ||T_{t(p)} f||_p along a time schedule with derivative dt_dp:
/// (Ent(h^p) - p^2 t'(p) E(h^{p-1}, h)) / (p^2 E h^p), h = T_{t(p)} f.
double log_norm_derivative(const Generator& g, const RealFunction& f, double p, double t,
                           double dt_dp);

}  // namespace revhyp
