#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "revhyp/generator.hpp"
#include "revhyp/measure.hpp"
#include "revhyp/rng.hpp"

namespace revhyp {

// |p| below this evaluates through the p = 0 limit form, |p-1| below it
// through the p = 1 form; both limits carry the same constant.
constexpr double kExponentLimitBand = 1e-4;
// Ratios are reported only when the normalized Dirichlet side exceeds this.
constexpr double kRatioFloor = 1e-12;
// Pointwise audits skip witnesses below this Dirichlet mass: near the
// constant function both sides of the ratio vanish quadratically and the
// computed margin is double-precision noise, which can exceed the 1e-9 audit
// slack. Such witnesses carry no information about the inequality.
constexpr double kAuditDirichletFloor = 1e-5;

/// Both sides of the p-logSob inequality with the constant factored out:
/// entropy_side <= C * dirichlet_side. For p outside {0,1} the self-dual
/// form is used: Ent(g) on the left, (p p'/4) E(g^{1/p}, g^{1/p'}) on the
/// right with g = f^p. At p = 1: Ent(f) vs (1/4) E(f, log f). At p = 0:
/// Var(log f) vs -(1/2) E(f, 1/f).
struct LogSobEvaluation {
  double p;
  double entropy_side;
  double dirichlet_side;
  std::optional<double> ratio;  // entropy/dirichlet when dirichlet > kRatioFloor
};

LogSobEvaluation logsob_evaluate(const Generator& g, double p, const RealFunction& f);
/// Same functional, parametrized directly by the self-dual witness g = f^p;
/// rejects p in the 0-band, where no self-dual form exists.
LogSobEvaluation logsob_evaluate_selfdual(const Generator& g, double p,
                                          const RealFunction& witness);

/// p p' E(g^{1/p}, g^{1/p'}); E(log g, g) within the 1-band. Nonnegative and
/// non-increasing in p on (0,2] for every positive g.
double sv_quantity(const Generator& g, const RealFunction& witness, double p);

struct SvCheck {
  double lhs;  // q side
  double rhs;  // p side
  bool holds;  // lhs >= rhs - 1e-10
};
/// Generalized Stroock-Varopoulos comparison; requires 0 < q < p <= 2.
SvCheck sv_check(const Generator& g, const RealFunction& witness, double p, double q);

enum class EstimateMethod { grid_2pt, multistart, exhaustive };

struct EstimateBudget {
  int restarts = 0;        // 0 -> 2 * |Omega|
  int max_iters = 0;       // Nelder-Mead iteration cap; 0 -> optimizer default
  int grid_points = 10001; // two-point grid resolution (step 6e-3 over [-30,30])
  double log_range = 8.0;  // witness log-values are clamped to [-range, range]
};

struct ConstantEstimate {
  double p = 0.0;
  double c_hat = 0.0;  // supremum over searched witnesses; a lower bound on C
  std::optional<RealFunction> witness;
  EstimateMethod method = EstimateMethod::multistart;
  int restarts = 0;
  std::uint64_t seed = 0;
  bool unbounded = false;  // spectral gap <= 0
  std::vector<double> restart_best;  // per-restart maxima, index = restart
};

/// Estimated optimal p-logSob constant: exhaustive one-parameter grid on
/// two-point spaces, multi-start Nelder-Mead over recentred log-witnesses
/// otherwise. Deterministic in (seed); independent of jobs.
ConstantEstimate estimate_constant(const Generator& g, double p, const EstimateBudget& budget,
                                   std::uint64_t seed, int jobs = 1);

/// Best kappa with Var(g) <= kappa E(g,g), i.e. 1/gap; +inf on gap 0.
/// The corresponding 0-logSob constant is 2 kappa.
double poincare_constant(const Generator& g);

/// Certified p-logSob constant ((p-1) q^2 / ((q-1) p^2)) C_q for 1 < q <= p <= 2.
double reversing_bound(double c_q, double q, double p);

struct MonotonicityAudit {
  std::vector<ConstantEstimate> estimates;  // one per grid point
  std::size_t pointwise_checks = 0;
  std::size_t pointwise_violations = 0;
  double worst_excess = 0.0;  // max of ratio_q - ratio_p over q < p (<= 1e-9 when ok)
  bool pointwise_ok = true;
};

/// Estimates C_p over the grid and audits the pointwise consequence of the
/// Stroock-Varopoulos comparison: ratio_q(g) <= ratio_p(g) + 1e-9 for q < p.
MonotonicityAudit monotonicity_audit(const Generator& g, std::vector<double> grid,
                                     const EstimateBudget& budget, std::uint64_t seed,
                                     int jobs = 1, int witnesses = 32);

/// Random audit witness: i.i.d. log-values uniform on [-range, range], recentred.
RealFunction sample_log_uniform_witness(const SpacePtr& space, Rng& rng, double range = 3.0);

}  // namespace revhyp
