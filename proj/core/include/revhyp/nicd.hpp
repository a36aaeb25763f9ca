#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "revhyp/mixing.hpp"

namespace revhyp {

struct NicdConfig {
  int m = 2;        // faces per die
  int n = 1;        // string length
  int k = 2;        // players
  double rho = 0.5;
  long trials = 100000;
  std::uint64_t seed = 0;

  void validate() const;
};

/// A per-player map Omega^n -> Omega, Omega = {0..m-1}.
class Protocol {
 public:
  enum class Kind { dictator, plurality, table };

  static Protocol dictator(int m, int n, int coord);
  /// Plurality with the paper's tie rule: output the earliest-indexed
  /// coordinate whose face attains the maximum frequency. Balanced by
  /// face-permutation equivariance.
  static Protocol plurality(int m, int n);
  static Protocol from_table(int m, int n, std::vector<std::uint8_t> table);

  Kind kind() const { return kind_; }
  int m() const { return m_; }
  int n() const { return n_; }
  int coord() const { return coord_; }
  int evaluate(std::span<const std::uint8_t> x) const;
  /// Full output table over m^n inputs (first coordinate least significant).
  std::vector<std::uint8_t> tabulate() const;
  /// Exact balance check over all m^n inputs; requires m^n <= 10^6.
  bool balanced_exact() const;

  bool operator==(const Protocol& other) const;

 private:
  Protocol(Kind kind, int m, int n) : kind_(kind), m_(m), n_(n) {}
  Kind kind_;
  int m_, n_;
  int coord_ = 0;
  std::vector<std::uint8_t> table_;
};

constexpr std::size_t kNicdExactCap = 1000000;  // m^n cap for exact paths

struct AgreementResult {
  double estimate = 0.0;
  std::optional<WilsonInterval> ci;  // present for Monte Carlo estimates
  bool exact = false;
  long trials = 0;
};

/// P{all players output the same face}: exact conditional-product computation
/// when m^n <= 10^6 and k <= 8, Monte Carlo with a Wilson 99% interval
/// otherwise. Protocols must be balanced (checked exactly when tabulable).
AgreementResult agreement_probability(const NicdConfig& cfg,
                                      const std::vector<Protocol>& protocols, int jobs = 1);
AgreementResult agreement_probability_mc(const NicdConfig& cfg,
                                         const std::vector<Protocol>& protocols, int jobs = 1);

/// Holder upper bound sum_j prod_i ||T_t f_{i,j}||_k at t = log(1/rho);
/// always >= the exact agreement probability.
double holder_upper_bound(const NicdConfig& cfg, const std::vector<Protocol>& protocols);

/// Largest admissible power-bound exponent 2 (1-sqrt(rho)) / sqrt(rho),
/// shaved by 1e-3 relative.
double power_bound_exponent(double rho);

struct PowerBoundRow {
  int k;
  double lhs;       // ||T_t f||_k^k, exactly
  double envelope;  // C k^{-beta}, C calibrated at k = 2
};
struct PowerBoundCheck {
  std::vector<PowerBoundRow> rows;
  double beta;
  double calibration_c;
  int k_dominating;  // minimal k in the sweep from which the envelope dominates
};
/// Exact ||T_t f||_k^k sweep for an indicator f with E f <= 1/2, t = log(1/rho).
PowerBoundCheck power_bound_check(int m, int n, const std::vector<std::uint8_t>& indicator,
                                  double rho, const std::vector<int>& ks);

/// Order-of-growth agreement envelope m C k^{-gamma1}; gamma1 equals the
/// power-bound exponent, C is a caller-supplied calibration (not sharp).
double upper_bound_envelope(int m, double rho, double k, double calibration_c = 1.0);

struct SweepRow {
  int k;
  double estimate, lo, hi;
  double envelope;
};
/// Monte Carlo agreement of the all-plurality protocol over a k-range; the
/// envelope column is calibrated at the smallest k.
std::vector<SweepRow> plurality_lower_sweep(int m, double rho, const std::vector<int>& ks,
                                            int n, long trials, std::uint64_t seed,
                                            int jobs = 1);

}  // namespace revhyp
