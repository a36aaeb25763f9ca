#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "revhyp/generator.hpp"
#include "revhyp/measure.hpp"
#include "revhyp/rng.hpp"

namespace revhyp {

enum class ChainKind {
  simple,
  product_walk,
  random_transposition,
  top_to_random,
  bernoulli_laplace,
  spanning_tree_walk,
  glauber_ising,
  qq_infinity_truncated,
};

ChainKind chain_kind_from_string(const std::string& name);
std::string to_string(ChainKind kind);

enum class IsingBoundary { free_bc, plus, minus };
enum class GlauberRates { metropolis, heat_bath };

struct ChainSpec {
  ChainKind kind = ChainKind::simple;

  // simple: either m uniform points or explicit weights
  int m = 2;
  std::vector<double> weights;

  // product-walk: n factors of the simple chain above, rate 1/n per factor
  int n = 0;

  // bernoulli-laplace: r-subsets of {1..n}
  int r = 0;

  // spanning-tree-walk presets: "doubled-line" (segments), "cycle" (m), "complete" (m)
  std::string graph = "doubled-line";
  int segments = 0;

  // glauber-ising on a width x height box
  int width = 0, height = 0;
  double beta = 0.0, h = 0.0;
  IsingBoundary boundary = IsingBoundary::free_bc;
  GlauberRates rates = GlauberRates::metropolis;

  // truncated q/q/infinity queue: states {0..trunc}
  double lambda = 0.0;
  int trunc = 0;

  void validate() const;          // throws std::invalid_argument on bad parameters
  std::size_t state_count() const;
  std::string describe() const;
};

/// Raised by build() when the spec only supports trajectory sampling.
class SamplerOnlyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Explicit-generator cap; larger chains are sampler-only.
constexpr std::size_t kExplicitStateCap = 20000;

/// Builds the validated generator for a chain spec (state count <= cap).
Generator build(const ChainSpec& spec);

struct KnownBounds {
  int p;  // which p-logSob constant the bound concerns
  std::optional<double> lower, upper;
  std::string note;
};
/// Literature bounds quoted verbatim; absent for kinds without one.
std::optional<KnownBounds> known_constant_bounds(const ChainSpec& spec);

struct TrajectorySummary {
  long jumps = 0;
  double t_end = 0.0;
  std::string final_state;
  // "occupancy" (queue), "magnetization" (ising): time averages
  std::map<std::string, double> time_average;
  // product walk: number of refresh events per coordinate
  std::vector<long> refresh_counts;
  // time-weighted occupation frequencies; filled for spaces <= 100 states
  std::vector<double> occupation;
  // jump-chain visit counts (post-jump states); same indexing as occupation
  std::vector<long> visit_counts;
};

/// Jump-chain simulator (exponential clocks + kernel sampling); usable for
/// every spec, including those above the explicit-generator cap.
class TrajectorySampler {
 public:
  TrajectorySampler(ChainSpec spec, std::uint64_t seed);
  ~TrajectorySampler();
  TrajectorySampler(TrajectorySampler&&) noexcept;
  TrajectorySampler& operator=(TrajectorySampler&&) noexcept;

  const ChainSpec& spec() const;
  /// Runs until t_end (time units) or max_jumps, whichever comes first.
  TrajectorySummary run(double t_end, long max_jumps = -1,
                        const std::vector<std::string>& observables = {});

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

TrajectorySummary sample_path(TrajectorySampler& sampler, double t_end,
                              const std::vector<std::string>& observables = {});

}  // namespace revhyp
