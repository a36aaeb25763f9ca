#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace revhyp {

/// A finite probability space: unique point labels and strictly positive
/// weights summing to one. Immutable after construction; shared between
/// functions and generators via shared_ptr.
class ProbabilitySpace {
 public:
  static constexpr std::size_t kMaxPoints = 1000000;

  ProbabilitySpace(std::vector<std::string> labels, std::vector<double> mu);

  std::size_t size() const { return mu_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<double>& mu() const { return mu_; }
  double mu(std::size_t i) const { return mu_[i]; }
  /// Index of a label; throws std::invalid_argument if absent.
  std::size_t index_of(const std::string& label) const;

 private:
  std::vector<std::string> labels_;
  std::vector<double> mu_;
};

using SpacePtr = std::shared_ptr<const ProbabilitySpace>;

SpacePtr make_space(std::vector<std::string> labels, std::vector<double> mu);
SpacePtr uniform_space(std::size_t n);
/// Two points "0","1" with weights (alpha, 1-alpha).
SpacePtr two_point_space(double alpha);
/// Product of factor spaces; index convention: the first factor is the
/// least significant digit. Labels are factor labels joined by '|'.
SpacePtr product_space(const std::vector<SpacePtr>& factors);

/// A real-valued function on a finite probability space.
class RealFunction {
 public:
  RealFunction(SpacePtr space, std::vector<double> values);

  const SpacePtr& space() const { return space_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }
  bool strictly_positive() const { return strictly_positive_; }

  static RealFunction constant(SpacePtr space, double c);
  /// Pointwise transform; recomputes the positivity flag.
  RealFunction map(double (*fn)(double)) const;

 private:
  SpacePtr space_;
  std::vector<double> values_;
  bool strictly_positive_;
};

/// Compensated (Neumaier) weighted sum; all expectations route through this.
double weighted_sum(std::span<const double> weights, std::span<const double> values);

double expectation(const RealFunction& f);
double variance(const RealFunction& f);
double covariance(const RealFunction& f, const RealFunction& g);
/// Ent(f) = E(f log f) - Ef log Ef; requires a strictly positive f.
double entropy(const RealFunction& f);

/// Hölder conjugate p' = p/(p-1), extended with 0' = 0; p = 1 is rejected.
double holder_conjugate(double p);

/// Extended p-norm. For p >= 1 any f (absolute values are used); for p < 1
/// (including 0 and negative p) f must be strictly positive. p = 0 is the
/// geometric mean exp(E log f).
double p_norm(const RealFunction& f, double p);
/// p in (0,1) with nonnegative f permitted (used by two-function bounds on
/// indicators, where E f^p is well defined).
double p_norm_nonneg(const RealFunction& f, double p);

}  // namespace revhyp
