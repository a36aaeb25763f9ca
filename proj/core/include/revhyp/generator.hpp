#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "revhyp/measure.hpp"

namespace revhyp {

struct AxiomViolation {
  std::string axiom;
  double magnitude;
};

struct ValidationReport {
  std::vector<AxiomViolation> violations;
  bool ok() const { return violations.empty(); }
  std::string str() const;
};

class GeneratorValidationError : public std::runtime_error {
 public:
  explicit GeneratorValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// A validated reversible Markov generator L on a finite probability space:
/// L1 = 0, mu-self-adjoint, positive semidefinite, nonpositive off-diagonal
/// entries. The heat operator T_t = e^{-tL} is evaluated through a dense
/// symmetric eigendecomposition of D^{1/2} L D^{-1/2}, computed once on first
/// use and shared by all copies.
class Generator {
 public:
  static constexpr double kAxiomTol = 1e-10;

  const SpacePtr& space() const;
  const Eigen::MatrixXd& matrix() const;
  std::size_t size() const;

  /// Eigenvalues of L, ascending, with values in [-tol, 0) clamped to 0.
  const Eigen::VectorXd& eigenvalues() const;

  Eigen::VectorXd heat_vec(double t, const Eigen::VectorXd& f) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& f) const;  // L f

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  explicit Generator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  friend Generator validate_generator(Eigen::MatrixXd L, SpacePtr space);
  friend Eigen::MatrixXd heat_matrix_unchecked(const Generator& g, double t);
};

/// Checks the four generator axioms; never throws.
ValidationReport check_generator(const Eigen::MatrixXd& L, const ProbabilitySpace& space);
/// Validates and wraps; throws GeneratorValidationError naming every violated
/// axiom with its magnitude.
Generator validate_generator(Eigen::MatrixXd L, SpacePtr space);

/// L = Id - E_mu, the chain that refreshes its state from mu.
Generator simple_generator(SpacePtr space);

/// T_t f = e^{-tL} f; t must be >= 0.
RealFunction heat_operator(const Generator& g, double t, const RealFunction& f);

/// E(f, g) = E[f Lg], evaluated through the matrix route.
double dirichlet_form(const Generator& g, const RealFunction& f, const RealFunction& h);
/// Same quantity through the pair-sum identity
/// -1/2 sum_{x,y} mu(x) L(x,y) (f(x)-f(y))(g(x)-g(y)).
double dirichlet_form_pairsum(const Generator& g, const RealFunction& f, const RealFunction& h);

struct SpectralGapResult {
  double gap = 0.0;       // smallest nonzero eigenvalue (0 when none)
  bool reducible = false; // eigenvalue 0 has multiplicity > 1
};
SpectralGapResult spectral_gap(const Generator& g);

/// Kronecker sum of factor generators with optional per-factor rate scaling.
/// Factor order follows the product_space index convention (first factor
/// least significant). Materialization is refused above kMaterializeCap
/// states; the lazy factor-wise heat action has no such cap.
class TensorGenerator {
 public:
  static constexpr std::size_t kMaterializeCap = 20000;

  explicit TensorGenerator(std::vector<Generator> factors, std::vector<double> rates = {});

  std::size_t total_states() const { return total_; }
  const std::vector<Generator>& factors() const { return factors_; }
  const std::vector<double>& rates() const { return rates_; }
  const SpacePtr& space() const;

  /// Dense Kronecker-sum matrix, validated; throws std::length_error above the cap.
  Generator materialize() const;
  /// Factor-wise heat action on a flattened product-state vector.
  std::vector<double> heat(double t, std::vector<double> f) const;
  RealFunction heat(double t, const RealFunction& f) const;

 private:
  std::vector<Generator> factors_;
  std::vector<double> rates_;
  std::size_t total_;
  mutable SpacePtr space_;  // built on first use
};

/// Row-stochastic kernel on a space; nu = mu K is derived on construction.
struct MarkovKernel {
  static constexpr double kRowTol = 1e-12;

  MarkovKernel(SpacePtr space, Eigen::MatrixXd K);

  SpacePtr space;
  Eigen::MatrixXd K;
  Eigen::VectorXd nu;
};

struct KernelAlpha {
  double alpha;       // min over x,y with nu(y) > 0 of K(x,y)/nu(y)
  double alpha_star;  // -log(1 - alpha); +inf when alpha = 1
};
KernelAlpha kernel_alpha(const MarkovKernel& k);

struct KernelDecomposition {
  MarkovKernel S;
  double alpha_star;
};
/// K = T_{alpha*} S with T the simple semigroup on (Omega, mu) and S Markov;
/// throws std::domain_error when alpha = 0 (impossible) or alpha = 1 (degenerate).
KernelDecomposition kernel_decompose(const MarkovKernel& k);

}  // namespace revhyp
