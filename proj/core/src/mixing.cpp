#include "revhyp/mixing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "revhyp/tensor_ops.hpp"

namespace revhyp {

double two_set_bound(double C, double a, double b, double t) {
  if (!(C > 0.0)) throw std::domain_error("two_set_bound needs C > 0");
  if (a < 0.0 || b < 0.0) throw std::domain_error("two_set_bound needs a, b >= 0");
  if (t < 0.0) throw std::domain_error("two_set_bound needs t >= 0");
  if (t == 0.0) return 0.0;  // exponent -> -infinity
  double r = std::exp(-2.0 * t / C);
  return std::exp(-0.5 * (a * a + 2.0 * r * a * b + b * b) / (1.0 - r * r));
}

double set_measure_parameter(double pi) {
  if (!(pi > 0.0 && pi <= 1.0)) throw std::domain_error("set measure must lie in (0,1]");
  return std::sqrt(std::max(0.0, -2.0 * std::log(pi)));
}

ClassicalBounds classical_bounds(double D, double eps, double piA, double piB, double t) {
  double expander = piA * piB - std::sqrt(piA * piB) * std::exp(-t / D);
  double mixing = piA * (piB - eps);
  return {std::max(0.0, expander), std::max(0.0, mixing)};
}

double product_improved_bound(double tau, double a, double b) {
  if (!(tau > 0.0)) throw std::domain_error("product_improved_bound needs tau > 0");
  double e = std::exp(-tau);
  double num = (2.0 - e) * (a * a + b * b) + 2.0 * std::exp(-0.5 * tau) * a * b;
  return std::exp(-num / (4.0 * (1.0 - e)));
}

double set_measure(const ProbabilitySpace& space, const std::vector<std::size_t>& A) {
  double m = 0.0;
  for (std::size_t i : A) m += space.mu(i);
  return m;
}

namespace {

std::vector<double> indicator(std::size_t n, const std::vector<std::size_t>& A) {
  std::vector<double> f(n, 0.0);
  for (std::size_t i : A) f.at(i) = 1.0;
  return f;
}

double pair_with_indicator(const ProbabilitySpace& space, const std::vector<std::size_t>& A,
                           const std::vector<double>& g) {
  double sum = 0.0;
  for (std::size_t i : A) sum += space.mu(i) * g[i];
  return sum;
}

}  // namespace

double exact_joint(const Generator& g, const std::vector<std::size_t>& A,
                   const std::vector<std::size_t>& B, double t) {
  std::vector<double> fb = indicator(g.size(), B);
  Eigen::VectorXd tb = g.heat_vec(t, Eigen::Map<const Eigen::VectorXd>(
                                         fb.data(), static_cast<Eigen::Index>(fb.size())));
  double sum = 0.0;
  for (std::size_t i : A) sum += g.space()->mu(i) * tb[static_cast<Eigen::Index>(i)];
  return sum;
}

double exact_joint(const TensorGenerator& g, const std::vector<std::size_t>& A,
                   const std::vector<std::size_t>& B, double t) {
  std::vector<double> tb = g.heat(t, indicator(g.total_states(), B));
  return pair_with_indicator(*g.space(), A, tb);
}

double rho_set_exponent(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("rho must lie in [0,1)");
  double s = std::sqrt(rho);
  return (2.0 - s) / (1.0 - s);
}

double correlated_set_bound_rho(double rho, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::domain_error("eps must lie in [0,1]");
  return std::pow(eps, rho_set_exponent(rho));
}

std::optional<double> correlated_set_bound_kernel(double alpha, double eps) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::domain_error("alpha must lie in [0,1]");
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::domain_error("eps must lie in [0,1]");
  if (alpha == 0.0) return std::nullopt;  // K = (0 1; 1/2 1/2) has P{x in A, y in B} = 0
  if (alpha == 1.0) return eps * eps;     // independent coordinates
  return correlated_set_bound_rho(1.0 - alpha, eps);
}

double correlated_set_bound_improved(double rho, double eps, double kappa) {
  if (!(rho >= 0.0 && rho < 1.0)) throw std::domain_error("rho must lie in [0,1)");
  if (!(eps >= 0.0 && eps <= 1.0)) throw std::domain_error("eps must lie in [0,1]");
  return std::pow(eps, 2.0 / (1.0 - rho) + kappa * (1.0 - rho));
}

void CorrelatedProductInstance::validate() const {
  if (!factor) throw std::invalid_argument("correlated instance needs a factor space");
  if (n < 1) throw std::invalid_argument("correlated instance needs n >= 1");
  if (rho.has_value() == kernel.has_value())
    throw std::invalid_argument("set exactly one of rho / kernel coupling");
  if (rho && !(*rho >= 0.0 && *rho < 1.0))
    throw std::invalid_argument("rho must lie in [0,1)");
  if (kernel) {
    // x is drawn from the factor's mu; the kernel's nu = mu K semantics need
    // the same marginal, so the weights must agree, not just the sizes
    if (kernel->space->size() != factor->size())
      throw std::invalid_argument("kernel space does not match the factor");
    for (std::size_t i = 0; i < factor->size(); ++i)
      if (std::abs(kernel->space->mu(i) - factor->mu(i)) > 1e-12)
        throw std::invalid_argument("kernel space weights differ from the factor's");
  }
}

Eigen::MatrixXd CorrelatedProductInstance::coordinate_kernel() const {
  validate();
  if (kernel) return kernel->K;
  const Eigen::Index m = static_cast<Eigen::Index>(factor->size());
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index x = 0; x < m; ++x)
    for (Eigen::Index y = 0; y < m; ++y)
      K(x, y) = (1.0 - *rho) * factor->mu(static_cast<std::size_t>(y)) +
                (x == y ? *rho : 0.0);
  return K;
}

Eigen::VectorXd CorrelatedProductInstance::y_marginal() const {
  if (kernel) return kernel->nu;
  return Eigen::Map<const Eigen::VectorXd>(factor->mu().data(),
                                           static_cast<Eigen::Index>(factor->size()));
}

double exact_pair_probability(const CorrelatedProductInstance& inst,
                              const std::vector<std::size_t>& A,
                              const std::vector<std::size_t>& B) {
  inst.validate();
  const std::size_t m = inst.factor->size();
  std::size_t total = 1;
  for (int i = 0; i < inst.n; ++i) total *= m;
  std::vector<double> g = indicator(total, B);
  Eigen::MatrixXd K = inst.coordinate_kernel();
  std::vector<std::size_t> dims(static_cast<std::size_t>(inst.n), m);
  for (std::size_t mode = 0; mode < dims.size(); ++mode) apply_mode_matrix(g, dims, mode, K);
  double sum = 0.0;
  for (std::size_t idx : A) {
    double w = 1.0;
    std::size_t rest = idx;
    for (int i = 0; i < inst.n; ++i) {
      w *= inst.factor->mu(rest % m);
      rest /= m;
    }
    sum += w * g[idx];
  }
  return sum;
}

CorrelatedSampler::CorrelatedSampler(CorrelatedProductInstance inst, std::uint64_t seed)
    : inst_(std::move(inst)), rng_(seed) {
  inst_.validate();
  const std::size_t m = inst_.factor->size();
  mu_cdf_.resize(m);
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) mu_cdf_[i] = (acc += inst_.factor->mu(i));
  Eigen::MatrixXd K = inst_.coordinate_kernel();
  kernel_cdf_.resize(m * m);
  for (std::size_t x = 0; x < m; ++x) {
    acc = 0.0;
    for (std::size_t y = 0; y < m; ++y)
      kernel_cdf_[x * m + y] =
          (acc += K(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y)));
  }
}

std::pair<std::vector<int>, std::vector<int>> CorrelatedSampler::next() {
  const std::size_t m = inst_.factor->size();
  std::vector<int> x(static_cast<std::size_t>(inst_.n)), y(x.size());
  auto draw = [&](const double* cdf) {
    double u = rng_.uniform01();
    std::size_t i = 0;
    while (i + 1 < m && u >= cdf[i]) ++i;
    return static_cast<int>(i);
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = draw(mu_cdf_.data());
    y[i] = draw(kernel_cdf_.data() + static_cast<std::size_t>(x[i]) * m);
  }
  return {std::move(x), std::move(y)};
}

WilsonInterval wilson99(long successes, long trials) {
  if (trials <= 0) throw std::domain_error("wilson99 needs trials > 0");
  const double z = 2.5758293035489004;  // 99.5th percentile of N(0,1)
  double n = static_cast<double>(trials);
  double phat = static_cast<double>(successes) / n;
  double z2 = z * z;
  double denom = 1.0 + z2 / n;
  double center = (phat + z2 / (2.0 * n)) / denom;
  double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  return {phat, std::max(0.0, center - half), std::min(1.0, center + half)};
}

}  // namespace revhyp
