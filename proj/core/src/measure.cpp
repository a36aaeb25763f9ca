#include "revhyp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

namespace revhyp {

namespace {

constexpr double kWeightSumTol = 1e-12;
// Below this |p| the log-mean evaluation of the p-norm cancels
// catastrophically; a second-order expansion in p takes over.
constexpr double kNormSeriesBand = 1e-8;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

ProbabilitySpace::ProbabilitySpace(std::vector<std::string> labels, std::vector<double> mu)
    : labels_(std::move(labels)), mu_(std::move(mu)) {
  if (mu_.empty()) fail("probability space needs at least one point");
  if (labels_.size() != mu_.size()) fail("labels/mu size mismatch");
  if (mu_.size() > kMaxPoints) fail("probability space exceeds the point cap");
  double sum = 0.0;
  for (double w : mu_) {
    if (!(w > 0.0)) fail("probability weights must be strictly positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) fail("probability weights must sum to 1");
  std::unordered_set<std::string> seen(labels_.begin(), labels_.end());
  if (seen.size() != labels_.size()) fail("point labels must be unique");
}

std::size_t ProbabilitySpace::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) fail("unknown point label: " + label);
  return static_cast<std::size_t>(it - labels_.begin());
}

SpacePtr make_space(std::vector<std::string> labels, std::vector<double> mu) {
  return std::make_shared<const ProbabilitySpace>(std::move(labels), std::move(mu));
}

SpacePtr uniform_space(std::size_t n) {
  std::vector<std::string> labels(n);
  for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
  return make_space(std::move(labels), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

SpacePtr two_point_space(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail("two-point weight must lie in (0,1)");
  return make_space({"0", "1"}, {alpha, 1.0 - alpha});
}

SpacePtr product_space(const std::vector<SpacePtr>& factors) {
  if (factors.empty()) fail("product space needs at least one factor");
  std::size_t total = 1;
  for (const auto& f : factors) {
    if (total > ProbabilitySpace::kMaxPoints / f->size())
      fail("product space exceeds the point cap");
    total *= f->size();
  }
  std::vector<std::string> labels(total);
  std::vector<double> mu(total, 1.0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    std::size_t rest = idx;
    std::string label;
    double w = 1.0;
    for (const auto& f : factors) {
      std::size_t digit = rest % f->size();
      rest /= f->size();
      if (!label.empty()) label += '|';
      label += f->labels()[digit];
      w *= f->mu(digit);
    }
    labels[idx] = std::move(label);
    mu[idx] = w;
  }
  // Renormalize away accumulated rounding so the constructor's sum check holds.
  double sum = 0.0;
  for (double w : mu) sum += w;
  for (double& w : mu) w /= sum;
  return make_space(std::move(labels), std::move(mu));
}

RealFunction::RealFunction(SpacePtr space, std::vector<double> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (!space_) fail("function needs a space");
  if (values_.size() != space_->size()) fail("function length does not match its space");
  strictly_positive_ = std::all_of(values_.begin(), values_.end(),
                                   [](double v) { return v > 0.0; });
}

RealFunction RealFunction::constant(SpacePtr space, double c) {
  std::size_t n = space->size();
  return RealFunction(std::move(space), std::vector<double>(n, c));
}

RealFunction RealFunction::map(double (*fn)(double)) const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(values_[i]);
  return RealFunction(space_, std::move(out));
}

double weighted_sum(std::span<const double> weights, std::span<const double> values) {
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    double term = weights[i] * values[i];
    double t = sum + term;
    if (std::abs(sum) >= std::abs(term))
      comp += (sum - t) + term;
    else
      comp += (term - t) + sum;
    sum = t;
  }
  return sum + comp;
}

double expectation(const RealFunction& f) {
  return weighted_sum(f.space()->mu(), f.values());
}

double variance(const RealFunction& f) {
  double mean = expectation(f);
  const auto& mu = f.space()->mu();
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    double d = f[i] - mean;
    sq[i] = d * d;
  }
  return weighted_sum(mu, sq);
}

double covariance(const RealFunction& f, const RealFunction& g) {
  if (f.space() != g.space() && f.size() != g.size())
    fail("covariance of functions on different spaces");
  double mf = expectation(f), mg = expectation(g);
  std::vector<double> prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = (f[i] - mf) * (g[i] - mg);
  return weighted_sum(f.space()->mu(), prod);
}

double entropy(const RealFunction& f) {
  if (!f.strictly_positive())
    throw std::domain_error("entropy requires a strictly positive function");
  std::vector<double> flogf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) flogf[i] = f[i] * std::log(f[i]);
  double ef = expectation(f);
  return weighted_sum(f.space()->mu(), flogf) - ef * std::log(ef);
}

double holder_conjugate(double p) {
  if (!std::isfinite(p)) throw std::domain_error("exponent must be finite");
  if (p == 1.0) throw std::domain_error("p = 1 has no Holder conjugate");
  if (p == 0.0) return 0.0;
  return p / (p - 1.0);
}

namespace {

// log E e^{p u} with the max shifted out, weights mu.
double log_mean_exp(std::span<const double> mu, const std::vector<double>& u, double p) {
  double m = -std::numeric_limits<double>::infinity();
  for (double ui : u) m = std::max(m, p * ui);
  std::vector<double> e(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) e[i] = std::exp(p * u[i] - m);
  return m + std::log(weighted_sum(mu, e));
}

}  // namespace

double p_norm(const RealFunction& f, double p) {
  if (!std::isfinite(p)) throw std::domain_error("exponent must be finite");
  const auto& mu = f.space()->mu();
  if (p >= 1.0) {
    double m = 0.0;
    for (double v : f.values()) m = std::max(m, std::abs(v));
    if (m == 0.0) return 0.0;
    std::vector<double> pw(f.size());
    for (std::size_t i = 0; i < f.size(); ++i)
      pw[i] = std::pow(std::abs(f[i]) / m, p);
    return m * std::pow(weighted_sum(mu, pw), 1.0 / p);
  }
  if (!f.strictly_positive())
    throw std::domain_error("p-norms below 1 require a strictly positive function");
  std::vector<double> u(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) u[i] = std::log(f[i]);
  if (std::abs(p) < kNormSeriesBand) {
    // exp(E u + (p/2) Var u) is exact to O(p^2); avoids the 0/0 at p = 0.
    double mean = weighted_sum(mu, u);
    std::vector<double> sq(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
      double d = u[i] - mean;
      sq[i] = d * d;
    }
    return std::exp(mean + 0.5 * p * weighted_sum(mu, sq));
  }
  return std::exp(log_mean_exp(mu, u, p) / p);
}

double p_norm_nonneg(const RealFunction& f, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("p_norm_nonneg expects p in (0,1)");
  for (double v : f.values())
    if (v < 0.0) throw std::domain_error("p_norm_nonneg expects a nonnegative function");
  std::vector<double> pw(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) pw[i] = std::pow(f[i], p);
  double m = weighted_sum(f.space()->mu(), pw);
  return m <= 0.0 ? 0.0 : std::pow(m, 1.0 / p);
}

}  // namespace revhyp
