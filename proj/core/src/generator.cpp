#include "revhyp/generator.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "revhyp/tensor_ops.hpp"

namespace revhyp {

namespace {

Eigen::VectorXd mu_vector(const ProbabilitySpace& space) {
  return Eigen::Map<const Eigen::VectorXd>(space.mu().data(),
                                           static_cast<Eigen::Index>(space.size()));
}

Eigen::VectorXd to_vec(const RealFunction& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.values().data(),
                                           static_cast<Eigen::Index>(f.size()));
}

RealFunction from_vec(const SpacePtr& space, const Eigen::VectorXd& v) {
  return RealFunction(space, std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

std::string ValidationReport::str() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) os << "; ";
    os << violations[i].axiom << " (magnitude " << violations[i].magnitude << ")";
  }
  return os.str();
}

GeneratorValidationError::GeneratorValidationError(ValidationReport report)
    : std::runtime_error("generator axioms violated: " + report.str()),
      report_(std::move(report)) {}

struct Generator::Impl {
  SpacePtr space;
  Eigen::MatrixXd L;

  mutable std::once_flag spectral_once;
  mutable Eigen::VectorXd eigenvalues;   // ascending, clamped at 0
  mutable Eigen::MatrixXd eigenvectors;  // of the symmetrized matrix
  mutable Eigen::VectorXd sqrt_mu, inv_sqrt_mu;

  void ensure_spectral() const {
    std::call_once(spectral_once, [this] {
      const Eigen::Index n = L.rows();
      Eigen::VectorXd mu = mu_vector(*space);
      sqrt_mu = mu.array().sqrt();
      inv_sqrt_mu = sqrt_mu.array().inverse();
      Eigen::MatrixXd B = sqrt_mu.asDiagonal() * L * inv_sqrt_mu.asDiagonal();
      B = 0.5 * (B + B.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
      eigenvalues = solver.eigenvalues();
      for (Eigen::Index i = 0; i < n; ++i)
        if (eigenvalues[i] < 0.0 && eigenvalues[i] >= -kAxiomTol) eigenvalues[i] = 0.0;
      eigenvectors = solver.eigenvectors();
    });
  }
};

const SpacePtr& Generator::space() const { return impl_->space; }
const Eigen::MatrixXd& Generator::matrix() const { return impl_->L; }
std::size_t Generator::size() const { return impl_->space->size(); }

const Eigen::VectorXd& Generator::eigenvalues() const {
  impl_->ensure_spectral();
  return impl_->eigenvalues;
}

Eigen::VectorXd Generator::heat_vec(double t, const Eigen::VectorXd& f) const {
  impl_->ensure_spectral();
  const auto& impl = *impl_;
  Eigen::VectorXd w = impl.eigenvectors.transpose() * (impl.sqrt_mu.asDiagonal() * f);
  w = (w.array() * (-t * impl.eigenvalues.array()).exp()).matrix();
  return impl.inv_sqrt_mu.asDiagonal() * (impl.eigenvectors * w);
}

Eigen::VectorXd Generator::apply(const Eigen::VectorXd& f) const { return impl_->L * f; }

// Negative t is allowed here; this is the explicitly unchecked routine used
// only by kernel_decompose.
Eigen::MatrixXd heat_matrix_unchecked(const Generator& g, double t) {
  g.impl_->ensure_spectral();
  const auto& impl = *g.impl_;
  Eigen::MatrixXd core =
      impl.eigenvectors *
      (-t * impl.eigenvalues.array()).exp().matrix().asDiagonal() *
      impl.eigenvectors.transpose();
  return impl.inv_sqrt_mu.asDiagonal() * core * impl.sqrt_mu.asDiagonal();
}

ValidationReport check_generator(const Eigen::MatrixXd& L, const ProbabilitySpace& space) {
  ValidationReport report;
  const Eigen::Index n = L.rows();
  if (L.cols() != n || static_cast<std::size_t>(n) != space.size()) {
    report.violations.push_back({"shape", 0.0});
    return report;
  }
  const double tol = Generator::kAxiomTol;

  double row = (L * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff();
  if (row > tol) report.violations.push_back({"L1 = 0", row});

  Eigen::VectorXd mu = mu_vector(space);
  double sym = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j)
      sym = std::max(sym, std::abs(mu[i] * L(i, j) - mu[j] * L(j, i)));
  if (sym > tol) report.violations.push_back({"mu-self-adjointness", sym});

  double offdiag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j) offdiag = std::max(offdiag, L(i, j));
  if (offdiag > tol) report.violations.push_back({"maximum principle", offdiag});

  // PSD is only meaningful once the matrix is (nearly) mu-self-adjoint.
  if (sym <= 1e-6) {
    Eigen::VectorXd sq = mu.array().sqrt();
    Eigen::MatrixXd B = sq.asDiagonal() * L * sq.cwiseInverse().asDiagonal();
    B = 0.5 * (B + B.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B, Eigen::EigenvaluesOnly);
    double lo = solver.eigenvalues().minCoeff();
    if (lo < -tol) report.violations.push_back({"positive semidefiniteness", -lo});
  }
  return report;
}

Generator validate_generator(Eigen::MatrixXd L, SpacePtr space) {
  ValidationReport report = check_generator(L, *space);
  if (!report.ok()) throw GeneratorValidationError(std::move(report));
  auto impl = std::make_shared<Generator::Impl>();
  impl->space = std::move(space);
  impl->L = std::move(L);
  return Generator(std::move(impl));
}

Generator simple_generator(SpacePtr space) {
  const Eigen::Index n = static_cast<Eigen::Index>(space->size());
  Eigen::VectorXd mu = mu_vector(*space);
  Eigen::MatrixXd L = Eigen::MatrixXd::Identity(n, n);
  L.rowwise() -= mu.transpose();
  return validate_generator(std::move(L), std::move(space));
}

RealFunction heat_operator(const Generator& g, double t, const RealFunction& f) {
  if (t < 0.0) throw std::domain_error("heat operator requires t >= 0");
  if (f.space()->size() != g.size()) throw std::invalid_argument("function/generator size mismatch");
  return from_vec(g.space(), g.heat_vec(t, to_vec(f)));
}

double dirichlet_form(const Generator& g, const RealFunction& f, const RealFunction& h) {
  Eigen::VectorXd Lh = g.apply(to_vec(h));
  std::vector<double> prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * Lh[static_cast<Eigen::Index>(i)];
  return weighted_sum(g.space()->mu(), prod);
}

double dirichlet_form_pairsum(const Generator& g, const RealFunction& f, const RealFunction& h) {
  const auto& L = g.matrix();
  const auto& mu = g.space()->mu();
  const Eigen::Index n = L.rows();
  double sum = 0.0;
  for (Eigen::Index x = 0; x < n; ++x)
    for (Eigen::Index y = 0; y < n; ++y) {
      if (x == y) continue;
      sum += mu[static_cast<std::size_t>(x)] * L(x, y) *
             (f[static_cast<std::size_t>(x)] - f[static_cast<std::size_t>(y)]) *
             (h[static_cast<std::size_t>(x)] - h[static_cast<std::size_t>(y)]);
    }
  return -0.5 * sum;
}

SpectralGapResult spectral_gap(const Generator& g) {
  const Eigen::VectorXd& ev = g.eigenvalues();
  SpectralGapResult result;
  int zeros = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] <= Generator::kAxiomTol)
      ++zeros;
    else
      gap = std::min(gap, ev[i]);
  }
  result.reducible = zeros != 1;
  result.gap = std::isfinite(gap) ? gap : 0.0;
  return result;
}

TensorGenerator::TensorGenerator(std::vector<Generator> factors, std::vector<double> rates)
    : factors_(std::move(factors)), rates_(std::move(rates)) {
  if (factors_.empty()) throw std::invalid_argument("tensor generator needs factors");
  if (rates_.empty()) rates_.assign(factors_.size(), 1.0);
  if (rates_.size() != factors_.size())
    throw std::invalid_argument("one rate per factor expected");
  total_ = 1;
  for (const auto& f : factors_) total_ *= f.size();
}

const SpacePtr& TensorGenerator::space() const {
  if (!space_) {
    std::vector<SpacePtr> spaces;
    spaces.reserve(factors_.size());
    for (const auto& f : factors_) spaces.push_back(f.space());
    space_ = product_space(spaces);
  }
  return space_;
}

Generator TensorGenerator::materialize() const {
  if (total_ > kMaterializeCap)
    throw std::length_error("tensor generator too large to materialize");
  const Eigen::Index n = static_cast<Eigen::Index>(total_);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  std::vector<std::size_t> dims;
  for (const auto& f : factors_) dims.push_back(f.size());
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    const Eigen::MatrixXd& Lk = factors_[k].matrix();
    for (std::size_t s = 0; s < total_; ++s) {
      std::size_t stride = 1;
      for (std::size_t j = 0; j < k; ++j) stride *= dims[j];
      std::size_t digit = (s / stride) % dims[k];
      std::size_t base = s - digit * stride;
      for (std::size_t d = 0; d < dims[k]; ++d)
        L(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(base + d * stride)) +=
            rates_[k] * Lk(static_cast<Eigen::Index>(digit), static_cast<Eigen::Index>(d));
    }
  }
  return validate_generator(std::move(L), space());
}

std::vector<double> TensorGenerator::heat(double t, std::vector<double> f) const {
  if (t < 0.0) throw std::domain_error("heat operator requires t >= 0");
  if (f.size() != total_) throw std::invalid_argument("length mismatch");
  std::vector<std::size_t> dims;
  for (const auto& fac : factors_) dims.push_back(fac.size());
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    Eigen::MatrixXd Tk = heat_matrix_unchecked(factors_[k], t * rates_[k]);
    apply_mode_matrix(f, dims, k, Tk);
  }
  return f;
}

RealFunction TensorGenerator::heat(double t, const RealFunction& f) const {
  return RealFunction(f.space(), heat(t, f.values()));
}

MarkovKernel::MarkovKernel(SpacePtr space_in, Eigen::MatrixXd K_in)
    : space(std::move(space_in)), K(std::move(K_in)) {
  const Eigen::Index n = static_cast<Eigen::Index>(space->size());
  if (K.rows() != n || K.cols() != n)
    throw std::invalid_argument("kernel shape does not match its space");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (K.row(i).minCoeff() < 0.0)
      throw std::invalid_argument("kernel entries must be nonnegative");
    if (std::abs(K.row(i).sum() - 1.0) > kRowTol)
      throw std::invalid_argument("kernel rows must sum to 1");
  }
  nu = K.transpose() * mu_vector(*space);
}

KernelAlpha kernel_alpha(const MarkovKernel& k) {
  const Eigen::Index n = k.K.rows();
  double alpha = std::numeric_limits<double>::infinity();
  for (Eigen::Index y = 0; y < n; ++y) {
    if (k.nu[y] <= 0.0) continue;
    for (Eigen::Index x = 0; x < n; ++x)
      alpha = std::min(alpha, k.K(x, y) / k.nu[y]);
  }
  if (!std::isfinite(alpha)) alpha = 0.0;  // no mass anywhere; degenerate
  alpha = std::min(alpha, 1.0);
  double alpha_star = alpha >= 1.0 ? std::numeric_limits<double>::infinity()
                                   : -std::log1p(-alpha);
  return {alpha, alpha_star};
}

KernelDecomposition kernel_decompose(const MarkovKernel& k) {
  KernelAlpha a = kernel_alpha(k);
  if (a.alpha <= 0.0)
    throw std::domain_error("kernel has min-atom alpha = 0; decomposition impossible");
  if (a.alpha >= 1.0)
    throw std::domain_error("kernel has alpha = 1 (jump to stationarity); decomposition degenerate");
  // S = T_{-alpha*} K = e^{alpha*} K - (e^{alpha*} - 1) E_nu.
  Generator simple = simple_generator(k.space);
  Eigen::MatrixXd S = heat_matrix_unchecked(simple, -a.alpha_star) * k.K;
  // Rows are stochastic up to roundoff by construction of alpha; tidy the
  // few-ulp negatives so the kernel constructor's validation passes honestly.
  for (Eigen::Index i = 0; i < S.rows(); ++i)
    for (Eigen::Index j = 0; j < S.cols(); ++j)
      if (S(i, j) < 0.0 && S(i, j) > -1e-13) S(i, j) = 0.0;
  return {MarkovKernel(k.space, std::move(S)), a.alpha_star};
}

void apply_mode_matrix(std::vector<double>& v, const std::vector<std::size_t>& dims,
                       std::size_t mode, const Eigen::MatrixXd& M) {
  std::size_t stride = 1;
  for (std::size_t k = 0; k < mode; ++k) stride *= dims[k];
  const std::size_t dim = dims[mode];
  const std::size_t block = stride * dim;
  const std::size_t total = v.size();
  std::vector<double> slice(dim), out(dim);
  for (std::size_t base = 0; base < total; base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      for (std::size_t d = 0; d < dim; ++d) slice[d] = v[base + off + d * stride];
      for (std::size_t i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j)
          acc += M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * slice[j];
        out[i] = acc;
      }
      for (std::size_t d = 0; d < dim; ++d) v[base + off + d * stride] = out[d];
    }
  }
}

}  // namespace revhyp
