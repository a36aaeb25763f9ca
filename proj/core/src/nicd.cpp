#include "revhyp/nicd.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "revhyp/parallel.hpp"
#include "revhyp/rng.hpp"
#include "revhyp/tensor_ops.hpp"

namespace revhyp {

void NicdConfig::validate() const {
  if (m < 2) throw std::invalid_argument("nicd needs m >= 2 faces");
  if (n < 1) throw std::invalid_argument("nicd needs n >= 1");
  if (k < 2) throw std::invalid_argument("nicd needs k >= 2 players");
  if (!(rho >= 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in [0,1)");
  if (trials < 1) throw std::invalid_argument("trials must be positive");
}

Protocol Protocol::dictator(int m, int n, int coord) {
  if (coord < 0 || coord >= n) throw std::invalid_argument("dictator coordinate out of range");
  Protocol p(Kind::dictator, m, n);
  p.coord_ = coord;
  return p;
}

Protocol Protocol::plurality(int m, int n) { return Protocol(Kind::plurality, m, n); }

Protocol Protocol::from_table(int m, int n, std::vector<std::uint8_t> table) {
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) {
    if (total > kNicdExactCap / static_cast<std::size_t>(m))
      throw std::invalid_argument("table protocol exceeds the exact cap");
    total *= static_cast<std::size_t>(m);
  }
  if (table.size() != total) throw std::invalid_argument("protocol table must have m^n entries");
  for (std::uint8_t v : table)
    if (v >= m) throw std::invalid_argument("protocol outputs must lie in [0,m)");
  Protocol p(Kind::table, m, n);
  p.table_ = std::move(table);
  return p;
}

int Protocol::evaluate(std::span<const std::uint8_t> x) const {
  switch (kind_) {
    case Kind::dictator:
      return x[static_cast<std::size_t>(coord_)];
    case Kind::plurality: {
      int counts[256] = {0};
      for (std::uint8_t face : x) ++counts[face];
      int best = 0;
      for (int f = 0; f < m_; ++f) best = std::max(best, counts[f]);
      for (std::uint8_t face : x)
        if (counts[face] == best) return face;
      return 0;  // unreachable for nonempty x
    }
    case Kind::table: {
      std::size_t idx = 0, mult = 1;
      for (std::size_t i = 0; i < x.size(); ++i) {
        idx += static_cast<std::size_t>(x[i]) * mult;
        mult *= static_cast<std::size_t>(m_);
      }
      return table_[idx];
    }
  }
  return 0;
}

std::vector<std::uint8_t> Protocol::tabulate() const {
  std::size_t total = 1;
  for (int i = 0; i < n_; ++i) {
    if (total > kNicdExactCap / static_cast<std::size_t>(m_))
      throw std::length_error("protocol too large to tabulate");
    total *= static_cast<std::size_t>(m_);
  }
  std::vector<std::uint8_t> out(total);
  std::vector<std::uint8_t> x(static_cast<std::size_t>(n_), 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    out[idx] = static_cast<std::uint8_t>(evaluate(x));
    for (int i = 0; i < n_; ++i) {
      if (++x[static_cast<std::size_t>(i)] < m_) break;
      x[static_cast<std::size_t>(i)] = 0;
    }
  }
  return out;
}

bool Protocol::balanced_exact() const {
  auto table = tabulate();
  std::vector<std::size_t> counts(static_cast<std::size_t>(m_), 0);
  for (std::uint8_t v : table) ++counts[v];
  for (std::size_t c : counts)
    if (c * static_cast<std::size_t>(m_) != table.size()) return false;
  return true;
}

bool Protocol::operator==(const Protocol& other) const {
  return kind_ == other.kind_ && m_ == other.m_ && n_ == other.n_ &&
         coord_ == other.coord_ && table_ == other.table_;
}

namespace {

Eigen::MatrixXd noise_kernel(int m, double rho) {
  Eigen::MatrixXd K = Eigen::MatrixXd::Constant(m, m, (1.0 - rho) / m);
  K.diagonal().array() += rho;
  return K;
}

std::size_t pow_size(int m, int n) {
  std::size_t total = 1;
  for (int i = 0; i < n; ++i) total *= static_cast<std::size_t>(m);
  return total;
}

void check_balanced(const NicdConfig& cfg, const std::vector<Protocol>& protocols) {
  for (const auto& p : protocols) {
    if (p.m() != cfg.m || p.n() != cfg.n)
      throw std::invalid_argument("protocol shape does not match the configuration");
    if (pow_size(cfg.m, cfg.n) <= kNicdExactCap) {
      if (!p.balanced_exact()) throw std::invalid_argument("protocol is not balanced");
    } else if (p.kind() == Protocol::Kind::table) {
      throw std::invalid_argument("table protocols above the exact cap cannot be validated");
    }
    // dictator and plurality are balanced by symmetry at every n
  }
}

// T_t f_{p,j} for every face j of one protocol; t = log(1/rho).
std::vector<std::vector<double>> smoothed_indicators(const NicdConfig& cfg,
                                                     const Protocol& protocol) {
  const std::size_t total = pow_size(cfg.m, cfg.n);
  auto table = protocol.tabulate();
  Eigen::MatrixXd K = noise_kernel(cfg.m, cfg.rho);
  std::vector<std::size_t> dims(static_cast<std::size_t>(cfg.n),
                                static_cast<std::size_t>(cfg.m));
  std::vector<std::vector<double>> g(static_cast<std::size_t>(cfg.m));
  for (int j = 0; j < cfg.m; ++j) {
    std::vector<double> f(total, 0.0);
    for (std::size_t x = 0; x < total; ++x)
      if (table[x] == j) f[x] = 1.0;
    for (std::size_t mode = 0; mode < dims.size(); ++mode) apply_mode_matrix(f, dims, mode, K);
    g[static_cast<std::size_t>(j)] = std::move(f);
  }
  return g;
}

}  // namespace

AgreementResult agreement_probability_mc(const NicdConfig& cfg,
                                         const std::vector<Protocol>& protocols, int jobs) {
  cfg.validate();
  if (static_cast<int>(protocols.size()) != cfg.k)
    throw std::invalid_argument("one protocol per player expected");
  check_balanced(cfg, protocols);

  constexpr long kBatch = 4096;
  const long batches = (cfg.trials + kBatch - 1) / kBatch;
  std::vector<long> agree(static_cast<std::size_t>(batches), 0);
  parallel_for(jobs, static_cast<std::size_t>(batches), [&](std::size_t b) {
    Rng rng(derive_seed(cfg.seed, b));
    long count = std::min(kBatch, cfg.trials - static_cast<long>(b) * kBatch);
    std::vector<std::uint8_t> x(static_cast<std::size_t>(cfg.n));
    std::vector<std::uint8_t> y(static_cast<std::size_t>(cfg.n));
    long hits = 0;
    for (long trial = 0; trial < count; ++trial) {
      for (auto& xi : x)
        xi = static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(cfg.m)));
      int first = -1;
      bool all_equal = true;
      for (int player = 0; player < cfg.k; ++player) {
        for (std::size_t i = 0; i < x.size(); ++i)
          y[i] = rng.bernoulli(cfg.rho)
                     ? x[i]
                     : static_cast<std::uint8_t>(rng.below(static_cast<std::uint64_t>(cfg.m)));
        int out = protocols[static_cast<std::size_t>(player)].evaluate(y);
        if (player == 0)
          first = out;
        else
          all_equal = all_equal && out == first;
        // keep drawing the remaining players' strings so the stream layout
        // stays fixed even once agreement has already failed
      }
      if (all_equal) ++hits;
    }
    agree[b] = hits;
  });
  long hits = 0;
  for (long h : agree) hits += h;
  AgreementResult result;
  result.trials = cfg.trials;
  result.ci = wilson99(hits, cfg.trials);
  result.estimate = result.ci->estimate;
  result.exact = false;
  return result;
}

AgreementResult agreement_probability(const NicdConfig& cfg,
                                      const std::vector<Protocol>& protocols, int jobs) {
  cfg.validate();
  if (static_cast<int>(protocols.size()) != cfg.k)
    throw std::invalid_argument("one protocol per player expected");
  const std::size_t total = pow_size(cfg.m, cfg.n);
  if (total > kNicdExactCap || cfg.k > 8) return agreement_probability_mc(cfg, protocols, jobs);
  check_balanced(cfg, protocols);

  // distinct protocols only; repeated players reuse the same smoothed tables
  std::vector<const Protocol*> distinct;
  std::vector<std::size_t> which(protocols.size());
  for (std::size_t i = 0; i < protocols.size(); ++i) {
    std::size_t found = distinct.size();
    for (std::size_t d = 0; d < distinct.size(); ++d)
      if (*distinct[d] == protocols[i]) {
        found = d;
        break;
      }
    if (found == distinct.size()) distinct.push_back(&protocols[i]);
    which[i] = found;
  }
  std::vector<std::vector<std::vector<double>>> smoothed;
  smoothed.reserve(distinct.size());
  for (const Protocol* p : distinct) smoothed.push_back(smoothed_indicators(cfg, *p));

  double prob = 0.0;
  const double weight = 1.0 / static_cast<double>(total);
  for (int j = 0; j < cfg.m; ++j) {
    double face_sum = 0.0;
    for (std::size_t x = 0; x < total; ++x) {
      double prod = 1.0;
      for (std::size_t player = 0; player < which.size(); ++player)
        prod *= smoothed[which[player]][static_cast<std::size_t>(j)][x];
      face_sum += prod;
    }
    prob += weight * face_sum;
  }
  AgreementResult result;
  result.estimate = prob;
  result.exact = true;
  return result;
}

double holder_upper_bound(const NicdConfig& cfg, const std::vector<Protocol>& protocols) {
  cfg.validate();
  const std::size_t total = pow_size(cfg.m, cfg.n);
  if (total > kNicdExactCap) throw std::length_error("holder bound needs the exact regime");
  const double weight = 1.0 / static_cast<double>(total);
  // one smoothing pass per distinct protocol
  std::vector<const Protocol*> distinct;
  std::vector<std::size_t> which(protocols.size());
  for (std::size_t i = 0; i < protocols.size(); ++i) {
    std::size_t found = distinct.size();
    for (std::size_t d = 0; d < distinct.size(); ++d)
      if (*distinct[d] == protocols[i]) {
        found = d;
        break;
      }
    if (found == distinct.size()) distinct.push_back(&protocols[i]);
    which[i] = found;
  }
  std::vector<std::vector<std::vector<double>>> smoothed;
  smoothed.reserve(distinct.size());
  for (const Protocol* p : distinct) smoothed.push_back(smoothed_indicators(cfg, *p));

  double bound = 0.0;
  for (int j = 0; j < cfg.m; ++j) {
    double prod = 1.0;
    for (std::size_t player = 0; player < protocols.size(); ++player) {
      const auto& g = smoothed[which[player]][static_cast<std::size_t>(j)];
      double kth = 0.0;
      for (double v : g) kth += weight * std::pow(v, cfg.k);
      prod *= std::pow(kth, 1.0 / cfg.k);
    }
    bound += prod;
  }
  return bound;
}

double power_bound_exponent(double rho) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::domain_error("rho must lie in (0,1)");
  double s = std::sqrt(rho);
  return (1.0 - 1e-3) * 2.0 * (1.0 - s) / s;
}

PowerBoundCheck power_bound_check(int m, int n, const std::vector<std::uint8_t>& indicator,
                                  double rho, const std::vector<int>& ks) {
  const std::size_t total = pow_size(m, n);
  if (total > kNicdExactCap) throw std::length_error("power bound needs the exact regime");
  if (indicator.size() != total) throw std::invalid_argument("indicator must have m^n entries");
  std::vector<double> f(total);
  double mean = 0.0;
  for (std::size_t i = 0; i < total; ++i) mean += (f[i] = indicator[i] ? 1.0 : 0.0);
  mean /= static_cast<double>(total);
  if (mean > 0.5 + 1e-12) throw std::domain_error("power bound requires E f <= 1/2");

  Eigen::MatrixXd K = noise_kernel(m, rho);
  std::vector<std::size_t> dims(static_cast<std::size_t>(n), static_cast<std::size_t>(m));
  for (std::size_t mode = 0; mode < dims.size(); ++mode) apply_mode_matrix(f, dims, mode, K);

  PowerBoundCheck check;
  check.beta = power_bound_exponent(rho);
  auto lhs_at = [&](int k) {
    double acc = 0.0;
    for (double v : f) acc += std::pow(v, k);
    return acc / static_cast<double>(total);
  };
  check.calibration_c = lhs_at(2) * std::pow(2.0, check.beta);
  for (int k : ks) {
    double lhs = lhs_at(k);
    check.rows.push_back({k, lhs, check.calibration_c * std::pow(k, -check.beta)});
  }
  check.k_dominating = 0;
  for (std::size_t i = check.rows.size(); i-- > 0;) {
    if (check.rows[i].lhs <= check.rows[i].envelope * (1.0 + 1e-12))
      check.k_dominating = check.rows[i].k;
    else
      break;
  }
  return check;
}

double upper_bound_envelope(int m, double rho, double k, double calibration_c) {
  return static_cast<double>(m) * calibration_c * std::pow(k, -power_bound_exponent(rho));
}

std::vector<SweepRow> plurality_lower_sweep(int m, double rho, const std::vector<int>& ks,
                                            int n, long trials, std::uint64_t seed, int jobs) {
  std::vector<SweepRow> rows;
  double calibration = 1.0;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    NicdConfig cfg{m, n, ks[i], rho, trials, derive_seed(seed, i)};
    std::vector<Protocol> protocols(static_cast<std::size_t>(ks[i]), Protocol::plurality(m, n));
    AgreementResult r = agreement_probability_mc(cfg, protocols, jobs);
    double envelope;
    if (rho > 0.0) {
      if (i == 0)
        calibration = r.estimate *
                      std::pow(static_cast<double>(ks[i]), power_bound_exponent(rho)) /
                      static_cast<double>(m);
      envelope = upper_bound_envelope(m, rho, ks[i], calibration);
    } else {
      // independent sources: the agreement is m^{1-k} exactly, no power
      // envelope applies
      envelope = std::pow(static_cast<double>(m), 1.0 - ks[i]);
    }
    rows.push_back({ks[i], r.estimate, r.ci->lo, r.ci->hi, envelope});
  }
  return rows;
}

}  // namespace revhyp
