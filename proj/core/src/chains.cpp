#include "revhyp/chains.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

namespace revhyp {

namespace {

// ---- shared state-space enumerations (build() and samplers must agree) ----

std::vector<std::vector<int>> all_permutations(int n) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 1);
  std::vector<std::vector<int>> out;
  do {
    out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::string perm_label(const std::vector<int>& perm) {
  std::string s;
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(perm[i]);
  }
  return s;
}

// tau = (a b) composed after sigma: swap the entries holding values a and b.
void apply_transposition(std::vector<int>& perm, int a, int b) {
  auto pa = std::find(perm.begin(), perm.end(), a);
  auto pb = std::find(perm.begin(), perm.end(), b);
  std::iter_swap(pa, pb);
}

std::vector<std::vector<int>> all_subsets(int n, int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> pick(static_cast<std::size_t>(r));
  std::iota(pick.begin(), pick.end(), 1);
  for (;;) {
    out.push_back(pick);
    int i = r - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - (r - 1 - i)) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < r; ++j)
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return out;
}

std::string subset_label(const std::vector<int>& set) {
  std::string s;
  for (std::size_t i = 0; i < set.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(set[i]);
  }
  return s;
}

struct Graph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;  // parallel edges allowed
};

Graph preset_graph(const ChainSpec& spec) {
  Graph g;
  if (spec.graph == "doubled-line") {
    g.vertices = spec.segments + 1;
    for (int i = 0; i < spec.segments; ++i) {
      g.edges.emplace_back(i, i + 1);
      g.edges.emplace_back(i, i + 1);
    }
  } else if (spec.graph == "cycle") {
    g.vertices = spec.m;
    for (int i = 0; i < spec.m; ++i) g.edges.emplace_back(i, (i + 1) % spec.m);
  } else if (spec.graph == "complete") {
    g.vertices = spec.m;
    for (int i = 0; i < spec.m; ++i)
      for (int j = i + 1; j < spec.m; ++j) g.edges.emplace_back(i, j);
  } else {
    throw std::invalid_argument("unknown spanning-tree graph preset: " + spec.graph);
  }
  return g;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  }
  bool join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[static_cast<std::size_t>(a)] = b;
    return true;
  }
};

bool is_spanning_tree(const Graph& g, const std::vector<int>& edge_ids) {
  if (static_cast<int>(edge_ids.size()) != g.vertices - 1) return false;
  UnionFind uf(g.vertices);
  for (int e : edge_ids) {
    auto [a, b] = g.edges[static_cast<std::size_t>(e)];
    if (!uf.join(a, b)) return false;
  }
  return true;
}

std::vector<std::vector<int>> enumerate_spanning_trees(const Graph& g, std::size_t cap) {
  std::vector<std::vector<int>> trees;
  int need = g.vertices - 1;
  int m = static_cast<int>(g.edges.size());
  if (need < 0 || need > m) return trees;
  std::vector<int> pick(static_cast<std::size_t>(need));
  std::iota(pick.begin(), pick.end(), 0);
  for (;;) {
    if (is_spanning_tree(g, pick)) {
      trees.push_back(pick);
      if (trees.size() > cap) return trees;  // caller treats > cap as refusal
    }
    int i = need - 1;
    while (i >= 0 && pick[static_cast<std::size_t>(i)] == m - (need - i)) --i;
    if (i < 0) break;
    ++pick[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < need; ++j)
      pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return trees;
}

// ---- Ising machinery ----

struct IsingBox {
  int w, h;
  std::vector<std::vector<int>> neighbors;  // in-box neighbor sites, row-major indexing
  std::vector<int> boundary_field;          // tau * (# neighbors outside the box)

  IsingBox(const ChainSpec& spec) : w(spec.width), h(spec.height) {
    int tau = spec.boundary == IsingBoundary::free_bc ? 0
              : spec.boundary == IsingBoundary::plus  ? 1
                                                      : -1;
    int sites = w * h;
    neighbors.resize(static_cast<std::size_t>(sites));
    boundary_field.assign(static_cast<std::size_t>(sites), 0);
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) {
        int u = r * w + c;
        const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
        for (int d = 0; d < 4; ++d) {
          int rr = r + dr[d], cc = c + dc[d];
          if (rr >= 0 && rr < h && cc >= 0 && cc < w)
            neighbors[static_cast<std::size_t>(u)].push_back(rr * w + cc);
          else
            boundary_field[static_cast<std::size_t>(u)] += tau;
        }
      }
  }

  int local_field(const std::vector<int>& spins, int u) const {
    int s = boundary_field[static_cast<std::size_t>(u)];
    for (int v : neighbors[static_cast<std::size_t>(u)]) s += spins[static_cast<std::size_t>(v)];
    return s;
  }

  double flip_rate(const ChainSpec& spec, const std::vector<int>& spins, int u) const {
    double x = 2.0 * spec.h * spins[static_cast<std::size_t>(u)] +
               2.0 * spec.beta * spins[static_cast<std::size_t>(u)] * local_field(spins, u);
    if (spec.rates == GlauberRates::metropolis) return std::min(1.0, std::exp(x));
    return 1.0 / (1.0 + std::exp(-x));
  }

  // -beta * (pair energy + boundary coupling) - h * magnetization, i.e. log mu + log Z
  double log_weight(const ChainSpec& spec, const std::vector<int>& spins) const {
    double pair = 0.0, field = 0.0, mag = 0.0;
    for (std::size_t u = 0; u < spins.size(); ++u) {
      for (int v : neighbors[u])
        if (static_cast<std::size_t>(v) > u) pair += spins[u] * spins[static_cast<std::size_t>(v)];
      field += boundary_field[u] * spins[u];
      mag += spins[u];
    }
    return -spec.beta * (pair + field) - spec.h * mag;
  }
};

std::vector<int> spins_of_mask(std::size_t mask, int sites) {
  std::vector<int> spins(static_cast<std::size_t>(sites));
  for (int i = 0; i < sites; ++i) spins[static_cast<std::size_t>(i)] = (mask >> i) & 1 ? 1 : -1;
  return spins;
}

std::string spin_label(const std::vector<int>& spins) {
  std::string s(spins.size(), '-');
  for (std::size_t i = 0; i < spins.size(); ++i)
    if (spins[i] > 0) s[i] = '+';
  return s;
}

SpacePtr factor_space(const ChainSpec& spec) {
  if (!spec.weights.empty()) {
    std::vector<std::string> labels(spec.weights.size());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(i);
    return make_space(std::move(labels), spec.weights);
  }
  return uniform_space(static_cast<std::size_t>(spec.m));
}

double binomial(int n, int r) {
  double v = 1.0;
  for (int i = 0; i < r; ++i) v = v * (n - i) / (i + 1);
  return v;
}

}  // namespace

ChainKind chain_kind_from_string(const std::string& name) {
  if (name == "simple") return ChainKind::simple;
  if (name == "product-walk") return ChainKind::product_walk;
  if (name == "random-transposition") return ChainKind::random_transposition;
  if (name == "top-to-random") return ChainKind::top_to_random;
  if (name == "bernoulli-laplace") return ChainKind::bernoulli_laplace;
  if (name == "spanning-tree-walk") return ChainKind::spanning_tree_walk;
  if (name == "glauber-ising") return ChainKind::glauber_ising;
  if (name == "qq-infinity-truncated" || name == "qq-infinity")
    return ChainKind::qq_infinity_truncated;
  throw std::invalid_argument("unknown chain kind: " + name);
}

std::string to_string(ChainKind kind) {
  switch (kind) {
    case ChainKind::simple: return "simple";
    case ChainKind::product_walk: return "product-walk";
    case ChainKind::random_transposition: return "random-transposition";
    case ChainKind::top_to_random: return "top-to-random";
    case ChainKind::bernoulli_laplace: return "bernoulli-laplace";
    case ChainKind::spanning_tree_walk: return "spanning-tree-walk";
    case ChainKind::glauber_ising: return "glauber-ising";
    case ChainKind::qq_infinity_truncated: return "qq-infinity-truncated";
  }
  return "?";
}

void ChainSpec::validate() const {
  auto bad = [](const std::string& msg) { throw std::invalid_argument(msg); };
  switch (kind) {
    case ChainKind::simple:
      if (weights.empty() && m < 2) bad("simple chain needs m >= 2 or explicit weights");
      break;
    case ChainKind::product_walk:
      if (n < 1) bad("product walk needs n >= 1 factors");
      if (weights.empty() && m < 2) bad("product walk needs m >= 2 or explicit weights");
      break;
    case ChainKind::random_transposition:
    case ChainKind::top_to_random:
      if (n < 2 || n > 8) bad("permutation walks support 2 <= n <= 8");
      break;
    case ChainKind::bernoulli_laplace:
      if (n < 2 || r < 1 || r >= n) bad("bernoulli-laplace needs 1 <= r < n");
      if (n > 20) bad("bernoulli-laplace supports n <= 20");
      break;
    case ChainKind::spanning_tree_walk:
      preset_graph(*this);  // validates the preset name and parameters
      if (graph == "doubled-line" && segments < 1) bad("doubled-line needs segments >= 1");
      if (graph != "doubled-line" && m < 3) bad("graph preset needs m >= 3");
      break;
    case ChainKind::glauber_ising:
      if (width < 1 || height < 1) bad("ising box needs positive dimensions");
      if (width * height > 16) bad("ising boxes are capped at 4x4 (16 spins)");
      if (beta < 0.0) bad("ising beta must be >= 0");
      break;
    case ChainKind::qq_infinity_truncated:
      if (!(lambda > 0.0)) bad("queue needs lambda > 0");
      if (trunc < 1 || trunc > 200) bad("queue truncation must lie in [1, 200]");
      break;
  }
}

std::size_t ChainSpec::state_count() const {
  switch (kind) {
    case ChainKind::simple:
      return weights.empty() ? static_cast<std::size_t>(m) : weights.size();
    case ChainKind::product_walk: {
      std::size_t base = weights.empty() ? static_cast<std::size_t>(m) : weights.size();
      std::size_t total = 1;
      for (int i = 0; i < n; ++i) total *= base;
      return total;
    }
    case ChainKind::random_transposition:
    case ChainKind::top_to_random: {
      std::size_t f = 1;
      for (int i = 2; i <= n; ++i) f *= static_cast<std::size_t>(i);
      return f;
    }
    case ChainKind::bernoulli_laplace:
      return static_cast<std::size_t>(binomial(n, r) + 0.5);
    case ChainKind::spanning_tree_walk: {
      if (graph == "doubled-line") return std::size_t{1} << segments;
      if (graph == "cycle") return static_cast<std::size_t>(m);
      // complete: Cayley's m^{m-2}
      std::size_t t = 1;
      for (int i = 0; i < m - 2; ++i) t *= static_cast<std::size_t>(m);
      return t;
    }
    case ChainKind::glauber_ising:
      return std::size_t{1} << (width * height);
    case ChainKind::qq_infinity_truncated:
      return static_cast<std::size_t>(trunc) + 1;
  }
  return 0;
}

std::string ChainSpec::describe() const {
  std::ostringstream os;
  os << to_string(kind);
  switch (kind) {
    case ChainKind::simple: os << "(m=" << m << ")"; break;
    case ChainKind::product_walk: os << "(n=" << n << ", m=" << m << ")"; break;
    case ChainKind::random_transposition:
    case ChainKind::top_to_random: os << "(n=" << n << ")"; break;
    case ChainKind::bernoulli_laplace: os << "(n=" << n << ", r=" << r << ")"; break;
    case ChainKind::spanning_tree_walk:
      os << "(" << graph << (graph == "doubled-line" ? ", segments=" + std::to_string(segments)
                                                     : ", m=" + std::to_string(m))
         << ")";
      break;
    case ChainKind::glauber_ising:
      os << "(" << width << "x" << height << ", beta=" << beta << ", h=" << h << ")";
      break;
    case ChainKind::qq_infinity_truncated:
      os << "(lambda=" << lambda << ", N=" << trunc << ")";
      break;
  }
  return os.str();
}

Generator build(const ChainSpec& spec) {
  spec.validate();
  if (spec.state_count() > kExplicitStateCap)
    throw SamplerOnlyError(spec.describe() + " exceeds the explicit-matrix cap; sampler only");

  switch (spec.kind) {
    case ChainKind::simple:
      return simple_generator(factor_space(spec));

    case ChainKind::product_walk: {
      std::vector<Generator> factors;
      factors.reserve(static_cast<std::size_t>(spec.n));
      for (int i = 0; i < spec.n; ++i) factors.push_back(simple_generator(factor_space(spec)));
      std::vector<double> rates(static_cast<std::size_t>(spec.n), 1.0 / spec.n);
      return TensorGenerator(std::move(factors), std::move(rates)).materialize();
    }

    case ChainKind::random_transposition:
    case ChainKind::top_to_random: {
      auto perms = all_permutations(spec.n);
      std::map<std::vector<int>, std::size_t> index;
      for (std::size_t i = 0; i < perms.size(); ++i) index[perms[i]] = i;
      std::vector<std::pair<int, int>> moves;
      if (spec.kind == ChainKind::random_transposition) {
        for (int a = 1; a <= spec.n; ++a)
          for (int b = a + 1; b <= spec.n; ++b) moves.emplace_back(a, b);
      } else {
        for (int b = 2; b <= spec.n; ++b) moves.emplace_back(1, b);
      }
      const std::size_t N = perms.size();
      Eigen::MatrixXd L = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(N),
                                                    static_cast<Eigen::Index>(N));
      double rate = 1.0 / static_cast<double>(moves.size());
      for (std::size_t i = 0; i < N; ++i)
        for (auto [a, b] : moves) {
          std::vector<int> next = perms[i];
          apply_transposition(next, a, b);
          L(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(index.at(next))) -= rate;
        }
      std::vector<std::string> labels(N);
      for (std::size_t i = 0; i < N; ++i) labels[i] = perm_label(perms[i]);
      return validate_generator(std::move(L),
                                make_space(std::move(labels), std::vector<double>(N, 1.0 / N)));
    }

    case ChainKind::bernoulli_laplace: {
      auto sets = all_subsets(spec.n, spec.r);
      std::map<std::vector<int>, std::size_t> index;
      for (std::size_t i = 0; i < sets.size(); ++i) index[sets[i]] = i;
      const std::size_t N = sets.size();
      Eigen::MatrixXd L = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(N),
                                                    static_cast<Eigen::Index>(N));
      double rate = 1.0 / (static_cast<double>(spec.r) * (spec.n - spec.r));
      for (std::size_t s = 0; s < N; ++s) {
        const auto& A = sets[s];
        std::vector<int> complement;
        for (int x = 1; x <= spec.n; ++x)
          if (!std::binary_search(A.begin(), A.end(), x)) complement.push_back(x);
        for (int i : A)
          for (int j : complement) {
            std::vector<int> next = A;
            next.erase(std::find(next.begin(), next.end(), i));
            next.insert(std::upper_bound(next.begin(), next.end(), j), j);
            L(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(index.at(next))) -= rate;
          }
      }
      std::vector<std::string> labels(N);
      for (std::size_t i = 0; i < N; ++i) labels[i] = subset_label(sets[i]);
      return validate_generator(std::move(L),
                                make_space(std::move(labels), std::vector<double>(N, 1.0 / N)));
    }

    case ChainKind::spanning_tree_walk: {
      Graph g = preset_graph(spec);
      auto trees = enumerate_spanning_trees(g, 12);
      if (trees.size() > 12)
        throw SamplerOnlyError("more than 12 spanning trees; sampler only");
      if (trees.empty()) throw std::invalid_argument("graph has no spanning tree");
      std::map<std::vector<int>, std::size_t> index;
      for (std::size_t i = 0; i < trees.size(); ++i) index[trees[i]] = i;
      const std::size_t N = trees.size();
      const double rate = 1.0 / (static_cast<double>(g.edges.size()) * (g.vertices - 1));
      Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N),
                                                static_cast<Eigen::Index>(N));
      for (std::size_t s = 0; s < N; ++s) {
        const auto& T = trees[s];
        for (int e = 0; e < static_cast<int>(g.edges.size()); ++e)
          for (int f : T) {
            std::vector<int> next = T;
            next.erase(std::find(next.begin(), next.end(), f));
            if (std::find(next.begin(), next.end(), e) == next.end())
              next.insert(std::lower_bound(next.begin(), next.end(), e), e);
            else
              next = T;  // T u {e} already contains e
            std::sort(next.begin(), next.end());
            if (next != T && is_spanning_tree(g, next)) {
              L(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(index.at(next))) -= rate;
              L(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) += rate;
            }
          }
      }
      std::vector<std::string> labels(N);
      for (std::size_t i = 0; i < N; ++i) labels[i] = "T{" + subset_label(trees[i]) + "}";
      return validate_generator(std::move(L),
                                make_space(std::move(labels), std::vector<double>(N, 1.0 / N)));
    }

    case ChainKind::glauber_ising: {
      IsingBox box(spec);
      const int sites = spec.width * spec.height;
      const std::size_t N = std::size_t{1} << sites;
      std::vector<double> logw(N);
      double logmax = -1e300;
      for (std::size_t mask = 0; mask < N; ++mask) {
        logw[mask] = box.log_weight(spec, spins_of_mask(mask, sites));
        logmax = std::max(logmax, logw[mask]);
      }
      std::vector<double> mu(N);
      double z = 0.0;
      for (std::size_t mask = 0; mask < N; ++mask) z += (mu[mask] = std::exp(logw[mask] - logmax));
      for (double& w : mu) w /= z;
      Eigen::MatrixXd L = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N),
                                                static_cast<Eigen::Index>(N));
      std::vector<std::string> labels(N);
      for (std::size_t mask = 0; mask < N; ++mask) {
        auto spins = spins_of_mask(mask, sites);
        labels[mask] = spin_label(spins);
        double total = 0.0;
        for (int u = 0; u < sites; ++u) {
          double c = box.flip_rate(spec, spins, u);
          L(static_cast<Eigen::Index>(mask),
            static_cast<Eigen::Index>(mask ^ (std::size_t{1} << u))) = -c;
          total += c;
        }
        L(static_cast<Eigen::Index>(mask), static_cast<Eigen::Index>(mask)) = total;
      }
      return validate_generator(std::move(L), make_space(std::move(labels), std::move(mu)));
    }

    case ChainKind::qq_infinity_truncated: {
      // Birth-death form implied by the paper's finite-n display (birth
      // lambda, death k); the displayed infinite-n generator has inconsistent
      // signs and is not used. The birth rate at N is deleted (reflection).
      const int N = spec.trunc;
      std::vector<double> logpi(static_cast<std::size_t>(N) + 1);
      logpi[0] = 0.0;
      for (int k = 1; k <= N; ++k)
        logpi[static_cast<std::size_t>(k)] =
            logpi[static_cast<std::size_t>(k - 1)] + std::log(spec.lambda) - std::log(k);
      double logmax = *std::max_element(logpi.begin(), logpi.end());
      std::vector<double> mu(logpi.size());
      double z = 0.0;
      for (std::size_t k = 0; k < mu.size(); ++k) z += (mu[k] = std::exp(logpi[k] - logmax));
      for (double& w : mu) w /= z;
      Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N + 1, N + 1);
      for (int k = 0; k <= N; ++k) {
        double out = 0.0;
        if (k < N) {
          L(k, k + 1) = -spec.lambda;
          out += spec.lambda;
        }
        if (k > 0) {
          L(k, k - 1) = -static_cast<double>(k);
          out += k;
        }
        L(k, k) = out;
      }
      std::vector<std::string> labels(static_cast<std::size_t>(N) + 1);
      for (int k = 0; k <= N; ++k) labels[static_cast<std::size_t>(k)] = std::to_string(k);
      return validate_generator(std::move(L), make_space(std::move(labels), std::move(mu)));
    }
  }
  throw std::invalid_argument("unknown chain kind");
}

std::optional<KnownBounds> known_constant_bounds(const ChainSpec& spec) {
  switch (spec.kind) {
    case ChainKind::random_transposition:
    case ChainKind::top_to_random:
      return KnownBounds{1, (spec.n - 1) / 2.0, 2.0 * (spec.n - 1), ""};
    case ChainKind::bernoulli_laplace: {
      double rn = static_cast<double>(spec.r) * (spec.n - spec.r) / spec.n;
      return KnownBounds{1, rn / 2.0, 2.0 * rn, ""};
    }
    case ChainKind::spanning_tree_walk: {
      Graph g = preset_graph(spec);
      return KnownBounds{2, std::nullopt,
                         static_cast<double>(g.vertices) * static_cast<double>(g.edges.size()),
                         ""};
    }
    case ChainKind::glauber_ising:
      return KnownBounds{2, std::nullopt, std::nullopt,
                         "uniform bound exists under strong spatial mixing; value unspecified"};
    default:
      return std::nullopt;
  }
}

// ---- trajectory sampling ----

struct TrajectorySampler::Impl {
  ChainSpec spec;
  Rng rng;
  double time = 0.0;
  long jumps = 0;

  // per-kind state
  int point = 0;                  // simple, queue
  std::vector<int> coords;        // product walk
  std::vector<int> perm;          // permutation walks
  std::vector<int> subset, rest;  // bernoulli-laplace
  std::vector<int> tree;          // spanning tree edge ids
  std::vector<int> spins;         // ising
  Graph graph;
  std::optional<IsingBox> box;
  std::vector<long> refresh_counts;

  Impl(ChainSpec s, std::uint64_t seed) : spec(std::move(s)), rng(seed) {
    spec.validate();
    switch (spec.kind) {
      case ChainKind::simple:
        point = 0;
        break;
      case ChainKind::product_walk:
        coords.assign(static_cast<std::size_t>(spec.n), 0);
        refresh_counts.assign(static_cast<std::size_t>(spec.n), 0);
        break;
      case ChainKind::random_transposition:
      case ChainKind::top_to_random:
        perm.resize(static_cast<std::size_t>(spec.n));
        std::iota(perm.begin(), perm.end(), 1);
        break;
      case ChainKind::bernoulli_laplace:
        for (int x = 1; x <= spec.r; ++x) subset.push_back(x);
        for (int x = spec.r + 1; x <= spec.n; ++x) rest.push_back(x);
        break;
      case ChainKind::spanning_tree_walk: {
        graph = preset_graph(spec);
        auto trees = enumerate_spanning_trees(graph, 0);
        if (trees.empty()) {
          // start from any spanning tree found greedily
          UnionFind uf(graph.vertices);
          for (int e = 0; e < static_cast<int>(graph.edges.size()); ++e) {
            auto [a, b] = graph.edges[static_cast<std::size_t>(e)];
            if (uf.join(a, b)) tree.push_back(e);
          }
        } else {
          tree = trees.front();
        }
        break;
      }
      case ChainKind::glauber_ising:
        box.emplace(spec);
        spins.assign(static_cast<std::size_t>(spec.width * spec.height), 1);
        break;
      case ChainKind::qq_infinity_truncated:
        point = 0;
        break;
    }
  }

  double total_rate() const {
    switch (spec.kind) {
      case ChainKind::simple:
      case ChainKind::product_walk:
      case ChainKind::random_transposition:
      case ChainKind::top_to_random:
      case ChainKind::bernoulli_laplace:
      case ChainKind::spanning_tree_walk:
        return 1.0;
      case ChainKind::glauber_ising: {
        double total = 0.0;
        for (int u = 0; u < spec.width * spec.height; ++u)
          total += box->flip_rate(spec, spins, u);
        return total;
      }
      case ChainKind::qq_infinity_truncated:
        return (point < spec.trunc ? spec.lambda : 0.0) + point;
    }
    return 1.0;
  }

  int sample_factor_point() {
    if (spec.weights.empty()) return static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.m)));
    double u = rng.uniform01(), acc = 0.0;
    for (std::size_t i = 0; i < spec.weights.size(); ++i) {
      acc += spec.weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(spec.weights.size()) - 1;
  }

  void jump() {
    switch (spec.kind) {
      case ChainKind::simple:
        point = sample_factor_point();
        break;
      case ChainKind::product_walk: {
        std::size_t i = rng.below(static_cast<std::uint64_t>(spec.n));
        coords[i] = sample_factor_point();
        ++refresh_counts[i];
        break;
      }
      case ChainKind::random_transposition: {
        int pairs = spec.n * (spec.n - 1) / 2;
        int pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(pairs)));
        int a = 1;
        while (pick >= spec.n - a) {
          pick -= spec.n - a;
          ++a;
        }
        apply_transposition(perm, a, a + 1 + pick);
        break;
      }
      case ChainKind::top_to_random: {
        int b = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.n - 1)));
        apply_transposition(perm, 1, b);
        break;
      }
      case ChainKind::bernoulli_laplace: {
        std::size_t i = rng.below(subset.size());
        std::size_t j = rng.below(rest.size());
        std::swap(subset[i], rest[j]);
        break;
      }
      case ChainKind::spanning_tree_walk: {
        int e = static_cast<int>(rng.below(graph.edges.size()));
        std::size_t fi = rng.below(tree.size());
        std::vector<int> next = tree;
        next.erase(next.begin() + static_cast<std::ptrdiff_t>(fi));
        if (std::find(next.begin(), next.end(), e) == next.end()) next.push_back(e);
        std::sort(next.begin(), next.end());
        std::vector<int> sorted_tree = tree;
        std::sort(sorted_tree.begin(), sorted_tree.end());
        if (next != sorted_tree && is_spanning_tree(graph, next)) tree = next;
        break;
      }
      case ChainKind::glauber_ising: {
        int sites = spec.width * spec.height;
        double total = total_rate();
        double u = rng.uniform01() * total, acc = 0.0;
        for (int v = 0; v < sites; ++v) {
          acc += box->flip_rate(spec, spins, v);
          if (u < acc || v == sites - 1) {
            spins[static_cast<std::size_t>(v)] = -spins[static_cast<std::size_t>(v)];
            break;
          }
        }
        break;
      }
      case ChainKind::qq_infinity_truncated: {
        double birth = point < spec.trunc ? spec.lambda : 0.0;
        if (rng.uniform01() * (birth + point) < birth)
          ++point;
        else
          --point;
        break;
      }
    }
  }

  std::string state_label() const {
    switch (spec.kind) {
      case ChainKind::simple:
      case ChainKind::qq_infinity_truncated:
        return std::to_string(point);
      case ChainKind::product_walk: {
        std::string s;
        for (std::size_t i = 0; i < coords.size(); ++i) {
          if (i) s += '|';
          s += std::to_string(coords[i]);
        }
        return s;
      }
      case ChainKind::random_transposition:
      case ChainKind::top_to_random:
        return perm_label(perm);
      case ChainKind::bernoulli_laplace: {
        std::vector<int> sorted = subset;
        std::sort(sorted.begin(), sorted.end());
        return subset_label(sorted);
      }
      case ChainKind::spanning_tree_walk: {
        std::vector<int> sorted = tree;
        std::sort(sorted.begin(), sorted.end());
        return "T{" + subset_label(sorted) + "}";
      }
      case ChainKind::glauber_ising:
        return spin_label(spins);
    }
    return "";
  }

  // occupation index for small spaces; -1 when not tracked
  long state_index() const {
    switch (spec.kind) {
      case ChainKind::simple:
      case ChainKind::qq_infinity_truncated:
        return point;
      case ChainKind::product_walk: {
        std::size_t base = spec.weights.empty() ? static_cast<std::size_t>(spec.m)
                                                : spec.weights.size();
        std::size_t idx = 0, mult = 1;
        for (std::size_t i = 0; i < coords.size(); ++i) {
          idx += static_cast<std::size_t>(coords[i]) * mult;
          mult *= base;
        }
        return static_cast<long>(idx);
      }
      default:
        return -1;
    }
  }

  double scalar_observable(const std::string& name) const {
    if (name == "occupancy" && spec.kind == ChainKind::qq_infinity_truncated)
      return static_cast<double>(point);
    if (name == "magnetization" && spec.kind == ChainKind::glauber_ising) {
      double mag = 0.0;
      for (int s : spins) mag += s;
      return mag / static_cast<double>(spins.size());
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

TrajectorySampler::TrajectorySampler(ChainSpec spec, std::uint64_t seed)
    : impl_(std::make_unique<Impl>(std::move(spec), seed)) {}
TrajectorySampler::~TrajectorySampler() = default;
TrajectorySampler::TrajectorySampler(TrajectorySampler&&) noexcept = default;
TrajectorySampler& TrajectorySampler::operator=(TrajectorySampler&&) noexcept = default;

const ChainSpec& TrajectorySampler::spec() const { return impl_->spec; }

TrajectorySummary TrajectorySampler::run(double t_end, long max_jumps,
                                         const std::vector<std::string>& observables) {
  Impl& st = *impl_;
  TrajectorySummary out;
  std::size_t nstates = st.spec.state_count();
  bool track_occupation = nstates <= 100 && st.state_index() >= 0;
  if (track_occupation) {
    out.occupation.assign(nstates, 0.0);
    out.visit_counts.assign(nstates, 0);
  }
  std::map<std::string, double> integrals;
  for (const auto& name : observables) integrals[name] = 0.0;

  double t = 0.0;
  long jumps_here = 0;
  while (t < t_end && (max_jumps < 0 || jumps_here < max_jumps)) {
    double rate = st.total_rate();
    double dt = rate > 0.0 ? st.rng.exponential(rate) : (t_end - t);
    double hold = std::min(dt, t_end - t);
    if (track_occupation) out.occupation[static_cast<std::size_t>(st.state_index())] += hold;
    for (auto& [name, acc] : integrals) acc += hold * st.scalar_observable(name);
    t += dt;
    if (t >= t_end || rate <= 0.0) break;
    st.jump();
    ++st.jumps;
    ++jumps_here;
    if (track_occupation) ++out.visit_counts[static_cast<std::size_t>(st.state_index())];
  }
  double elapsed = std::min(t, t_end);
  out.jumps = jumps_here;
  out.t_end = elapsed;
  out.final_state = st.state_label();
  out.refresh_counts = st.refresh_counts;
  if (elapsed > 0.0) {
    for (auto& [name, acc] : integrals) out.time_average[name] = acc / elapsed;
    for (double& o : out.occupation) o /= elapsed;
  }
  return out;
}

TrajectorySummary sample_path(TrajectorySampler& sampler, double t_end,
                              const std::vector<std::string>& observables) {
  return sampler.run(t_end, -1, observables);
}

}  // namespace revhyp
