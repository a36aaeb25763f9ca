#include "revhyp/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace revhyp {

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                             std::vector<double> start, const NelderMeadOptions& opts) {
  const std::size_t d = start.size();
  const int max_iters = opts.max_iters > 0 ? opts.max_iters : 250 * static_cast<int>(d);
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    double v = fn(x);
    return std::isfinite(v) ? v : 1e300;
  };

  std::vector<std::vector<double>> simplex(d + 1, start);
  std::vector<double> value(d + 1);
  for (std::size_t i = 0; i < d; ++i) simplex[i + 1][i] += opts.initial_step;
  for (std::size_t i = 0; i <= d; ++i) value[i] = eval(simplex[i]);

  std::vector<std::size_t> order(d + 1);
  std::vector<double> centroid(d), candidate(d);
  for (int iter = 0; iter < max_iters; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return value[a] < value[b]; });
    const std::size_t best = order[0], worst = order[d], second = order[d - 1];
    if (value[worst] - value[best] < opts.tol) break;

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i <= d; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < d; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(d);

    auto blend = [&](double coeff) {
      for (std::size_t j = 0; j < d; ++j)
        candidate[j] = centroid[j] + coeff * (simplex[worst][j] - centroid[j]);
      return eval(candidate);
    };

    double reflected = blend(-1.0);
    if (reflected < value[order[0]]) {
      std::vector<double> refl = candidate;
      double expanded = blend(-2.0);
      if (expanded < reflected) {
        simplex[worst] = candidate;
        value[worst] = expanded;
      } else {
        simplex[worst] = std::move(refl);
        value[worst] = reflected;
      }
    } else if (reflected < value[second]) {
      simplex[worst] = candidate;
      value[worst] = reflected;
    } else {
      double contracted = reflected < value[worst] ? blend(-0.5) : blend(0.5);
      if (contracted < std::min(reflected, value[worst])) {
        simplex[worst] = candidate;
        value[worst] = contracted;
      } else {
        for (std::size_t i = 0; i <= d; ++i) {
          if (i == best) continue;
          for (std::size_t j = 0; j < d; ++j)
            simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
          value[i] = eval(simplex[i]);
        }
      }
    }
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i <= d; ++i)
    if (value[i] < value[best]) best = i;
  return {simplex[best], value[best], evals};
}

}  // namespace revhyp
