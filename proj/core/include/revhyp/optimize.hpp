#pragma once

#include <functional>
#include <vector>

namespace revhyp {

struct NelderMeadOptions {
  double initial_step = 0.8;
  double tol = 1e-10;     // simplex spread in objective value
  int max_iters = 0;      // 0 -> 250 * dimension
};

struct NelderMeadResult {
  std::vector<double> x;
  double value;
  int evaluations;
};

/// Minimizes fn over R^d from the given start.
NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& fn,
                             std::vector<double> start, const NelderMeadOptions& opts = {});

}  // namespace revhyp
