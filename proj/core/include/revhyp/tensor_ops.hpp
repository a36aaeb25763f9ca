#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

namespace revhyp {

// Index convention used throughout: a product-state index s encodes the
// coordinate vector (i_0, i_1, ...) with the FIRST factor least significant,
// s = i_0 + n_0 * (i_1 + n_1 * (i_2 + ...)).

/// Applies the matrix M (n_k x n_k) along coordinate k of the flattened
/// tensor v, in place: v'[.., i_k, ..] = sum_j M(i_k, j) v[.., j, ..].
void apply_mode_matrix(std::vector<double>& v, const std::vector<std::size_t>& dims,
                       std::size_t mode, const Eigen::MatrixXd& M);

/// Decodes coordinate `mode` of state s.
inline std::size_t mode_digit(std::size_t s, const std::vector<std::size_t>& dims,
                              std::size_t mode) {
  for (std::size_t k = 0; k < mode; ++k) s /= dims[k];
  return s % dims[mode];
}

}  // namespace revhyp
