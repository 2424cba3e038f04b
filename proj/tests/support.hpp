#pragma once

#include <random>

#include "critpol/core/hilbert.hpp"

namespace testing_support {

using critpol::Matrix;

inline Matrix random_matrix(std::mt19937& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = {g(rng), g(rng)};
  return m;
}

/// A A^dag / Tr, full rank with probability one.
inline Matrix random_density(std::mt19937& rng, Eigen::Index n) {
  const Matrix a = random_matrix(rng, n);
  Matrix rho = a * a.adjoint();
  return rho / rho.trace();
}

inline Matrix random_hermitian(std::mt19937& rng, Eigen::Index n) {
  const Matrix a = random_matrix(rng, n);
  return 0.5 * (a + a.adjoint());
}

}  // namespace testing_support
