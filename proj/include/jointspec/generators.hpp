#pragma once

// Random commuting tuples built as polynomials in one random matrix.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "jointspec/commuting_tuple.hpp"
#include "jointspec/random.hpp"

namespace jointspec {

/// c_0 I + c_1 M + ... evaluated by Horner's rule.
inline CMatrix matrix_polynomial(const std::vector<Complex>& coeffs, const CMatrix& m) {
  CMatrix acc = CMatrix::Zero(m.rows(), m.cols());
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * m;
    acc.diagonal().array() += *it;
  }
  return acc;
}

/// A_j = p_j(M) with M Gaussian scaled by 1/sqrt(n) and p_j of the given degree
/// with Gaussian coefficients of variance 1/4.
inline CommutingTuple random_poly_tuple(Rng& rng, Eigen::Index n, std::size_t d, std::size_t degree = 2) {
  const CMatrix m = random_gaussian_matrix(n, rng) / std::sqrt(static_cast<double>(n));
  std::vector<CMatrix> mats;
  for (std::size_t j = 0; j < d; ++j) {
    std::vector<Complex> c(degree + 1);
    for (auto& x : c) x = random_gaussian(rng) / 2.0;
    mats.push_back(matrix_polynomial(c, m));
  }
  return CommutingTuple::make(std::move(mats));
}

/// random_poly_tuple with each A_j rescaled to operator norm `norm` (at most 1 for contractions).
inline CommutingTuple random_contractive_tuple(Rng& rng, Eigen::Index n, std::size_t d, double norm = 0.95) {
  const CommutingTuple t = random_poly_tuple(rng, n, d);
  std::vector<CMatrix> mats;
  for (std::size_t j = 0; j < d; ++j) {
    const double s = norm2(t[j]);
    mats.push_back(s > 0.0 ? CMatrix(t[j] * (norm / s)) : t[j]);
  }
  return CommutingTuple::make(std::move(mats));
}

}  // namespace jointspec
