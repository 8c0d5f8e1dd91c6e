#pragma once

// Seeded generators for test inputs and probe points. All randomness in the
// library flows through an explicitly passed Rng so runs are reproducible.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "jointspec/matrix_core.hpp"

namespace jointspec {

using Rng = std::mt19937_64;

inline Complex random_gaussian(Rng& rng) {
  std::normal_distribution<double> g(0.0, std::numbers::sqrt2 / 2.0);
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

inline double random_uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  return u(rng);
}

/// Complex Ginibre matrix, entries of unit variance.
inline CMatrix random_gaussian_matrix(Eigen::Index n, Rng& rng) {
  CMatrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = random_gaussian(rng);
  }
  return a;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with the R-diagonal phases removed).
inline CMatrix random_unitary(Eigen::Index n, Rng& rng) {
  const CMatrix g = random_gaussian_matrix(n, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0.0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

/// Orthogonal projection of the given rank onto a Haar-random subspace.
inline CMatrix random_projection(Eigen::Index n, Eigen::Index rank, Rng& rng) {
  const CMatrix u = random_unitary(n, rng);
  const CMatrix basis = u.leftCols(rank);
  return basis * basis.adjoint();
}

/// Uniform point on the unit circle.
inline Complex random_unimodular(Rng& rng) {
  return std::polar(1.0, random_uniform(rng, 0.0, 2.0 * std::numbers::pi));
}

/// Uniform point of the disk of the given radius.
inline Complex random_in_disk(Rng& rng, double radius) {
  const double r = radius * std::sqrt(random_uniform(rng));
  return std::polar(r, random_uniform(rng, 0.0, 2.0 * std::numbers::pi));
}

/// Uniform point of the polydisk of the given radius in C^d.
inline CPoint random_in_polydisk(Rng& rng, Eigen::Index d, double radius) {
  CPoint p(d);
  for (Eigen::Index j = 0; j < d; ++j) p(j) = random_in_disk(rng, radius);
  return p;
}

}  // namespace jointspec
