#pragma once

// Dense complex matrix kernel. Everything in the library that is an operator,
// a symbol value or a Koszul block is carried as a CMatrix.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "jointspec/error.hpp"

namespace jointspec {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
/// A point of C^d.
using CPoint = Eigen::VectorXcd;

namespace defaults {
inline constexpr double rank_tol = 1e-10;
inline constexpr double numerical_radius_tol = 1e-8;
inline constexpr double tri_tol = 1e-8;
inline constexpr double unitary_tol = 1e-10;

/// Eigenvalue matching tolerance for a matrix of Frobenius norm `fro`.
inline double eig_tol(double fro) { return 1e-8 * (1.0 + fro); }
}  // namespace defaults

inline void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw InputError(std::string(what) + ": expected a non-empty square matrix, got " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  }
}

inline void require_finite(const CMatrix& a, const char* what) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) {
        throw InputError(std::string(what) + ": non-finite entry at (" + std::to_string(i) +
                         "," + std::to_string(j) + ")");
      }
    }
  }
}

/// Largest singular value.
inline double norm2(const CMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues()(0);
}

/// Frobenius norm of the strictly lower triangular part.
inline double strict_lower_norm(const CMatrix& a) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < a.rows(); ++i) s += std::norm(a(i, j));
  }
  return std::sqrt(s);
}

struct SchurForm {
  CMatrix q;  // unitary
  CMatrix t;  // upper triangular, a = q t q*
  double unitarity_residual = 0.0;
};

/// Complex Schur decomposition (Hessenberg reduction followed by shifted QR).
inline SchurForm schur(const CMatrix& a) {
  require_square(a, "schur");
  Eigen::ComplexSchur<CMatrix> cs(a.rows());
  cs.compute(a, true);
  if (cs.info() != Eigen::Success) {
    throw NumericalError("schur: QR iteration did not converge (ill-conditioned input)");
  }
  SchurForm out{cs.matrixU(), cs.matrixT(), 0.0};
  const auto n = a.rows();
  out.unitarity_residual = (out.q.adjoint() * out.q - CMatrix::Identity(n, n)).norm();
  return out;
}

/// Eigenvalues with algebraic multiplicity, read off the Schur diagonal.
inline std::vector<Complex> eigenvalues(const CMatrix& a) {
  require_square(a, "eigenvalues");
  Eigen::ComplexSchur<CMatrix> cs(a.rows());
  cs.compute(a, false);
  if (cs.info() != Eigen::Success) {
    throw NumericalError("eigenvalues: QR iteration did not converge (ill-conditioned input)");
  }
  const CMatrix& t = cs.matrixT();
  std::vector<Complex> out(static_cast<std::size_t>(a.rows()));
  for (Eigen::Index i = 0; i < a.rows(); ++i) out[static_cast<std::size_t>(i)] = t(i, i);
  return out;
}

inline double spectral_radius(const CMatrix& a) {
  double r = 0.0;
  for (const auto& l : eigenvalues(a)) r = std::max(r, std::abs(l));
  return r;
}

/// Determinant via partial-pivoting LU.
inline Complex det(const CMatrix& a) {
  require_square(a, "det");
  return Eigen::PartialPivLU<CMatrix>(a).determinant();
}

/// Singular values in decreasing order.
inline Eigen::VectorXd singular_values(const CMatrix& a) {
  if (a.size() == 0) return Eigen::VectorXd();
  if (std::min(a.rows(), a.cols()) > 48) {
    Eigen::BDCSVD<CMatrix> svd(a);
    return svd.singularValues();
  }
  Eigen::JacobiSVD<CMatrix> svd(a);
  return svd.singularValues();
}

/// Count of singular values strictly above tol * max(1, sigma_max).
inline std::size_t svd_rank(const CMatrix& a, double tol = defaults::rank_tol) {
  if (tol < 0.0) throw InputError("svd_rank: tolerance must be nonnegative");
  const Eigen::VectorXd s = singular_values(a);
  if (s.size() == 0) return 0;
  const double cut = tol * std::max(1.0, s(0));
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cut) ++r;
  }
  return r;
}

namespace detail {

inline double hermitian_top(const CMatrix& a, double theta) {
  const Complex rot = std::polar(1.0, theta);
  const CMatrix h = 0.5 * (rot * a + std::conj(rot) * a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(h.rows() - 1);
}

}  // namespace detail

/// Numerical radius max_theta lambda_max((e^{i theta} a + e^{-i theta} a*) / 2).
///
/// A uniform theta-grid locates every local maximum of the (continuous, 2pi
/// periodic) objective; each one is then refined by golden-section search on
/// its bracketing interval until the bracket is below `tol` relative to the
/// Lipschitz constant ||a||_2.
inline double numerical_radius(const CMatrix& a, double tol = defaults::numerical_radius_tol) {
  require_square(a, "numerical_radius");
  if (!(tol > 0.0)) throw InputError("numerical_radius: tolerance must be positive");
  const double lip = norm2(a);
  if (lip == 0.0) return 0.0;

  const int m = std::max<int>(256, 32 * static_cast<int>(a.rows()));
  const double h = 2.0 * std::numbers::pi / m;
  std::vector<double> f(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) f[static_cast<std::size_t>(k)] = detail::hermitian_top(a, k * h);

  double best = *std::max_element(f.begin(), f.end());
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  const double width_goal = std::max(tol / lip, 1e-14);
  constexpr int max_iterations = 200;

  for (int k = 0; k < m; ++k) {
    const double fk = f[static_cast<std::size_t>(k)];
    const double fl = f[static_cast<std::size_t>((k + m - 1) % m)];
    const double fr = f[static_cast<std::size_t>((k + 1) % m)];
    if (fk < fl || fk < fr) continue;
    // Lipschitz bound: no point of this bracket can beat `best` by more than lip*h.
    if (fk + lip * h < best) continue;
    double lo = (k - 1) * h;
    double hi = (k + 1) * h;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = detail::hermitian_top(a, x1);
    double f2 = detail::hermitian_top(a, x2);
    int it = 0;
    while (hi - lo > width_goal) {
      if (++it > max_iterations) {
        throw NumericalError("numerical_radius: refinement did not converge");
      }
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + inv_phi * (hi - lo);
        f2 = detail::hermitian_top(a, x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - inv_phi * (hi - lo);
        f1 = detail::hermitian_top(a, x1);
      }
    }
    best = std::max({best, f1, f2});
  }
  return std::max(best, 0.0);
}

/// Result of matching two multisets of points greedily by minimal distance.
struct MultisetMatch {
  double max_distance = 0.0;
  /// pairing[i] is the index in `b` matched to a[i].
  std::vector<std::size_t> pairing;
};

/// Greedy minimal-distance matching: repeatedly pair the closest remaining (a, b).
inline MultisetMatch match_multisets(std::span<const Complex> a, std::span<const Complex> b) {
  if (a.size() != b.size()) throw InputError("match_multisets: size mismatch");
  const std::size_t n = a.size();
  MultisetMatch out;
  out.pairing.assign(n, n);
  std::vector<bool> used_a(n, false), used_b(n, false);
  for (std::size_t round = 0; round < n; ++round) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (used_a[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (used_b[j]) continue;
        const double dist = std::abs(a[i] - b[j]);
        if (dist < best) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
    }
    used_a[bi] = used_b[bj] = true;
    out.pairing[bi] = bj;
    out.max_distance = std::max(out.max_distance, best);
  }
  return out;
}

/// Same matching for points of C^d (Euclidean distance).
inline MultisetMatch match_point_multisets(std::span<const CPoint> a, std::span<const CPoint> b) {
  if (a.size() != b.size()) throw InputError("match_point_multisets: size mismatch");
  const std::size_t n = a.size();
  MultisetMatch out;
  out.pairing.assign(n, n);
  std::vector<bool> used_a(n, false), used_b(n, false);
  for (std::size_t round = 0; round < n; ++round) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (used_a[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (used_b[j]) continue;
        const double dist = (a[i] - b[j]).norm();
        if (dist < best) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
    }
    used_a[bi] = used_b[bj] = true;
    out.pairing[bi] = bj;
    out.max_distance = std::max(out.max_distance, best);
  }
  return out;
}

}  // namespace jointspec
