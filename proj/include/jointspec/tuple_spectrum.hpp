#pragma once

// Joint eigenvalues of commuting matrix tuples, and the Koszul-complex test
// for the Taylor spectrum that serves as an independent check on them.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "jointspec/commuting_tuple.hpp"
#include "jointspec/matrix_core.hpp"
#include "jointspec/random.hpp"

namespace jointspec {

struct TriangularForm {
  CMatrix q;                  // shared unitary
  std::vector<CMatrix> tris;  // q* T_j q, upper triangular up to `residual`
  /// max_j ||strict_lower(q* T_j q)||_F / max(1, ||T_j||_F)
  double residual = 0.0;
  bool used_deflation = false;
};

struct TriangularizeOptions {
  std::uint64_t seed = 0;
  double tol_tri = defaults::tri_tol;
  /// Null-space cut for the deflation route, relative to max(1, ||B||).
  double null_tol = 1e-8;
};

namespace detail {

inline std::vector<Complex> generic_coefficients(std::size_t d, std::uint64_t seed) {
  Rng rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<Complex> c(d);
  for (auto& x : c) x = random_gaussian(rng);
  return c;
}

inline CMatrix combination(std::span<const CMatrix> mats, std::span<const Complex> c) {
  CMatrix out = c[0] * mats[0];
  for (std::size_t j = 1; j < mats.size(); ++j) out += c[j] * mats[j];
  return out;
}

inline double tri_residual(std::span<const CMatrix> orig, std::span<const CMatrix> tris) {
  double r = 0.0;
  for (std::size_t j = 0; j < tris.size(); ++j) {
    r = std::max(r, strict_lower_norm(tris[j]) / std::max(1.0, orig[j].norm()));
  }
  return r;
}

/// Orthonormal basis of the numerical null space of b (at least one vector).
inline CMatrix null_basis(const CMatrix& b, double rel_tol) {
  Eigen::JacobiSVD<CMatrix> svd(b, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = rel_tol * std::max(1.0, s.size() ? s(0) : 0.0);
  Eigen::Index keep = 0;
  for (Eigen::Index i = s.size() - 1; i >= 0 && s(i) <= cut; --i) ++keep;
  keep = std::max<Eigen::Index>(keep, 1);
  return svd.matrixV().rightCols(keep);
}

/// A unit vector that is (numerically) an eigenvector of every matrix in the list.
/// Each stage restricts to an eigenspace of the current operator, which the
/// remaining operators leave invariant because they commute.
inline CVector common_eigenvector(std::span<const CMatrix> ops, double null_tol) {
  const auto m = ops.front().rows();
  CMatrix basis = CMatrix::Identity(m, m);
  for (const auto& op : ops) {
    if (basis.cols() == 1) break;
    const CMatrix restricted = basis.adjoint() * op * basis;
    const auto eig = eigenvalues(restricted);
    CMatrix shifted = restricted;
    shifted.diagonal().array() -= eig.front();
    basis = basis * null_basis(shifted, null_tol);
  }
  return basis.col(0).normalized();
}

/// Deflation: peel one common eigenvector at a time, recursing on the complement.
inline CMatrix deflation_triangularizer(std::span<const CMatrix> mats, std::span<const Complex> c,
                                        double null_tol) {
  const auto n = mats.front().rows();
  CMatrix q = CMatrix::Identity(n, n);
  std::vector<CMatrix> work(mats.begin(), mats.end());
  for (Eigen::Index step = 0; step + 1 < n; ++step) {
    const Eigen::Index m = n - step;
    std::vector<CMatrix> ops;
    ops.reserve(work.size() + 1);
    ops.push_back(combination(work, c));
    for (const auto& w : work) ops.push_back(w);
    const CVector v = common_eigenvector(ops, null_tol);
    Eigen::HouseholderQR<CMatrix> qr(v);
    const CMatrix h = qr.householderQ();  // first column is v up to phase
    for (auto& w : work) {
      const CMatrix rotated = h.adjoint() * w * h;
      w = rotated.bottomRightCorner(m - 1, m - 1);
    }
    q.rightCols(m) = q.rightCols(m) * h;
  }
  return q;
}

}  // namespace detail

/// One unitary Q with every Q* T_j Q upper triangular.
///
/// Fast route: the Schur vectors of a random combination sum c_j T_j
/// triangularize the whole tuple when that combination has simple eigenvalues.
/// Otherwise falls back to deflation along common eigenvectors.
inline TriangularForm simultaneous_triangularize(const CommutingTuple& t, const TriangularizeOptions& opt = {}) {
  const auto& mats = t.mats();
  const auto c = detail::generic_coefficients(t.d(), opt.seed);
  TriangularForm out;

  auto finish = [&](CMatrix q) {
    out.q = std::move(q);
    out.tris.clear();
    for (const auto& a : mats) out.tris.push_back(out.q.adjoint() * a * out.q);
    out.residual = detail::tri_residual(mats, out.tris);
  };

  finish(schur(detail::combination(mats, c)).q);
  if (out.residual <= opt.tol_tri) return out;

  finish(detail::deflation_triangularizer(mats, c, opt.null_tol));
  out.used_deflation = true;
  if (out.residual > opt.tol_tri) {
    throw NumericalError("simultaneous_triangularize: residual " + std::to_string(out.residual) +
                         " above tolerance (clustered joint eigenspaces); loosen tol_tri");
  }
  return out;
}

struct JointSpectrum {
  std::vector<CPoint> points;          // n points of C^d, with multiplicity
  CMatrix triangularizer;              // unitary Q
  double residual = 0.0;               // triangularization residual
  std::vector<double> point_residuals; // min over unit v of sqrt(sum_j ||(T_j - l_j) v||^2)
};

namespace detail {

/// Smallest singular value of the stacked shifted tuple [T_1 - l_1; ...; T_d - l_d].
inline double stacked_residual(std::span<const CMatrix> mats, const CPoint& lambda) {
  const auto n = mats.front().rows();
  CMatrix stack(n * static_cast<Eigen::Index>(mats.size()), n);
  for (std::size_t j = 0; j < mats.size(); ++j) {
    CMatrix s = mats[j];
    s.diagonal().array() -= lambda(static_cast<Eigen::Index>(j));
    stack.middleRows(static_cast<Eigen::Index>(j) * n, n) = s;
  }
  Eigen::JacobiSVD<CMatrix> svd(stack);
  return svd.singularValues()(n - 1);
}

}  // namespace detail

/// Diagonal d-vectors of a simultaneous triangularization, column aligned.
///
/// Per-point residuals use the eigenvector recovered by back-substitution in
/// the triangular generic combination; where that combination has a repeated
/// diagonal entry the stacked smallest singular value is used instead.
inline JointSpectrum joint_eigenvalues(const CommutingTuple& t, const TriangularizeOptions& opt = {}) {
  const TriangularForm tf = simultaneous_triangularize(t, opt);
  const auto n = t.n();
  const auto d = static_cast<Eigen::Index>(t.d());
  JointSpectrum js;
  js.triangularizer = tf.q;
  js.residual = tf.residual;
  js.points.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    CPoint p(d);
    for (Eigen::Index j = 0; j < d; ++j) p(j) = tf.tris[static_cast<std::size_t>(j)](k, k);
    js.points.push_back(std::move(p));
  }

  const auto c = detail::generic_coefficients(t.d(), opt.seed);
  const CMatrix tc = detail::combination(tf.tris, c);
  const double scale = std::max(1.0, tc.norm());
  js.point_residuals.resize(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex mu = tc(k, k);
    bool simple = true;
    for (Eigen::Index i = 0; i < k; ++i) {
      if (std::abs(tc(i, i) - mu) < 1e-6 * scale) simple = false;
    }
    double res;
    if (simple) {
      CVector y = CVector::Zero(n);
      y(k) = 1.0;
      for (Eigen::Index i = k - 1; i >= 0; --i) {
        Complex acc = tc(i, k);
        for (Eigen::Index l = i + 1; l < k; ++l) acc += tc(i, l) * y(l);
        y(i) = -acc / (tc(i, i) - mu);
      }
      const CVector x = (tf.q * y).normalized();
      double sq = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) {
        const auto& a = t[static_cast<std::size_t>(j)];
        sq += (a * x - js.points[static_cast<std::size_t>(k)](j) * x).squaredNorm();
      }
      res = std::sqrt(sq);
    } else {
      res = detail::stacked_residual(t.mats(), js.points[static_cast<std::size_t>(k)]);
    }
    js.point_residuals[static_cast<std::size_t>(k)] = res;
  }
  return js;
}

/// Distance from a point to the nearest joint eigenvalue.
inline double distance_to_spectrum(const JointSpectrum& js, const CPoint& x) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : js.points) best = std::min(best, (p - x).norm());
  return best;
}

/// E_T = sum_i T_i (x) C_i on X (x) Lambda(C^d), dimension n * 2^d.
struct KoszulOperator {
  std::size_t d = 0;
  Eigen::Index n = 0;
  CMatrix e;
  /// Wedge basis: subset bitmasks in graded order (size first, then lexicographic).
  std::vector<std::uint32_t> basis;
};

inline constexpr std::size_t koszul_size_cap = 4096;

/// Subsets of {0..d-1} ordered by cardinality, then lexicographically on the sorted elements.
inline std::vector<std::uint32_t> wedge_basis(std::size_t d) {
  std::vector<std::uint32_t> masks(std::size_t{1} << d);
  for (std::uint32_t s = 0; s < masks.size(); ++s) masks[s] = s;
  auto elements = [](std::uint32_t s) {
    std::vector<int> out;
    for (int i = 0; i < 32; ++i) {
      if (s & (1u << i)) out.push_back(i);
    }
    return out;
  };
  std::sort(masks.begin(), masks.end(), [&](std::uint32_t a, std::uint32_t b) {
    const int pa = std::popcount(a), pb = std::popcount(b);
    if (pa != pb) return pa < pb;
    return elements(a) < elements(b);
  });
  return masks;
}

inline KoszulOperator koszul_build(std::span<const CMatrix> mats, std::size_t cap = koszul_size_cap) {
  const std::size_t d = mats.size();
  if (d == 0 || d > 20) throw InputError("koszul_build: tuple length out of range");
  const auto n = mats.front().rows();
  const std::size_t dim = static_cast<std::size_t>(n) << d;
  if (dim > cap) {
    throw InputError("koszul_build: n*2^d = " + std::to_string(dim) + " exceeds cap " + std::to_string(cap));
  }
  KoszulOperator k{d, n, CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim)),
                   wedge_basis(d)};
  std::vector<std::size_t> rank_of(std::size_t{1} << d);
  for (std::size_t r = 0; r < k.basis.size(); ++r) rank_of[k.basis[r]] = r;

  for (std::size_t r = 0; r < k.basis.size(); ++r) {
    const std::uint32_t s = k.basis[r];
    for (std::size_t i = 0; i < d; ++i) {
      const std::uint32_t bit = 1u << i;
      if (s & bit) continue;
      // C_i e_S = (-1)^{#{k in S : k < i}} e_{S u {i}}
      const int below = std::popcount(s & (bit - 1u));
      const double sign = (below % 2 == 0) ? 1.0 : -1.0;
      const std::size_t target = rank_of[s | bit];
      k.e.block(static_cast<Eigen::Index>(target) * n, static_cast<Eigen::Index>(r) * n, n, n) +=
          sign * mats[i];
    }
  }
  return k;
}

inline KoszulOperator koszul_build(const CommutingTuple& t, std::size_t cap = koszul_size_cap) {
  return koszul_build(std::span<const CMatrix>(t.mats()), cap);
}

struct KoszulVerdict {
  bool singular = false;
  std::size_t rank = 0;
  std::size_t dim = 0;
  /// Smallest relative singular value above the cut and largest below it.
  double gap_low = 0.0;
  double gap_high = 0.0;
};

/// Koszul exactness test at a point. Since Ran E is inside Ker E, the complex
/// is exact iff rank E = dim / 2. Throws InconclusiveError when a relative
/// singular value falls in (tol/10, 10 tol).
inline KoszulVerdict koszul_verdict(const CommutingTuple& t, const CPoint& lambda, double tol = 1e-8,
                                    std::size_t cap = koszul_size_cap) {
  const CommutingTuple shifted = t.shifted(lambda);
  const KoszulOperator k = koszul_build(shifted, cap);
  const Eigen::VectorXd s = singular_values(k.e);
  const double scale = std::max(1.0, s.size() ? s(0) : 0.0);
  KoszulVerdict v;
  v.dim = static_cast<std::size_t>(k.e.rows());
  v.gap_low = 0.0;
  v.gap_high = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double rel = s(i) / scale;
    if (rel > tol / 10.0 && rel < 10.0 * tol) {
      throw InconclusiveError("taylor_singular_at: singular value " + std::to_string(rel) +
                              " inside the rank-decision band");
    }
    if (rel > tol) {
      ++v.rank;
      v.gap_high = std::min(v.gap_high, rel);
    } else {
      v.gap_low = std::max(v.gap_low, rel);
    }
  }
  v.singular = 2 * v.rank != v.dim;
  return v;
}

/// True iff lambda lies in the Taylor spectrum (the Koszul complex of T - lambda fails to be exact).
inline bool taylor_singular_at(const CommutingTuple& t, const CPoint& lambda, double tol = 1e-8) {
  return koszul_verdict(t, lambda, tol).singular;
}

}  // namespace jointspec
