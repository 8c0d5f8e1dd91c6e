#pragma once

// Determinantal annihilators p_a(z) = det(sum_j a_j (A_j - z_j I)) of a
// commuting tuple, and the check that their common zeros are exactly the
// joint eigenvalues.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jointspec/commuting_tuple.hpp"
#include "jointspec/mpoly.hpp"
#include "jointspec/parallel.hpp"
#include "jointspec/tuple_spectrum.hpp"

namespace jointspec {

struct AlphaSet {
  std::size_t d = 0;
  std::vector<CVector> vectors;

  std::size_t count() const noexcept { return vectors.size(); }
};

/// The N(d-1)+1 moment-curve vectors (1, t, ..., t^{d-1}) at t = 1, 2, ...
inline AlphaSet moment_curve_alphas(std::size_t d, std::size_t n) {
  if (d == 0 || n == 0) throw InputError("moment_curve_alphas: d and n must be positive");
  const std::size_t count = n * (d - 1) + 1;
  AlphaSet out{d, {}};
  out.vectors.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k + 1);
    CVector a(static_cast<Eigen::Index>(d));
    double power = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      a(static_cast<Eigen::Index>(j)) = power;
      power *= t;
    }
    out.vectors.push_back(std::move(a));
  }
  return out;
}

/// Calls fn on every k-subset of {0..m-1} (sorted index vector). Stops early when fn returns false.
template <typename Fn>
bool for_each_subset(std::size_t m, std::size_t k, Fn&& fn) {
  if (k > m) return true;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!fn(std::as_const(idx))) return false;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == m - k + i - 1) --i;
    if (i == 0) return true;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

/// Whether every d-subset is linearly independent: each d x d minor is
/// compared against the product of the vector norms.
inline bool every_subset_independent(const AlphaSet& s, double rel_tol = 1e-12) {
  if (s.count() < s.d) return true;
  return for_each_subset(s.count(), s.d, [&](const std::vector<std::size_t>& idx) {
    CMatrix m(static_cast<Eigen::Index>(s.d), static_cast<Eigen::Index>(s.d));
    double scale = 1.0;
    for (std::size_t c = 0; c < s.d; ++c) {
      m.col(static_cast<Eigen::Index>(c)) = s.vectors[idx[c]];
      scale *= s.vectors[idx[c]].norm();
    }
    return std::abs(det(m)) > rel_tol * scale;
  });
}

struct AnnihilatorFamily {
  std::vector<MPoly> polys;
  AlphaSet alphas;
  std::vector<double> residuals;  // ||p_a(T)||_F per alpha
  double max_residual = 0.0;
};

/// p_a for the unit vector a/|a|; p_{ca} = c^N p_a, so the zero set is unchanged.
/// The zero vector gives the zero polynomial.
inline MPoly annihilator(const CommutingTuple& t, const CVector& alpha, const DetOptions& opt = {}) {
  if (static_cast<std::size_t>(alpha.size()) != t.d()) {
    throw InputError("annihilator: alpha has " + std::to_string(alpha.size()) + " entries, tuple has d = " +
                     std::to_string(t.d()));
  }
  const double norm = alpha.norm();
  if (!std::isfinite(norm)) throw InputError("annihilator: alpha is not finite");
  if (norm == 0.0) return MPoly(t.d());
  const CVector a = alpha / norm;
  const std::size_t d = t.d();
  CMatrix constant = CMatrix::Zero(t.n(), t.n());
  MPoly linear(d);
  for (std::size_t j = 0; j < d; ++j) {
    const Complex aj = a(static_cast<Eigen::Index>(j));
    constant += aj * t[j];
    linear += MPoly::variable(d, j) * aj;
  }
  PolyMatrix m = PolyMatrix::constant(constant, d);
  m.add_diagonal(-linear);
  return det_poly_matrix(m, opt);
}

inline AnnihilatorFamily build_annihilators(const CommutingTuple& t, const AlphaSet& alphas,
                                            const DetOptions& opt = {}) {
  if (alphas.d != t.d()) throw InputError("build_annihilators: alpha dimension does not match tuple");
  AnnihilatorFamily fam{std::vector<MPoly>(alphas.count(), MPoly(t.d())), alphas,
                        std::vector<double>(alphas.count(), 0.0), 0.0};
  parallel_for(alphas.count(), [&](std::size_t i) {
    fam.polys[i] = annihilator(t, alphas.vectors[i], opt);
    fam.residuals[i] = eval_matrix_tuple(fam.polys[i], t).norm();
  });
  for (double r : fam.residuals) fam.max_residual = std::max(fam.max_residual, r);
  return fam;
}

/// Annihilation threshold tol * (1 + max_j ||A_j||_F)^N.
inline double annihilation_threshold(const CommutingTuple& t, double tol = 1e-6) {
  return tol * std::pow(1.0 + t.max_frobenius(), static_cast<double>(t.n()));
}

struct VarietyViolation {
  enum class Kind { EigenvalueNotZero, ProbeIsZero };
  Kind kind;
  CPoint point;
  double ratio;  // max_a |p_a(x)| / scale
};

inline const char* to_string(VarietyViolation::Kind k) {
  return k == VarietyViolation::Kind::EigenvalueNotZero ? "eigenvalue_not_zero" : "probe_is_zero";
}

struct VarietyReport {
  double max_residual = 0.0;        // family annihilation residual
  double max_eigen_ratio = 0.0;     // worst joint eigenvalue
  double min_probe_ratio = 0.0;     // worst accepted probe (infinity when none)
  std::size_t probes_tested = 0;
  std::size_t probes_filtered = 0;  // closer than delta to the spectrum
  std::vector<VarietyViolation> violations;
  bool zero_set_pass = false;
};

/// Scale (1 + |x| + max_j ||A_j||_2)^N for comparing |p_a(x)| across tuples.
inline double variety_scale(const CommutingTuple& t, const CPoint& x) {
  return std::pow(1.0 + x.norm() + t.max_norm2(), static_cast<double>(t.n()));
}

inline double max_family_value(const AnnihilatorFamily& fam, const CPoint& x) {
  double m = 0.0;
  for (const auto& p : fam.polys) m = std::max(m, std::abs(p(x)));
  return m;
}

/// Joint eigenvalues must be common zeros and probes at distance >= delta
/// from the spectrum must not be, both measured against tol * scale.
inline VarietyReport spectrum_as_variety_check(const CommutingTuple& t, const AnnihilatorFamily& fam,
                                               std::span<const CPoint> probes, double tol = 1e-6,
                                               double delta = 0.05, const TriangularizeOptions& tri = {}) {
  const JointSpectrum spec = joint_eigenvalues(t, tri);
  VarietyReport rep;
  rep.max_residual = fam.max_residual;
  rep.min_probe_ratio = std::numeric_limits<double>::infinity();
  for (const auto& lambda : spec.points) {
    const double ratio = max_family_value(fam, lambda) / variety_scale(t, lambda);
    rep.max_eigen_ratio = std::max(rep.max_eigen_ratio, ratio);
    if (ratio > tol) rep.violations.push_back({VarietyViolation::Kind::EigenvalueNotZero, lambda, ratio});
  }
  for (const auto& x : probes) {
    if (static_cast<std::size_t>(x.size()) != t.d()) throw InputError("spectrum_as_variety_check: probe dimension");
    if (distance_to_spectrum(spec, x) < delta) {
      ++rep.probes_filtered;
      continue;
    }
    ++rep.probes_tested;
    const double ratio = max_family_value(fam, x) / variety_scale(t, x);
    rep.min_probe_ratio = std::min(rep.min_probe_ratio, ratio);
    if (ratio <= tol) rep.violations.push_back({VarietyViolation::Kind::ProbeIsZero, x, ratio});
  }
  rep.zero_set_pass = rep.violations.empty();
  return rep;
}

}  // namespace jointspec
