#pragma once

// Berger-Coburn-Lebow symbols phi_j(z) = P_j^perp U_j + z P_j U_j, the
// varieties swept out by their joint eigenvalues over the closed disk, and the
// checks tying purity of the model to distinguished varieties.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "jointspec/cayley_hamilton.hpp"
#include "jointspec/grid.hpp"
#include "jointspec/mpoly.hpp"
#include "jointspec/parallel.hpp"
#include "jointspec/tuple_spectrum.hpp"

namespace jointspec {

class BCLData {
public:
  struct Options {
    double tol = 1e-8;                   // projection, unitary, commutator and product-law certificates
    PolarGrid validation{8, 32};
  };

  static BCLData make(std::vector<CMatrix> projections, std::vector<CMatrix> unitaries, const Options& opt) {
    if (projections.empty() || projections.size() != unitaries.size()) {
      throw InputError("BCLData: need the same positive number of projections and unitaries");
    }
    const auto n = projections.front().rows();
    for (std::size_t j = 0; j < projections.size(); ++j) {
      const std::string pj = "BCLData projection " + std::to_string(j);
      const std::string uj = "BCLData unitary " + std::to_string(j);
      require_square(projections[j], pj.c_str());
      require_square(unitaries[j], uj.c_str());
      require_finite(projections[j], pj.c_str());
      require_finite(unitaries[j], uj.c_str());
      if (projections[j].rows() != n || unitaries[j].rows() != n) {
        throw InputError("BCLData: all matrices must be " + std::to_string(n) + "x" + std::to_string(n));
      }
      const CMatrix& p = projections[j];
      if ((p * p - p).norm() > opt.tol || (p - p.adjoint()).norm() > opt.tol) {
        throw InputError(pj + " is not an orthogonal projection");
      }
      const CMatrix& u = unitaries[j];
      if ((u.adjoint() * u - CMatrix::Identity(n, n)).norm() > opt.tol) throw InputError(uj + " is not unitary");
    }
    BCLData b(std::move(projections), std::move(unitaries));
    const auto [comm, prod] = b.validation_residuals(opt.validation);
    if (comm > opt.tol) {
      throw InputError("BCLData: symbols do not commute on the validation grid (residual " + std::to_string(comm) + ")");
    }
    if (prod > opt.tol) {
      throw InputError("BCLData: product of symbols differs from zI (residual " + std::to_string(prod) + ")");
    }
    return b;
  }

  static BCLData make(std::vector<CMatrix> projections, std::vector<CMatrix> unitaries) {
    return make(std::move(projections), std::move(unitaries), Options{});
  }

  Eigen::Index n() const noexcept { return p_.front().rows(); }
  std::size_t d() const noexcept { return p_.size(); }
  const std::vector<CMatrix>& projections() const noexcept { return p_; }
  const std::vector<CMatrix>& unitaries() const noexcept { return u_; }

  /// P_j^perp U_j, the value of phi_j at 0.
  CMatrix constant_term(std::size_t j) const { return u_[j] - p_[j] * u_[j]; }
  /// P_j U_j, the coefficient of z.
  CMatrix linear_term(std::size_t j) const { return p_[j] * u_[j]; }

  CMatrix phi(std::size_t j, Complex z) const { return constant_term(j) + z * linear_term(j); }

  std::vector<CMatrix> phis(Complex z) const {
    std::vector<CMatrix> out;
    out.reserve(d());
    for (std::size_t j = 0; j < d(); ++j) out.push_back(phi(j, z));
    return out;
  }

  /// ||prod_j phi_j(z) - z I||_F
  double product_residual(Complex z) const {
    CMatrix prod = phi(0, z);
    for (std::size_t j = 1; j < d(); ++j) prod = prod * phi(j, z);
    prod.diagonal().array() -= z;
    return prod.norm();
  }

  double commutator_residual(Complex z) const {
    const auto ph = phis(z);
    double r = 0.0;
    for (std::size_t i = 0; i < ph.size(); ++i)
      for (std::size_t j = i + 1; j < ph.size(); ++j) r = std::max(r, (ph[i] * ph[j] - ph[j] * ph[i]).norm());
    return r;
  }

  /// Max commutator and product-law residuals over a grid.
  std::pair<double, double> validation_residuals(const PolarGrid& grid) const {
    double comm = 0.0, prod = 0.0;
    for (Complex z : grid.points()) {
      comm = std::max(comm, commutator_residual(z));
      prod = std::max(prod, product_residual(z));
    }
    return {comm, prod};
  }

private:
  BCLData(std::vector<CMatrix> p, std::vector<CMatrix> u) : p_(std::move(p)), u_(std::move(u)) {}

  std::vector<CMatrix> p_;
  std::vector<CMatrix> u_;
};

/// The pair (P^perp U + z P U, U* P + z U* P^perp), i.e. P_2 = U* P^perp U and U_2 = U*.
inline BCLData bcl_pair_from(const CMatrix& p, const CMatrix& u, const BCLData::Options& opt = {}) {
  require_square(p, "bcl_pair_from projection");
  require_square(u, "bcl_pair_from unitary");
  if (p.rows() != u.rows()) throw InputError("bcl_pair_from: projection and unitary differ in size");
  const CMatrix perp = CMatrix::Identity(p.rows(), p.cols()) - p;
  CMatrix p2 = u.adjoint() * perp * u;
  p2 = 0.5 * (p2 + p2.adjoint()).eval();
  return BCLData::make({p, p2}, {u, u.adjoint()}, opt);
}

struct PurityResult {
  enum class Verdict { Pure, NotPure, Inconclusive };
  Verdict verdict = Verdict::Inconclusive;
  double nu = 0.0;
  double power_norm = 0.0;

  bool pure() const { return verdict == Verdict::Pure; }
};

inline const char* to_string(PurityResult::Verdict v) {
  switch (v) {
    case PurityResult::Verdict::Pure: return "pure";
    case PurityResult::Verdict::NotPure: return "not_pure";
    default: return "inconclusive";
  }
}

struct PurityOptions {
  std::size_t n_powers = 512;
  double margin = 1e-4;       // nu in [1 - margin, 1] is inconclusive
  double power_cut = 1e-6;    // powers count as decaying when ||A^n|| < 1 - power_cut
};

/// Purity of the j-th isometry from its symbol constant term A = P_j^perp U_j:
/// nu(A) < 1 and ||A^n|| -> 0 are both computed and must agree. Inside the
/// margin band a decaying power is reported as inconclusive.
inline PurityResult purity_check(const BCLData& b, std::size_t j, const PurityOptions& opt = {}) {
  if (j >= b.d()) throw InputError("purity_check: index out of range");
  if (opt.n_powers == 0) throw InputError("purity_check: n_powers must be positive");
  const CMatrix a = b.constant_term(j);
  PurityResult r;
  r.nu = numerical_radius(a);
  CMatrix power = CMatrix::Identity(a.rows(), a.cols());
  CMatrix base = a;
  for (std::size_t e = opt.n_powers; e > 0; e >>= 1) {
    if (e & 1u) power = power * base;
    base = base * base;
  }
  r.power_norm = norm2(power);
  const bool decays = r.power_norm < 1.0 - opt.power_cut;
  if (r.nu < 1.0 - opt.margin) {
    if (!decays) {
      throw NumericalError("purity_check: numerical radius " + std::to_string(r.nu) + " below 1 but power norm " +
                           std::to_string(r.power_norm) + " does not decay");
    }
    r.verdict = PurityResult::Verdict::Pure;
  } else {
    r.verdict = decays ? PurityResult::Verdict::Inconclusive : PurityResult::Verdict::NotPure;
  }
  return r;
}

struct VarietyPoint {
  CPoint lambda;
  Complex z;
  double residual = 0.0;          // joint eigenvector residual
  double product_residual = 0.0;  // |lambda_1 ... lambda_d - z|
};

struct VarietySample {
  std::size_t d = 0;
  std::vector<VarietyPoint> points;
  std::string grid_spec;
  std::vector<Complex> skipped;  // grid points where triangularization failed

  double max_residual() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.residual);
    return m;
  }
  double max_product_residual() const {
    double m = 0.0;
    for (const auto& p : points) m = std::max(m, p.product_residual);
    return m;
  }
};

namespace detail {

inline bool lambda_less(const CPoint& a, const CPoint& b) {
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (a(j).real() != b(j).real()) return a(j).real() < b(j).real();
    if (a(j).imag() != b(j).imag()) return a(j).imag() < b(j).imag();
  }
  return false;
}

inline std::vector<VarietyPoint> variety_at(const BCLData& b, Complex z) {
  const auto t = CommutingTuple::make(b.phis(z), std::numeric_limits<double>::infinity());
  const JointSpectrum spec = joint_eigenvalues(t);
  std::vector<VarietyPoint> out;
  out.reserve(spec.points.size());
  for (std::size_t k = 0; k < spec.points.size(); ++k) {
    const CPoint& l = spec.points[k];
    Complex prod = 1.0;
    for (Eigen::Index j = 0; j < l.size(); ++j) prod *= l(j);
    out.push_back({l, z, spec.point_residuals[k], std::abs(prod - z)});
  }
  std::sort(out.begin(), out.end(), [](const VarietyPoint& a, const VarietyPoint& c) {
    return lambda_less(a.lambda, c.lambda);
  });
  return out;
}

}  // namespace detail

/// Joint eigenvalues of (phi_1(z), ..., phi_d(z)) for every z on the grid, in
/// grid order and lexicographic in lambda within one z.
inline VarietySample sample_variety(const BCLData& b, const PolarGrid& grid = {}) {
  const auto zs = grid.points();
  std::vector<std::vector<VarietyPoint>> per(zs.size());
  std::vector<char> failed(zs.size(), 0);
  parallel_for(zs.size(), [&](std::size_t i) {
    try {
      per[i] = detail::variety_at(b, zs[i]);
    } catch (const NumericalError&) {
      failed[i] = 1;
    }
  });
  VarietySample s{b.d(), {}, grid.describe(), {}};
  s.points.reserve(zs.size() * static_cast<std::size_t>(b.n()));
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (failed[i]) {
      s.skipped.push_back(zs[i]);
      continue;
    }
    for (auto& p : per[i]) s.points.push_back(std::move(p));
  }
  return s;
}

/// Variety points for an explicit list of source parameters (used for local refinement).
inline VarietySample sample_variety_at(const BCLData& b, std::span<const Complex> zs) {
  VarietySample s{b.d(), {}, "explicit", {}};
  for (Complex z : zs) {
    try {
      for (auto& p : detail::variety_at(b, z)) s.points.push_back(std::move(p));
    } catch (const NumericalError&) {
      s.skipped.push_back(z);
    }
  }
  return s;
}

struct PairPolys {
  MPoly p1;
  MPoly p2;
  MPoly xi;
  double gcd_residual = 0.0;
  bool explicit_formula = false;
};

/// det(phi_i(z_1 z_2) - z_i I) as a polynomial in (z_1, z_2).
inline MPoly pair_component_poly(const BCLData& b, std::size_t i) {
  if (b.d() != 2) throw InputError("pair_component_poly: BCL data must have d = 2");
  const MPoly z1 = MPoly::variable(2, 0), z2 = MPoly::variable(2, 1);
  PolyMatrix m = PolyMatrix::constant(b.constant_term(i), 2);
  m.add_scaled(b.linear_term(i), z1 * z2);
  m.add_diagonal(-MPoly::variable(2, i));
  return det_poly_matrix(m);
}

/// prod_i (z_2 - conj(w_i)) over the eigenvalues w_i of u.
inline MPoly unitary_pair_xi(const CMatrix& u) {
  const MPoly z2 = MPoly::variable(2, 1);
  MPoly xi = MPoly::constant(2, 1.0);
  for (Complex w : eigenvalues(u)) xi = xi * (z2 - MPoly::constant(2, std::conj(w)));
  return xi.pruned(1e-14);
}

enum class XiRoute { Auto, Gcd };

/// p_1, p_2 and their common factor xi, normalized monic. With P = I the
/// product formula over the eigenvalues of U is used unless the gcd route is forced.
inline PairPolys pair_defining_polys(const BCLData& b, XiRoute route = XiRoute::Auto, double gcd_tol = 1e-8) {
  if (b.d() != 2) throw InputError("pair_defining_polys: BCL data must have d = 2");
  PairPolys out{pair_component_poly(b, 0), pair_component_poly(b, 1), MPoly(2), 0.0, false};
  const auto n = b.n();
  const bool p_is_identity = (b.projections()[0] - CMatrix::Identity(n, n)).norm() <= 1e-10;
  if (route == XiRoute::Auto && p_is_identity) {
    out.xi = monic(unitary_pair_xi(b.unitaries()[0]));
    out.explicit_formula = true;
    return out;
  }
  const GcdResult g = approx_gcd_bivariate(out.p1.pruned(1e-13), out.p2.pruned(1e-13), gcd_tol);
  if (g.gcd.is_constant()) {
    throw NumericalError("pair_defining_polys: p1 and p2 came out coprime, but their common zero set is infinite");
  }
  out.xi = g.gcd;
  out.gcd_residual = g.residual;
  return out;
}

/// max over sample points of |xi(lambda)| / (1 + |lambda|)^deg(xi) relative to ||xi||_1.
inline double xi_vanishing_ratio(const MPoly& xi, const VarietySample& s) {
  const double norm = std::max(1.0, xi.norm1());
  const double deg = static_cast<double>(xi.total_degree());
  double worst = 0.0;
  for (const auto& p : s.points) {
    const double scale = norm * std::pow(1.0 + p.lambda.norm(), deg);
    worst = std::max(worst, std::abs(xi(p.lambda)) / scale);
  }
  return worst;
}

struct IsometricAnnihilation {
  std::vector<MPoly> polys;
  std::vector<double> max_residual;  // per alpha, max over grid of ||p_a(Phi(w))||_F / max(1, ||p_a||_1)
  double worst = 0.0;
};

/// p_a(z) = det(sum_j a_j (phi_j(z_1 ... z_d) - z_j I)) for unit a.
inline MPoly isometric_annihilator(const BCLData& b, const CVector& alpha) {
  const std::size_t d = b.d();
  if (static_cast<std::size_t>(alpha.size()) != d) throw InputError("isometric_annihilator: alpha dimension");
  const double norm = alpha.norm();
  if (!std::isfinite(norm)) throw InputError("isometric_annihilator: alpha is not finite");
  if (norm == 0.0) return MPoly(d);
  const CVector a = alpha / norm;
  const auto n = b.n();
  CMatrix c0 = CMatrix::Zero(n, n), c1 = CMatrix::Zero(n, n);
  MPoly linear(d);
  for (std::size_t j = 0; j < d; ++j) {
    const Complex aj = a(static_cast<Eigen::Index>(j));
    c0 += aj * b.constant_term(j);
    c1 += aj * b.linear_term(j);
    linear += MPoly::variable(d, j) * aj;
  }
  MPoly product = MPoly::constant(d, 1.0);
  for (std::size_t j = 0; j < d; ++j) product = product * MPoly::variable(d, j);
  PolyMatrix m = PolyMatrix::constant(c0, d);
  m.add_scaled(c1, product);
  m.add_diagonal(-linear);
  return det_poly_matrix(m);
}

/// Checks that each p_a evaluated at the commuting matrices (phi_j(w)) vanishes on the grid.
inline IsometricAnnihilation annihilator_check_isometric(const BCLData& b, const AlphaSet& alphas,
                                                         const PolarGrid& grid = {}) {
  if (b.d() < 2) throw InputError("annihilator_check_isometric: need d >= 2");
  if (alphas.d != b.d()) throw InputError("annihilator_check_isometric: alpha dimension does not match");
  IsometricAnnihilation out;
  out.polys.reserve(alphas.count());
  for (const auto& a : alphas.vectors) out.polys.push_back(isometric_annihilator(b, a));
  out.max_residual.assign(alphas.count(), 0.0);
  const auto zs = grid.points();
  std::vector<std::vector<double>> per(zs.size());
  parallel_for(zs.size(), [&](std::size_t i) {
    const auto ph = b.phis(zs[i]);
    per[i].resize(out.polys.size());
    for (std::size_t k = 0; k < out.polys.size(); ++k) {
      per[i][k] = eval_matrices(out.polys[k], ph).norm() / std::max(1.0, out.polys[k].norm1());
    }
  });
  for (const auto& row : per)
    for (std::size_t k = 0; k < row.size(); ++k) out.max_residual[k] = std::max(out.max_residual[k], row[k]);
  for (double r : out.max_residual) out.worst = std::max(out.worst, r);
  return out;
}

struct DistinguishedResult {
  bool is_distinguished = false;
  bool meets_open_polydisk = false;
  std::vector<VarietyPoint> witnesses;  // points on the polydisk boundary off the torus
};

/// Distinguished-variety test on a sample. A point is on the boundary of the
/// closed polydisk when max_j |lambda_j| >= 1 - tol; it must then lie on the
/// torus, min_j |lambda_j| >= 1 - tol. Points over |z| = 1 must be on the torus,
/// and some point must lie in the open polydisk.
inline DistinguishedResult distinguished_check(const VarietySample& s, double tol_boundary = 1e-6,
                                               std::size_t max_witnesses = 16) {
  if (s.points.empty()) throw InputError("distinguished_check: empty sample");
  DistinguishedResult r;
  std::size_t violations = 0;
  for (const auto& p : s.points) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (Eigen::Index j = 0; j < p.lambda.size(); ++j) {
      const double m = std::abs(p.lambda(j));
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
    if (hi < 1.0 - tol_boundary) r.meets_open_polydisk = true;
    const bool on_boundary = hi >= 1.0 - tol_boundary;
    const bool on_torus = lo >= 1.0 - tol_boundary && hi <= 1.0 + tol_boundary;
    const bool source_on_circle = std::abs(std::abs(p.z) - 1.0) <= 1e-12;
    if ((on_boundary || source_on_circle) && !on_torus) {
      ++violations;
      if (r.witnesses.size() < max_witnesses) r.witnesses.push_back(p);
    }
  }
  r.is_distinguished = r.meets_open_polydisk && violations == 0;
  return r;
}

/// Adds {a_i} x D and D x {b_j} to a pair variety sample, D sampled by the grid.
inline VarietySample direct_sum_variety(const VarietySample& base, std::span<const Complex> alphas_u,
                                        std::span<const Complex> betas_u, const PolarGrid& grid = {}) {
  if (!base.points.empty() && base.d != 2) throw InputError("direct_sum_variety: base must have d = 2");
  for (Complex c : alphas_u)
    if (std::abs(std::abs(c) - 1.0) > 1e-10) throw InputError("direct_sum_variety: alpha values must be unimodular");
  for (Complex c : betas_u)
    if (std::abs(std::abs(c) - 1.0) > 1e-10) throw InputError("direct_sum_variety: beta values must be unimodular");
  VarietySample out = base;
  out.d = 2;
  const auto disk = grid.points();
  auto add = [&](Complex l1, Complex l2) {
    CPoint l(2);
    l << l1, l2;
    out.points.push_back({std::move(l), l1 * l2, 0.0, 0.0});
  };
  for (Complex a : alphas_u)
    for (Complex mu : disk) add(a, mu);
  for (Complex b : betas_u)
    for (Complex mu : disk) add(mu, b);
  return out;
}

}  // namespace jointspec
