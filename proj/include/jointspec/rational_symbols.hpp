#pragma once

// Matrix-valued rational functions F(z)/q(z) on the closed polydisk, commuting
// families of them, and the symbol-level checks behind the spectrum-union
// identities for the Toeplitz tuples they define.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "jointspec/bcl_model.hpp"
#include "jointspec/cayley_hamilton.hpp"
#include "jointspec/grid.hpp"
#include "jointspec/mpoly.hpp"
#include "jointspec/parallel.hpp"
#include "jointspec/tuple_spectrum.hpp"

namespace jointspec {

/// Validation grid and tolerances shared by symbol certification.
struct SymbolOptions {
  PolarGrid validation{12, 24};
  double contractive_tol = 1e-8;
  double commute_tol = 1e-8;
  std::size_t max_validation_points = 200'000;
};

namespace detail {

inline std::vector<CPoint> validation_points(std::size_t d, const SymbolOptions& opt) {
  PolarGrid g = opt.validation;
  // Coarsen per-variable grids until the tensor product fits the budget.
  while (d > 1 && std::pow(static_cast<double>(g.size()), static_cast<double>(d)) >
                      static_cast<double>(opt.max_validation_points)) {
    g.radii = std::max<std::size_t>(2, g.radii / 2);
    g.angles = std::max<std::size_t>(4, g.angles / 2);
    if (g.radii == 2 && g.angles == 4) break;
  }
  return tensor_polar_grid(d, g, opt.max_validation_points);
}

}  // namespace detail

class RationalMatrixFunction {
public:
  static RationalMatrixFunction make(PolyMatrix numerator, MPoly denominator, const SymbolOptions& opt = {}) {
    if (numerator.nvars() != denominator.nvars()) {
      throw InputError("RationalMatrixFunction: numerator and denominator use different variable counts");
    }
    if (numerator.nvars() == 0) throw InputError("RationalMatrixFunction: need at least one variable");
    if (denominator.is_zero()) throw InputError("RationalMatrixFunction: zero denominator");
    RationalMatrixFunction f(std::move(numerator), std::move(denominator));
    f.q_min_ = std::numeric_limits<double>::infinity();
    double worst_norm = 0.0;
    for (const auto& z : detail::validation_points(f.d(), opt)) {
      const double qz = std::abs(f.q_(z));
      f.q_min_ = std::min(f.q_min_, qz);
      if (qz == 0.0) break;
      worst_norm = std::max(worst_norm, norm2(f.f_.eval(z)) / qz);
    }
    if (!(f.q_min_ > 0.0)) throw InputError("RationalMatrixFunction: denominator vanishes on the closed polydisk");
    if (worst_norm > 1.0 + opt.contractive_tol) {
      throw InputError("RationalMatrixFunction: not contractive on the polydisk (norm " + std::to_string(worst_norm) + ")");
    }
    return f;
  }

  /// Constant-denominator symbol from a matrix polynomial.
  static RationalMatrixFunction polynomial(PolyMatrix numerator, const SymbolOptions& opt = {}) {
    const std::size_t nv = numerator.nvars();
    return make(std::move(numerator), MPoly::constant(nv, 1.0), opt);
  }

  std::size_t n() const noexcept { return f_.n(); }
  std::size_t d() const noexcept { return f_.nvars(); }
  const PolyMatrix& numerator() const noexcept { return f_; }
  const MPoly& denominator() const noexcept { return q_; }
  double q_min() const noexcept { return q_min_; }

  /// z -> conj(F(conj z))^T / conj(q(conj z)), the symbol of the adjoint Toeplitz operator's
  /// co-analytic partner; its spectra are the conjugates of the original ones.
  RationalMatrixFunction adjoint() const {
    auto conj_poly = [](const MPoly& p) {
      MPoly out(p.nvars());
      for (const auto& [e, c] : p.terms()) out.add_term(e, std::conj(c));
      return out;
    };
    PolyMatrix f(n(), d());
    for (std::size_t r = 0; r < n(); ++r)
      for (std::size_t c = 0; c < n(); ++c) f.set(r, c, conj_poly(f_(c, r)));
    RationalMatrixFunction out(std::move(f), conj_poly(q_));
    out.q_min_ = q_min_;
    return out;
  }

private:
  RationalMatrixFunction(PolyMatrix f, MPoly q) : f_(std::move(f)), q_(std::move(q)) {}

  PolyMatrix f_;
  MPoly q_;
  double q_min_ = 0.0;

  friend CMatrix eval_symbol(const RationalMatrixFunction& f, const CPoint& z, bool* outside);
};

/// F(z) / q(z). Sets *outside when z lies outside the closed polydisk.
inline CMatrix eval_symbol(const RationalMatrixFunction& f, const CPoint& z, bool* outside = nullptr) {
  if (static_cast<std::size_t>(z.size()) != f.d()) throw InputError("eval_symbol: point dimension mismatch");
  if (outside) {
    *outside = false;
    for (Eigen::Index j = 0; j < z.size(); ++j)
      if (std::abs(z(j)) > 1.0 + 1e-12) *outside = true;
  }
  const Complex qz = f.q_(z);
  if (std::abs(qz) < 0.5 * f.q_min_) {
    throw NumericalError("eval_symbol: denominator " + std::to_string(std::abs(qz)) + " below half its certified minimum");
  }
  return f.f_.eval(z) / qz;
}

class SymbolFamily {
public:
  static SymbolFamily make(std::size_t n, std::size_t d, std::vector<RationalMatrixFunction> symbols,
                           const SymbolOptions& opt = {}) {
    if (n == 0 || d == 0) throw InputError("SymbolFamily: n and d must be positive");
    for (const auto& s : symbols) {
      if (s.n() != n || s.d() != d) throw InputError("SymbolFamily: symbols must share n and d");
    }
    SymbolFamily fam(n, d, std::move(symbols));
    if (fam.k() > 1) {
      for (const auto& z : detail::validation_points(d, opt)) {
        const auto vals = fam.eval(z);
        for (std::size_t i = 0; i < vals.size(); ++i)
          for (std::size_t j = i + 1; j < vals.size(); ++j)
            fam.comm_ = std::max(fam.comm_, (vals[i] * vals[j] - vals[j] * vals[i]).norm());
      }
    }
    if (fam.comm_ > opt.commute_tol) {
      throw InputError("SymbolFamily: symbols do not commute (residual " + std::to_string(fam.comm_) + ")");
    }
    return fam;
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t d() const noexcept { return d_; }
  std::size_t k() const noexcept { return symbols_.size(); }
  const std::vector<RationalMatrixFunction>& symbols() const noexcept { return symbols_; }
  double commutativity_residual() const noexcept { return comm_; }

  std::vector<CMatrix> eval(const CPoint& z) const {
    std::vector<CMatrix> out;
    out.reserve(k());
    for (const auto& s : symbols_) out.push_back(eval_symbol(s, z));
    return out;
  }

  SymbolFamily adjoint() const {
    std::vector<RationalMatrixFunction> s;
    for (const auto& f : symbols_) s.push_back(f.adjoint());
    return SymbolFamily(n_, d_, std::move(s), comm_);
  }

private:
  SymbolFamily(std::size_t n, std::size_t d, std::vector<RationalMatrixFunction> s, double comm = 0.0)
      : n_(n), d_(d), symbols_(std::move(s)), comm_(comm) {}

  std::size_t n_;
  std::size_t d_;
  std::vector<RationalMatrixFunction> symbols_;
  double comm_ = 0.0;
};

/// BCL pencils as a one-variable polynomial symbol family.
inline SymbolFamily symbol_family_from_bcl(const BCLData& b, const SymbolOptions& opt = {}) {
  const auto n = static_cast<std::size_t>(b.n());
  std::vector<RationalMatrixFunction> s;
  for (std::size_t j = 0; j < b.d(); ++j) {
    PolyMatrix f = PolyMatrix::constant(b.constant_term(j), 1);
    f.add_scaled(b.linear_term(j), MPoly::variable(1, 0));
    s.push_back(RationalMatrixFunction::polynomial(std::move(f), opt));
  }
  return SymbolFamily::make(n, 1, std::move(s), opt);
}

struct UnionPoint {
  CPoint source;
  CPoint lambda;
  double residual = 0.0;
};

struct UnionSample {
  std::size_t source_dim = 0;
  std::size_t dim = 0;
  std::vector<UnionPoint> points;
  std::string grid_spec;
  std::vector<CPoint> skipped;
};

/// Default per-variable grid for symbol sampling.
inline PolarGrid default_symbol_grid() { return PolarGrid{24, 48}; }

/// Joint eigenvalues of (phi_1(z), ..., phi_k(z)) over a tensor polar grid of the closed polydisk.
inline UnionSample spectrum_union_sample(const SymbolFamily& fam, const PolarGrid& grid = default_symbol_grid(),
                                         std::size_t max_points = 1'000'000) {
  if (fam.k() == 0) throw InputError("spectrum_union_sample: family is empty");
  const auto zs = tensor_polar_grid(fam.d(), grid, max_points);
  std::vector<std::vector<UnionPoint>> per(zs.size());
  std::vector<char> failed(zs.size(), 0);
  parallel_for(zs.size(), [&](std::size_t i) {
    try {
      const auto t = CommutingTuple::make(fam.eval(zs[i]), std::numeric_limits<double>::infinity());
      const JointSpectrum spec = joint_eigenvalues(t);
      for (std::size_t m = 0; m < spec.points.size(); ++m) {
        per[i].push_back({zs[i], spec.points[m], spec.point_residuals[m]});
      }
      std::sort(per[i].begin(), per[i].end(), [](const UnionPoint& a, const UnionPoint& b) {
        return detail::lambda_less(a.lambda, b.lambda);
      });
    } catch (const NumericalError&) {
      failed[i] = 1;
    }
  });
  UnionSample s{fam.d(), fam.k(), {}, grid.describe() + " per variable", {}};
  for (std::size_t i = 0; i < zs.size(); ++i) {
    if (failed[i]) {
      s.skipped.push_back(zs[i]);
      continue;
    }
    for (auto& p : per[i]) s.points.push_back(std::move(p));
  }
  return s;
}

/// Points (z, lambda) of the union of sigma(z_1 I, ..., z_d I, phi(z)); with k = 0 this is the grid itself.
inline UnionSample full_tuple_union_sample(const SymbolFamily& fam, const PolarGrid& grid = default_symbol_grid(),
                                           std::size_t max_points = 1'000'000) {
  const std::size_t d = fam.d();
  UnionSample out{d, d + fam.k(), {}, grid.describe() + " per variable", {}};
  if (fam.k() == 0) {
    for (auto& z : tensor_polar_grid(d, grid, max_points)) out.points.push_back({z, z, 0.0});
    return out;
  }
  UnionSample base = spectrum_union_sample(fam, grid, max_points);
  out.skipped = std::move(base.skipped);
  out.points.reserve(base.points.size());
  for (auto& p : base.points) {
    CPoint full(static_cast<Eigen::Index>(d + fam.k()));
    full << p.source, p.lambda;
    out.points.push_back({std::move(p.source), std::move(full), p.residual});
  }
  return out;
}

struct NilpotencyReport {
  bool passes = false;
  std::size_t r_used = 0;            // max over the grid of the minimal exponent
  double max_spectral_radius = 0.0;  // of xi(phi(z)), informational
  std::vector<CPoint> witnesses;     // grid points where xi(phi(z)) is not nilpotent
};

/// For each grid z, M(z) = xi(phi(z)) must be nilpotent. The minimal r with
/// ||M^r|| <= tol s^r is recorded, where s = max(1, ||xi||_1 max(1, max_i ||phi_i(z)||)^deg xi)
/// bounds ||M|| before cancellation. Nilpotency is decided by the powers because
/// computed eigenvalues of an index-r nilpotent carry errors of order eps^{1/r}.
inline NilpotencyReport nilpotency_annihilation_check(const SymbolFamily& fam, const MPoly& xi,
                                                      const PolarGrid& grid = default_symbol_grid(),
                                                      double tol = 1e-8, std::size_t max_witnesses = 16) {
  if (xi.nvars() != fam.k()) throw InputError("nilpotency_annihilation_check: xi must have k variables");
  const auto zs = tensor_polar_grid(fam.d(), grid);
  const std::size_t n = fam.n();
  std::vector<std::size_t> r(zs.size(), 0);  // 0 marks a failure
  std::vector<double> rho(zs.size(), 0.0);
  parallel_for(zs.size(), [&](std::size_t i) {
    const auto vals = fam.eval(zs[i]);
    const CMatrix m = eval_matrices(xi, vals);
    rho[i] = spectral_radius(m);
    double phi_norm = 1.0;
    for (const auto& v : vals) phi_norm = std::max(phi_norm, norm2(v));
    const double scale =
        std::max(1.0, xi.norm1() * std::pow(phi_norm, static_cast<double>(xi.total_degree())));
    CMatrix power = m;
    for (std::size_t e = 1; e <= n; ++e) {
      if (norm2(power) <= tol * std::pow(scale, static_cast<double>(e))) {
        r[i] = e;
        return;
      }
      power = power * m;
    }
  });
  NilpotencyReport rep;
  rep.passes = true;
  for (std::size_t i = 0; i < zs.size(); ++i) {
    rep.max_spectral_radius = std::max(rep.max_spectral_radius, rho[i]);
    if (r[i] == 0) {
      rep.passes = false;
      if (rep.witnesses.size() < max_witnesses) rep.witnesses.push_back(zs[i]);
    } else {
      rep.r_used = std::max(rep.r_used, r[i]);
    }
  }
  return rep;
}

/// p_a(z, w) = det(sum_i a_i p_i(z) (F_i(z) - w_i q_i(z) I)) with p_i = prod_{j != i} q_j,
/// in d + k variables (z first). The unit vector a / |a| is used.
inline MPoly symbol_annihilator(const SymbolFamily& fam, const CVector& alpha, const DetOptions& opt = {}) {
  const std::size_t d = fam.d(), k = fam.k(), n = fam.n(), nv = d + k;
  if (static_cast<std::size_t>(alpha.size()) != k) throw InputError("symbol_annihilator: alpha must have k entries");
  const double norm = alpha.norm();
  if (!std::isfinite(norm)) throw InputError("symbol_annihilator: alpha is not finite");
  if (norm == 0.0) return MPoly(nv);
  const CVector a = alpha / norm;
  std::vector<MPoly> q;
  for (const auto& s : fam.symbols()) q.push_back(s.denominator().extended(nv));
  PolyMatrix m(n, nv);
  for (std::size_t i = 0; i < k; ++i) {
    MPoly p_i = MPoly::constant(nv, a(static_cast<Eigen::Index>(i)));
    for (std::size_t j = 0; j < k; ++j)
      if (j != i) p_i = p_i * q[j];
    const PolyMatrix& f = fam.symbols()[i].numerator();
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        MPoly entry = m(r, c) + p_i * f(r, c).extended(nv);
        if (r == c) entry -= p_i * q[i] * MPoly::variable(nv, d + i);
        m.set(r, c, std::move(entry));
      }
  }
  return det_poly_matrix(m, opt);
}

struct SymbolPaReport {
  std::vector<MPoly> polys;
  std::vector<double> max_ratio;  // per alpha: max over grid of ||p_a(z, phi(z))||_F / max(1, ||p_a(z, .)||_1)
  double worst = 0.0;
  CPoint worst_z;
  std::size_t worst_alpha = 0;
};

/// Verifies p_a(z I, phi(z)) = 0 over the grid for each alpha.
inline SymbolPaReport symbol_level_pa_check(const SymbolFamily& fam, const AlphaSet& alphas,
                                            const PolarGrid& grid = default_symbol_grid()) {
  if (alphas.d != fam.k()) throw InputError("symbol_level_pa_check: alphas must have k entries");
  SymbolPaReport rep;
  for (const auto& a : alphas.vectors) rep.polys.push_back(symbol_annihilator(fam, a));
  const auto zs = tensor_polar_grid(fam.d(), grid);
  std::vector<std::vector<double>> per(zs.size(), std::vector<double>(alphas.count(), 0.0));
  parallel_for(zs.size(), [&](std::size_t i) {
    const auto vals = fam.eval(zs[i]);
    const std::span<const Complex> z(zs[i].data(), static_cast<std::size_t>(zs[i].size()));
    for (std::size_t k = 0; k < rep.polys.size(); ++k) {
      if (rep.polys[k].is_zero()) continue;
      const MPoly in_w = rep.polys[k].substitute_leading(z);
      per[i][k] = eval_matrices(in_w, vals).norm() / std::max(1.0, in_w.norm1());
    }
  });
  rep.max_ratio.assign(alphas.count(), 0.0);
  rep.worst_z = zs.empty() ? CPoint() : zs.front();
  for (std::size_t i = 0; i < zs.size(); ++i) {
    for (std::size_t k = 0; k < alphas.count(); ++k) {
      rep.max_ratio[k] = std::max(rep.max_ratio[k], per[i][k]);
      if (per[i][k] > rep.worst) {
        rep.worst = per[i][k];
        rep.worst_z = zs[i];
        rep.worst_alpha = k;
      }
    }
  }
  return rep;
}

}  // namespace jointspec
