#pragma once

// Generators of commuting contractive rational symbol families with a known
// polynomial vanishing on their spectrum union.

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "jointspec/mpoly.hpp"
#include "jointspec/random.hpp"
#include "jointspec/rational_symbols.hpp"

namespace jointspec {

struct SymbolFamilyCase {
  SymbolFamily family;
  MPoly xi;  // in k variables, xi(phi(z)) nilpotent for every z
};

namespace detail {

/// Coefficients (c0, c1, c2) of a quadratic in z.
using Quadratic = std::array<Complex, 3>;

inline Quadratic quad_mul(Complex u0, Complex u1, Complex v0, Complex v1) {
  return {u0 * v0, u0 * v1 + u1 * v0, u1 * v1};
}

/// Sylvester resultant in z of w q1(z) - c1 n1(z) and w' q2(z) - c2 n2(z), a
/// polynomial in (w, w') vanishing on {(c1 n1/q1, c2 n2/q2)(z)}.
inline MPoly quadratic_resultant(const Quadratic& q1, const Quadratic& n1, Complex c1, const Quadratic& q2,
                                 const Quadratic& n2, Complex c2) {
  const MPoly w1 = MPoly::variable(2, 0), w2 = MPoly::variable(2, 1);
  std::array<MPoly, 3> f{MPoly(2), MPoly(2), MPoly(2)}, g{MPoly(2), MPoly(2), MPoly(2)};
  for (std::size_t j = 0; j < 3; ++j) {
    f[j] = w1 * q1[j] - MPoly::constant(2, c1 * n1[j]);
    g[j] = w2 * q2[j] - MPoly::constant(2, c2 * n2[j]);
  }
  PolyMatrix s(4, 2);
  for (std::size_t r = 0; r < 2; ++r)
    for (std::size_t j = 0; j < 3; ++j) {
      s.set(r, r + j, f[2 - j]);
      s.set(r + 2, r + j, g[2 - j]);
    }
  return det_poly_matrix(s);
}

}  // namespace detail

/// phi_i(z) = U diag(c_il n_il(z)) U* / q_i(z) with q_i = (1 - conj(a_i) z)(1 - conj(b_i) z),
/// each n_il a product of (z - a_i) or (1 - conj(a_i) z) with (z - b_i) or (1 - conj(b_i) z),
/// |a_i|, |b_i| <= 0.7 and |c_il| <= 1. Every eigenvalue curve is a pair of
/// Blaschke-type maps, and xi is the product of their eliminants.
inline SymbolFamilyCase random_contractive_family(Rng& rng, std::size_t n, const SymbolOptions& opt = {}) {
  if (n == 0) throw InputError("random_contractive_family: n must be positive");
  constexpr std::size_t k = 2;
  const auto ni = static_cast<Eigen::Index>(n);
  const CMatrix u = random_unitary(ni, rng);
  std::array<Complex, k> a{}, b{};
  std::array<detail::Quadratic, k> q{};
  for (std::size_t i = 0; i < k; ++i) {
    a[i] = random_in_disk(rng, 0.7);
    b[i] = random_in_disk(rng, 0.7);
    q[i] = detail::quad_mul(1.0, -std::conj(a[i]), 1.0, -std::conj(b[i]));
  }
  const MPoly z = MPoly::variable(1, 0);
  std::vector<PolyMatrix> numerators(k, PolyMatrix(n, 1));
  MPoly xi = MPoly::constant(2, 1.0);
  for (std::size_t l = 0; l < n; ++l) {
    std::array<detail::Quadratic, k> num{};
    std::array<Complex, k> c{};
    std::array<bool, k> constant{};
    for (std::size_t i = 0; i < k; ++i) {
      const bool inner_a = random_uniform(rng) < 0.5;
      const bool inner_b = random_uniform(rng) < 0.5;
      const Complex a0 = inner_a ? -a[i] : 1.0, a1 = inner_a ? 1.0 : -std::conj(a[i]);
      const Complex b0 = inner_b ? -b[i] : 1.0, b1 = inner_b ? 1.0 : -std::conj(b[i]);
      num[i] = detail::quad_mul(a0, a1, b0, b1);
      c[i] = random_in_disk(rng, 1.0);
      constant[i] = !inner_a && !inner_b;
      const CMatrix e = u.col(static_cast<Eigen::Index>(l)) * u.col(static_cast<Eigen::Index>(l)).adjoint();
      const MPoly entry = MPoly::constant(1, c[i] * num[i][0]) + z * (c[i] * num[i][1]) +
                          z.pow(2) * (c[i] * num[i][2]);
      numerators[i].add_scaled(e, entry);
    }
    MPoly factor(2);
    if (constant[0] || constant[1]) {
      const std::size_t i = constant[0] ? 0 : 1;
      factor = MPoly::variable(2, i) - MPoly::constant(2, c[i]);
    } else {
      factor = detail::quadratic_resultant(q[0], num[0], c[0], q[1], num[1], c[1]);
      factor *= 1.0 / factor.max_abs_coefficient();
    }
    xi = (xi * factor).pruned(1e-15);
  }
  std::vector<RationalMatrixFunction> symbols;
  for (std::size_t i = 0; i < k; ++i) {
    const MPoly den = MPoly::constant(1, q[i][0]) + z * q[i][1] + z.pow(2) * q[i][2];
    symbols.push_back(RationalMatrixFunction::make(std::move(numerators[i]), den, opt));
  }
  return {SymbolFamily::make(n, 1, std::move(symbols), opt), std::move(xi)};
}

/// phi_1(z) = [[z, 1], [0, z]] / 2 and phi_2(z) = z I / 2 with xi = 2 (w_1 - w_2):
/// xi(phi(z)) is the 2 x 2 nilpotent Jordan block, so the exponent is exactly n = 2.
inline SymbolFamilyCase jordan_symbol_family(const SymbolOptions& opt = {}) {
  const MPoly z = MPoly::variable(1, 0);
  const MPoly half_z = z * 0.5;
  PolyMatrix f1(2, 1), f2(2, 1);
  f1.set(0, 0, half_z);
  f1.set(1, 1, half_z);
  f1.set(0, 1, MPoly::constant(1, 0.5));
  f2.set(0, 0, half_z);
  f2.set(1, 1, half_z);
  std::vector<RationalMatrixFunction> symbols;
  symbols.push_back(RationalMatrixFunction::polynomial(std::move(f1), opt));
  symbols.push_back(RationalMatrixFunction::polynomial(std::move(f2), opt));
  MPoly xi = (MPoly::variable(2, 0) - MPoly::variable(2, 1)) * 2.0;
  return {SymbolFamily::make(2, 1, std::move(symbols), opt), std::move(xi)};
}

}  // namespace jointspec
