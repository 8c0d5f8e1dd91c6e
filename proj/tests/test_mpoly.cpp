#include <gtest/gtest.h>

#include "jointspec/mpoly.hpp"
#include "jointspec/random.hpp"

namespace js = jointspec;
using js::CMatrix;
using js::Complex;
using js::MPoly;

namespace {

MPoly z(std::size_t nvars, std::size_t i) { return MPoly::variable(nvars, i); }
MPoly c(std::size_t nvars, Complex v) { return MPoly::constant(nvars, v); }

MPoly random_poly(js::Rng& rng, std::size_t nvars, unsigned max_deg, int terms) {
  MPoly p(nvars);
  std::uniform_int_distribution<unsigned> deg(0, max_deg);
  for (int t = 0; t < terms; ++t) {
    js::Exponent e(nvars);
    for (auto& k : e) k = deg(rng);
    p.add_term(e, js::random_gaussian(rng));
  }
  return p;
}

// Leibniz expansion with MPoly arithmetic; independent of the interpolation path.
MPoly leibniz_det(const js::PolyMatrix& m) {
  const std::size_t n = m.n();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  MPoly acc(m.nvars());
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    MPoly term = c(m.nvars(), inversions % 2 ? -1.0 : 1.0);
    for (std::size_t i = 0; i < n; ++i) term = term * m(i, perm[i]);
    acc += term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc;
}

double coefficient_distance(const MPoly& a, const MPoly& b) {
  return (a - b).max_abs_coefficient();
}

// Relative least-squares residual of f = g * s; brute force over all quotient
// coefficients, independent of the gcd routine's internals.
double division_residual(const MPoly& f, const MPoly& g) {
  const unsigned f1 = f.degree_in(0), f2 = f.degree_in(1);
  const unsigned g1 = g.degree_in(0), g2 = g.degree_in(1);
  if (g1 > f1 || g2 > f2) return 1.0;
  const unsigned s1 = f1 - g1, s2 = f2 - g2;
  const auto rows = static_cast<Eigen::Index>((f1 + 1) * (f2 + 1));
  const auto cols = static_cast<Eigen::Index>((s1 + 1) * (s2 + 1));
  CMatrix a = CMatrix::Zero(rows, cols);
  js::CVector b = js::CVector::Zero(rows);
  for (const auto& [e, v] : f.terms()) b(e[0] * (f2 + 1) + e[1]) = v;
  for (unsigned i = 0; i <= s1; ++i)
    for (unsigned j = 0; j <= s2; ++j)
      for (const auto& [e, v] : g.terms()) a((e[0] + i) * (f2 + 1) + e[1] + j, i * (s2 + 1) + j) += v;
  const js::CVector s = a.colPivHouseholderQr().solve(b);
  return (a * s - b).norm() / b.norm();
}

}  // namespace

TEST(MPoly, EvalScalarExamples) {
  const MPoly p = z(2, 0) * z(2, 1);
  EXPECT_EQ(p(js::CPoint{{2.0, 3.0}}), Complex(6.0));
  EXPECT_EQ(MPoly(2)(js::CPoint{{5.0, -1.0}}), Complex(0.0));
  const MPoly q = z(2, 0) * z(2, 0) - z(2, 1);
  EXPECT_LT(std::abs(q(js::CPoint{{Complex(1, 1), Complex(0, 2)}})), 1e-15);
  EXPECT_THROW(q(js::CPoint{{1.0}}), js::InputError);
}

TEST(MPoly, ArithmeticDropsCancellations) {
  const MPoly p = z(2, 0) + z(2, 1);
  const MPoly zero = p - p;
  EXPECT_TRUE(zero.is_zero());
  EXPECT_EQ(zero.total_degree(), 0u);
  EXPECT_THROW(z(2, 0) + z(3, 0), js::InputError);
}

TEST(MPoly, EvaluationIsRingHomomorphism) {
  js::Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const MPoly p = random_poly(rng, 3, 3, 6), q = random_poly(rng, 3, 3, 6);
    const js::CPoint x = js::random_in_polydisk(rng, 3, 1.5);
    const Complex lhs = (p * q)(x);
    const Complex rhs = p(x) * q(x);
    EXPECT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST(MPoly, MatrixTupleEvaluation) {
  js::Rng rng(2);
  const CMatrix a = js::random_gaussian_matrix(4, rng);
  const auto pair = js::CommutingTuple::make({a, a});
  EXPECT_LT(js::eval_matrix_tuple(z(2, 0) - z(2, 1), pair).norm(), 1e-14);
  const MPoly comm = z(2, 0) * z(2, 1) - z(2, 1) * z(2, 0);
  EXPECT_TRUE(comm.is_zero());
  EXPECT_LT(js::eval_matrix_tuple(comm, pair).norm(), 1e-14);

  // Classical Cayley-Hamilton: det(A - zI) at A vanishes.
  js::PolyMatrix m = js::PolyMatrix::constant(a, 1);
  m.add_diagonal(-z(1, 0));
  const MPoly chi = js::det_poly_matrix(m);
  const auto single = js::CommutingTuple::make({a});
  EXPECT_LT(js::eval_matrix_tuple(chi, single).norm(), 1e-10 * std::pow(1.0 + a.norm(), 4));
}

TEST(MPoly, MatrixEvaluationIsHomomorphism) {
  js::Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const CMatrix m = js::random_gaussian_matrix(5, rng) / 2.0;
    const auto t = js::CommutingTuple::make({m, m * m - 0.5 * m});
    const MPoly p = random_poly(rng, 2, 2, 4), q = random_poly(rng, 2, 2, 4);
    const CMatrix lhs = js::eval_matrix_tuple(p * q, t);
    const CMatrix rhs = js::eval_matrix_tuple(p, t) * js::eval_matrix_tuple(q, t);
    EXPECT_LE((lhs - rhs).norm(), 1e-10 * std::max(1.0, rhs.norm()));
  }
}

TEST(DetPolyMatrix, SmallExamples) {
  js::PolyMatrix one(1, 1);
  one.set(0, 0, z(1, 0));
  EXPECT_LT(coefficient_distance(js::det_poly_matrix(one), z(1, 0)), 1e-14);

  const Complex a(1.0, 2.0), b(-0.5, 0.25);
  js::PolyMatrix diag(2, 1);
  diag.set(0, 0, z(1, 0) - c(1, a));
  diag.set(1, 1, z(1, 0) - c(1, b));
  const MPoly expected = (z(1, 0) - c(1, a)) * (z(1, 0) - c(1, b));
  EXPECT_LT(coefficient_distance(js::det_poly_matrix(diag), expected), 1e-13);
}

TEST(DetPolyMatrix, CompanionAgainstLeibnizOracle) {
  // [[-z1, w], [1, -z1]] in variables (z1, w).
  js::PolyMatrix m(2, 2);
  m.set(0, 0, -z(2, 0));
  m.set(0, 1, z(2, 1));
  m.set(1, 0, c(2, 1.0));
  m.set(1, 1, -z(2, 0));
  const MPoly oracle = leibniz_det(m);
  EXPECT_LT(coefficient_distance(oracle, z(2, 0) * z(2, 0) - z(2, 1)), 1e-15);
  EXPECT_LT(coefficient_distance(js::det_poly_matrix(m), oracle), 1e-14);
}

TEST(DetPolyMatrix, RandomAgainstLeibnizOracle) {
  js::Rng rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    js::PolyMatrix m(4, 2);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t s = 0; s < 4; ++s) m.set(r, s, random_poly(rng, 2, 2, 3));
    const MPoly oracle = leibniz_det(m);
    EXPECT_LT(coefficient_distance(js::det_poly_matrix(m), oracle), 1e-10 * oracle.max_abs_coefficient());
  }
}

TEST(DetPolyMatrix, InterpolationMatchesDirectDeterminant) {
  js::Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    js::PolyMatrix m(4, 3);
    for (std::size_t r = 0; r < 4; ++r)
      for (std::size_t s = 0; s < 4; ++s) m.set(r, s, random_poly(rng, 3, 2, 3).pruned(0.0));
    const MPoly d = js::det_poly_matrix(m);
    for (int k = 0; k < 5; ++k) {
      const js::CPoint x = js::random_in_polydisk(rng, 3, 1.2);
      const Complex direct = js::det(m.eval(x));
      EXPECT_LE(std::abs(d(x) - direct), 1e-8 * std::max(1.0, std::abs(direct)));
    }
  }
}

TEST(DetPolyMatrix, DegreeCap) {
  js::PolyMatrix m(3, 1);
  for (std::size_t r = 0; r < 3; ++r) m.set(r, r, z(1, 0).pow(30));
  EXPECT_THROW(js::det_poly_matrix(m), js::InputError);
  js::DetOptions opt;
  opt.max_total_degree = 90;
  EXPECT_LT(coefficient_distance(js::det_poly_matrix(m, opt), z(1, 0).pow(90)), 1e-12);
}

TEST(DetPolyMatrix, ZeroRowGivesZero) {
  js::PolyMatrix m(2, 1);
  m.set(0, 0, z(1, 0));
  EXPECT_TRUE(js::det_poly_matrix(m).is_zero());
}

TEST(Gcd, CommonLinearFactor) {
  const MPoly z1 = z(2, 0), z2 = z(2, 1), one = c(2, 1.0);
  const MPoly p = (z1 - z2) * (z1 + one);
  const MPoly q = (z1 - z2) * (z2 + one);
  const auto g = js::approx_gcd_bivariate(p, q, 1e-8);
  EXPECT_LT(coefficient_distance(g.gcd, z1 - z2), 1e-10);
  EXPECT_LT(division_residual(p, g.gcd), 1e-6);
  EXPECT_LT(division_residual(q, g.gcd), 1e-6);
}

TEST(Gcd, CoprimeGivesOne) {
  const MPoly z1 = z(2, 0), z2 = z(2, 1), one = c(2, 1.0);
  const auto g = js::approx_gcd_bivariate(z1 + one, z2 + one, 1e-8);
  EXPECT_TRUE(g.gcd.is_constant());
  EXPECT_EQ(g.gcd.coefficient({0, 0}), Complex(1.0));
}

TEST(Gcd, WithItself) {
  const MPoly z1 = z(2, 0), z2 = z(2, 1);
  const MPoly p = z1 * z1 - z2;
  const auto g = js::approx_gcd_bivariate(p, p * Complex(0.0, 3.0), 1e-8);
  EXPECT_LT(coefficient_distance(g.gcd, p), 1e-10);
}

TEST(Gcd, RandomProductsRecoverFactor) {
  js::Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const MPoly f = random_poly(rng, 2, 2, 4);
    const MPoly u = random_poly(rng, 2, 1, 3), v = random_poly(rng, 2, 2, 3);
    if (f.is_constant() || u.is_zero() || v.is_zero()) continue;
    const MPoly p = f * u, q = f * v;
    const auto g = js::approx_gcd_bivariate(p, q, 1e-8);
    EXPECT_LT(division_residual(p, g.gcd), 1e-6);
    EXPECT_LT(division_residual(q, g.gcd), 1e-6);
    EXPECT_LT(division_residual(g.gcd, f), 1e-6) << "gcd must contain the planted factor";
  }
}

TEST(Gcd, RejectsBadInput) {
  EXPECT_THROW(js::approx_gcd_bivariate(z(3, 0), z(3, 1)), js::InputError);
  EXPECT_THROW(js::approx_gcd_bivariate(MPoly(2), z(2, 1)), js::InputError);
}
