#include <gtest/gtest.h>

#include <numbers>

#include "jointspec/matrix_core.hpp"
#include "jointspec/random.hpp"

namespace js = jointspec;
using js::CMatrix;
using js::Complex;

namespace {

// Dense theta-grid oracle for the numerical radius, independent of the refinement code.
double numerical_radius_grid_oracle(const CMatrix& a, int samples) {
  double best = 0.0;
  for (int k = 0; k < samples; ++k) {
    const Complex rot = std::polar(1.0, 2.0 * std::numbers::pi * k / samples);
    const CMatrix h = 0.5 * (rot * a + std::conj(rot) * a.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
    best = std::max(best, es.eigenvalues().maxCoeff());
  }
  return best;
}

std::vector<Complex> sorted(std::vector<Complex> v) {
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return v;
}

}  // namespace

TEST(Eigenvalues, Diagonal) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  const auto ev = sorted(js::eigenvalues(a));
  EXPECT_NEAR(std::abs(ev[0] - 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(ev[1] - 2.0), 0.0, 1e-14);
}

TEST(Eigenvalues, NilpotentJordanBlock) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  for (const auto& l : js::eigenvalues(a)) EXPECT_LT(std::abs(l), 1e-12);
}

TEST(Eigenvalues, CompanionOfZSquaredMinusOne) {
  CMatrix a(2, 2);
  a << 0.0, 1.0, 1.0, 0.0;
  const auto ev = sorted(js::eigenvalues(a));
  EXPECT_NEAR(std::abs(ev[0] + 1.0), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(ev[1] - 1.0), 0.0, 1e-14);
}

TEST(Eigenvalues, RejectsNonSquare) {
  EXPECT_THROW(js::eigenvalues(CMatrix::Zero(2, 3)), js::InputError);
  EXPECT_THROW(js::det(CMatrix::Zero(3, 2)), js::InputError);
}

TEST(Eigenvalues, UnitaryInvariance) {
  js::Rng rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = js::random_gaussian_matrix(6, rng);
    const CMatrix q = js::random_unitary(6, rng);
    const auto ea = js::eigenvalues(a);
    const auto eb = js::eigenvalues(q * a * q.adjoint());
    const auto m = js::match_multisets(ea, eb);
    EXPECT_LT(m.max_distance, js::defaults::eig_tol(a.norm()));
  }
}

TEST(Det, SmallCases) {
  EXPECT_NEAR(std::abs(js::det(CMatrix::Identity(3, 3)) - 1.0), 0.0, 1e-15);
  const Complex w(2.0, 1.0);
  CMatrix a(2, 2);
  a << 0.0, w, 1.0, 0.0;
  EXPECT_NEAR(std::abs(js::det(a) + w), 0.0, 1e-15);
  CMatrix z = CMatrix::Random(4, 4);
  z.row(2).setZero();
  EXPECT_EQ(js::det(z), Complex(0.0));
}

TEST(Det, Multiplicative) {
  js::Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = js::random_gaussian_matrix(5, rng) + 3.0 * CMatrix::Identity(5, 5);
    const CMatrix b = js::random_gaussian_matrix(5, rng) + 3.0 * CMatrix::Identity(5, 5);
    const Complex lhs = js::det(a * b);
    const Complex rhs = js::det(a) * js::det(b);
    EXPECT_LT(std::abs(lhs - rhs), 1e-9 * std::abs(rhs));
  }
}

TEST(SvdRank, BasicCases) {
  EXPECT_EQ(js::svd_rank(CMatrix::Zero(4, 4), 1e-10), 0u);
  EXPECT_EQ(js::svd_rank(CMatrix::Identity(5, 5), 1e-10), 5u);
  js::CVector u(3), v(3);
  u << 1.0, Complex(0, 2), -1.0;
  v << 0.5, 1.0, Complex(3, 1);
  EXPECT_EQ(js::svd_rank(u * v.adjoint(), 1e-10), 1u);
  EXPECT_THROW(js::svd_rank(CMatrix::Identity(2, 2), -1.0), js::InputError);
}

TEST(SvdRank, UnitaryInvariance) {
  js::Rng rng(5);
  for (int r = 0; r <= 6; ++r) {
    const CMatrix low = js::random_gaussian_matrix(6, rng).leftCols(r) *
                        js::random_gaussian_matrix(6, rng).topRows(r);
    const CMatrix q1 = js::random_unitary(6, rng), q2 = js::random_unitary(6, rng);
    EXPECT_EQ(js::svd_rank(low), static_cast<std::size_t>(r));
    EXPECT_EQ(js::svd_rank(q1 * low * q2), static_cast<std::size_t>(r));
  }
}

TEST(NumericalRadius, KnownValues) {
  EXPECT_NEAR(js::numerical_radius(CMatrix::Identity(3, 3)), 1.0, 1e-8);
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = Complex(0.3, 0.4);
  d(1, 1) = -2.0;
  d(2, 2) = Complex(0.0, 1.5);
  EXPECT_NEAR(js::numerical_radius(d), 2.0, 1e-8);
  EXPECT_EQ(js::numerical_radius(CMatrix::Zero(2, 2)), 0.0);
}

TEST(NumericalRadius, ShiftMatchesGridOracle) {
  CMatrix a = CMatrix::Zero(2, 2);
  a(1, 0) = 1.0;
  const double oracle = numerical_radius_grid_oracle(a, 100000);
  EXPECT_NEAR(oracle, 0.5, 1e-9);
  EXPECT_NEAR(js::numerical_radius(a), oracle, 1e-8);
}

TEST(NumericalRadius, BetweenSpectralRadiusAndNorm) {
  js::Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto n = 2 + trial % 6;
    const CMatrix a = js::random_gaussian_matrix(n, rng);
    const double nu = js::numerical_radius(a);
    EXPECT_GE(nu, js::spectral_radius(a) - 1e-8);
    EXPECT_LE(nu, js::norm2(a) + 1e-8);
    EXPECT_GE(nu, 0.5 * js::norm2(a) - 1e-8);
  }
}

TEST(NumericalRadius, AgreesWithDenseGridOnRandomInputs) {
  js::Rng rng(19);
  for (int trial = 0; trial < 5; ++trial) {
    const CMatrix a = js::random_gaussian_matrix(4, rng);
    const double oracle = numerical_radius_grid_oracle(a, 20000);
    const double nu = js::numerical_radius(a);
    // The grid oracle underestimates by at most O(h^2) near a smooth maximum.
    EXPECT_GE(nu, oracle - 1e-10);
    EXPECT_LE(nu - oracle, 1e-6 * (1.0 + js::norm2(a)));
  }
}

TEST(Schur, FactorizationResiduals) {
  js::Rng rng(23);
  const CMatrix a = js::random_gaussian_matrix(8, rng);
  const auto s = js::schur(a);
  EXPECT_LT(s.unitarity_residual, 1e-12);
  EXPECT_LT((s.q * s.t * s.q.adjoint() - a).norm(), 1e-12 * a.norm());
  EXPECT_LT(js::strict_lower_norm(s.t), 1e-12);
}
