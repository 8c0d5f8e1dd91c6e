#include <gtest/gtest.h>

#include <vector>

#include "jointspec/bcl_model.hpp"
#include "jointspec/random.hpp"

namespace js = jointspec;
using js::CMatrix;
using js::Complex;
using js::CPoint;
using js::MPoly;

namespace {

CMatrix m2(Complex a, Complex b, Complex c, Complex d) {
  CMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

js::BCLData swap_example() {
  return js::bcl_pair_from(m2(1, 0, 0, 0), m2(0, 1, 1, 0));
}

MPoly z1() { return MPoly::variable(2, 0); }
MPoly z2() { return MPoly::variable(2, 1); }
MPoly k(Complex c) { return MPoly::constant(2, c); }

double coeff_err(const MPoly& a, const MPoly& b) { return (a - b).max_abs_coefficient(); }

// Random pair: Haar unitary, random-rank projection.
js::BCLData random_pair(js::Rng& rng, Eigen::Index n) {
  std::uniform_int_distribution<Eigen::Index> rank(1, n - 1);
  return js::bcl_pair_from(js::random_projection(n, rank(rng), rng), js::random_unitary(n, rng));
}

}  // namespace

TEST(BCLPair, UnitaryScalar) {
  const Complex w = std::polar(1.0, 0.7);
  const auto b = js::bcl_pair_from(CMatrix::Identity(1, 1), CMatrix::Constant(1, 1, w));
  const Complex z(0.3, -0.2);
  EXPECT_LT(std::abs(b.phi(0, z)(0, 0) - z * w), 1e-15);
  EXPECT_LT(std::abs(b.phi(1, z)(0, 0) - std::conj(w)), 1e-15);
}

TEST(BCLPair, SwapExample) {
  const auto b = swap_example();
  const Complex z(0.4, 0.1);
  const CMatrix expected = m2(0, z, 1, 0);
  EXPECT_LT((b.phi(0, z) - expected).norm(), 1e-15);
  EXPECT_LT((b.phi(1, z) - expected).norm(), 1e-15);
  EXPECT_LT(b.product_residual(z), 1e-15);
}

TEST(BCLPair, DegenerateProjection) {
  const auto b = js::bcl_pair_from(CMatrix::Zero(2, 2), CMatrix::Identity(2, 2));
  const Complex z(-0.5, 0.5);
  EXPECT_LT((b.phi(0, z) - CMatrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT((b.phi(1, z) - z * CMatrix::Identity(2, 2)).norm(), 1e-15);
}

TEST(BCLPair, RejectsInvalidData) {
  EXPECT_THROW(js::bcl_pair_from(m2(1, 1, 0, 0), m2(0, 1, 1, 0)), js::InputError);
  EXPECT_THROW(js::bcl_pair_from(m2(1, 0, 0, 0), m2(1, 1, 0, 1)), js::InputError);
  // Valid projections and unitaries whose symbols violate the product law.
  EXPECT_THROW(js::BCLData::make({m2(1, 0, 0, 0), m2(1, 0, 0, 0)}, {CMatrix::Identity(2, 2), CMatrix::Identity(2, 2)}),
               js::InputError);
}

TEST(BCLPair, ProductLawOnRandomSeeds) {
  js::Rng rng(41);
  for (int s = 0; s < 20; ++s) {
    const auto b = random_pair(rng, 2 + s % 7);
    const auto [comm, prod] = b.validation_residuals(js::PolarGrid{16, 64});
    EXPECT_LE(comm, 1e-10);
    EXPECT_LE(prod, 1e-10);
  }
}

TEST(Purity, Examples) {
  const auto swap = swap_example();
  const auto r = js::purity_check(swap, 0);
  EXPECT_TRUE(r.pure());
  EXPECT_NEAR(r.nu, 0.5, 1e-8);

  const auto unitary = js::bcl_pair_from(CMatrix::Zero(2, 2), CMatrix::Identity(2, 2));
  const auto u = js::purity_check(unitary, 0);
  EXPECT_EQ(u.verdict, js::PurityResult::Verdict::NotPure);
  EXPECT_NEAR(u.nu, 1.0, 1e-8);

  const auto full = js::bcl_pair_from(CMatrix::Identity(2, 2), CMatrix::Identity(2, 2));
  const auto f = js::purity_check(full, 0);
  EXPECT_TRUE(f.pure());
  EXPECT_LT(f.nu, 1e-12);
  EXPECT_THROW(js::purity_check(full, 2), js::InputError);
}

TEST(Purity, IndicatorsAgreeOnRandomSeeds) {
  js::Rng rng(42);
  for (int s = 0; s < 30; ++s) {
    const auto b = random_pair(rng, 2 + s % 7);
    for (std::size_t j = 0; j < 2; ++j) {
      const auto r = js::purity_check(b, j);
      if (r.verdict == js::PurityResult::Verdict::Inconclusive) continue;
      EXPECT_EQ(r.pure(), r.power_norm < 1.0 - 1e-6);
    }
  }
}

TEST(SampleVariety, SwapIsDiagonalAgainstQuadraticOracle) {
  const auto b = swap_example();
  const js::PolarGrid grid{32, 64};
  const auto s = js::sample_variety(b, grid);
  EXPECT_TRUE(s.skipped.empty());
  ASSERT_EQ(s.points.size(), 2 * grid.size());
  // eigenvalues of [[0,z],[1,0]] are the two square roots of z
  for (const auto& p : s.points) {
    EXPECT_LT(std::abs(p.lambda(0) - p.lambda(1)), 1e-7);
    EXPECT_LT(std::abs(p.lambda(0) * p.lambda(0) - p.z), 1e-12);
    EXPECT_LE(p.product_residual, 1e-8);
  }
  // brute-force eigen-solve on a 100 x 100 Cartesian grid of the disk
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const Complex z(-1.0 + 2.0 * i / 99.0, -1.0 + 2.0 * j / 99.0);
      if (std::abs(z) > 1.0) continue;
      const auto pts = js::sample_variety_at(b, std::vector<Complex>{z}).points;
      ASSERT_EQ(pts.size(), 2u);
      const Complex r = std::sqrt(z);
      std::vector<Complex> got{pts[0].lambda(0), pts[1].lambda(0)}, want{r, -r};
      EXPECT_LT(js::match_multisets(got, want).max_distance, 1e-7);
    }
  }
}

TEST(SampleVariety, UnitaryScalarGivesFlatDisk) {
  const Complex w = std::polar(1.0, 1.1);
  const auto b = js::bcl_pair_from(CMatrix::Identity(1, 1), CMatrix::Constant(1, 1, w));
  const auto s = js::sample_variety(b, js::PolarGrid{8, 16});
  for (const auto& p : s.points) {
    EXPECT_LT(std::abs(p.lambda(0) - p.z * w), 1e-14);
    EXPECT_LT(std::abs(p.lambda(1) - std::conj(w)), 1e-14);
  }
}

TEST(SampleVariety, DegenerateProjection) {
  const auto b = js::bcl_pair_from(CMatrix::Zero(1, 1), CMatrix::Identity(1, 1));
  const auto s = js::sample_variety(b, js::PolarGrid{8, 16});
  for (const auto& p : s.points) {
    EXPECT_LT(std::abs(p.lambda(0) - 1.0), 1e-14);
    EXPECT_LT(std::abs(p.lambda(1) - p.z), 1e-14);
  }
}

TEST(SampleVariety, CoordinateProductLawOnRandomSeeds) {
  js::Rng rng(43);
  for (int s = 0; s < 10; ++s) {
    const auto b = random_pair(rng, 2 + s % 7);
    const auto smp = js::sample_variety(b, js::PolarGrid{16, 32});
    EXPECT_LE(smp.max_product_residual(), 1e-8);
    EXPECT_TRUE(smp.skipped.empty());
  }
}

TEST(SampleVariety, NoIsolatedPoints) {
  js::Rng rng(44);
  const js::PolarGrid grid{16, 32};
  for (int s = 0; s < 4; ++s) {
    const auto b = random_pair(rng, 3 + s);
    const auto smp = js::sample_variety(b, grid);
    std::uniform_int_distribution<std::size_t> pick(0, smp.points.size() - 1);
    for (int trial = 0; trial < 10; ++trial) {
      const auto& p = smp.points[pick(rng)];
      const auto near = js::sample_variety_at(b, js::refine_near(p.z, grid, 4));
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : near.points) best = std::min(best, (q.lambda - p.lambda).norm());
      EXPECT_LE(best, 0.1);
    }
  }
}

TEST(PairPolys, SwapExample) {
  const auto b = swap_example();
  const auto pp = js::pair_defining_polys(b);
  EXPECT_LT(coeff_err(pp.p1, z1() * (z1() - z2())), 1e-12);
  EXPECT_LT(coeff_err(pp.p2, z2() * (z2() - z1())), 1e-12);
  EXPECT_FALSE(pp.explicit_formula);
  EXPECT_LT(coeff_err(pp.xi, z1() - z2()), 1e-8);
  const auto s = js::sample_variety(b, js::PolarGrid{16, 32});
  EXPECT_LE(js::xi_vanishing_ratio(pp.xi, s), 1e-6);
}

TEST(PairPolys, UnitaryDiagonalExplicitAndGcdRoutes) {
  const Complex w1 = std::polar(1.0, 0.4), w2 = std::polar(1.0, -2.0);
  const auto b = js::bcl_pair_from(CMatrix::Identity(2, 2), m2(w1, 0, 0, w2));
  const MPoly expected = (z2() - k(std::conj(w1))) * (z2() - k(std::conj(w2)));
  const auto explicit_route = js::pair_defining_polys(b);
  EXPECT_TRUE(explicit_route.explicit_formula);
  EXPECT_LT(coeff_err(explicit_route.xi, expected), 1e-12);
  const auto gcd_route = js::pair_defining_polys(b, js::XiRoute::Gcd);
  EXPECT_LT(coeff_err(gcd_route.xi, expected), 1e-6);
  const auto s = js::sample_variety(b, js::PolarGrid{16, 32});
  EXPECT_LE(js::xi_vanishing_ratio(gcd_route.xi, s), 1e-6);
}

TEST(PairPolys, DegenerateProjection) {
  const auto b = js::bcl_pair_from(CMatrix::Zero(1, 1), CMatrix::Identity(1, 1));
  const auto pp = js::pair_defining_polys(b);
  EXPECT_LT(coeff_err(pp.p1, k(1.0) - z1()), 1e-12);
  EXPECT_LT(coeff_err(pp.p2, z1() * z2() - z2()), 1e-12);
  EXPECT_LT(coeff_err(pp.xi, z1() - k(1.0)), 1e-8);
}

TEST(PairPolys, RandomPureSeedsVanishOnCloud) {
  js::Rng rng(45);
  for (int s = 0; s < 5; ++s) {
    const auto b = random_pair(rng, 2 + s % 3);
    const auto pp = js::pair_defining_polys(b);
    const auto smp = js::sample_variety(b, js::PolarGrid{12, 24});
    EXPECT_LE(js::xi_vanishing_ratio(pp.xi, smp), 1e-6);
  }
}

TEST(IsometricAnnihilator, SwapDifferenceAlpha) {
  const auto b = swap_example();
  CPoint alpha(2);
  alpha << 1.0, -1.0;
  const MPoly p = js::isometric_annihilator(b, alpha);
  const MPoly expected = (z2() - z1()) * (z2() - z1()) * 0.5;
  EXPECT_LT(coeff_err(p, expected), 1e-13);
  const auto rep = js::annihilator_check_isometric(b, js::AlphaSet{2, {alpha}}, js::PolarGrid{16, 32});
  EXPECT_LE(rep.worst, 1e-12);
}

TEST(IsometricAnnihilator, ZeroAlphaIsTrivial) {
  const auto b = swap_example();
  const auto rep = js::annihilator_check_isometric(b, js::AlphaSet{2, {CPoint::Zero(2)}}, js::PolarGrid{4, 8});
  EXPECT_TRUE(rep.polys[0].is_zero());
  EXPECT_EQ(rep.worst, 0.0);
}

TEST(IsometricAnnihilator, MomentSetOnRandomSeeds) {
  js::Rng rng(46);
  for (int s = 0; s < 4; ++s) {
    const auto b = random_pair(rng, 2 + s);
    const auto rep = js::annihilator_check_isometric(b, js::moment_curve_alphas(2, static_cast<std::size_t>(b.n())),
                                                     js::PolarGrid{8, 16});
    EXPECT_LE(rep.worst, 1e-8);
  }
}

TEST(Distinguished, Examples) {
  EXPECT_TRUE(js::distinguished_check(js::sample_variety(swap_example())).is_distinguished);

  const auto flat = js::bcl_pair_from(CMatrix::Identity(1, 1), CMatrix::Constant(1, 1, Complex(0.0, 1.0)));
  const auto r = js::distinguished_check(js::sample_variety(flat, js::PolarGrid{8, 16}));
  EXPECT_FALSE(r.is_distinguished);
  ASSERT_FALSE(r.witnesses.empty());
  EXPECT_LT(std::abs(r.witnesses.front().lambda(0)), 1.0 - 1e-6);

  const auto unitary = js::BCLData::make({CMatrix::Zero(1, 1), CMatrix::Identity(1, 1)},
                                         {CMatrix::Identity(1, 1), CMatrix::Identity(1, 1)});
  EXPECT_FALSE(js::distinguished_check(js::sample_variety(unitary, js::PolarGrid{8, 16})).is_distinguished);
}

TEST(Distinguished, AgreesWithPurityOnRandomSeeds) {
  js::Rng rng(47);
  for (int s = 0; s < 12; ++s) {
    const Eigen::Index n = 2 + s % 5;
    CMatrix p = CMatrix::Zero(n, n), u = CMatrix::Zero(n, n);
    const Eigen::Index m = s % 3 == 0 ? n : n - 1;
    std::uniform_int_distribution<Eigen::Index> rank(1, std::max<Eigen::Index>(1, m - 1));
    p.topLeftCorner(m, m) = js::random_projection(m, rank(rng), rng);
    u.topLeftCorner(m, m) = js::random_unitary(m, rng);
    if (m < n) {
      u(n - 1, n - 1) = js::random_unimodular(rng);
      p(n - 1, n - 1) = s % 3 == 2 ? 1.0 : 0.0;
    }
    const auto b = js::bcl_pair_from(p, u);
    const auto r0 = js::purity_check(b, 0), r1 = js::purity_check(b, 1);
    if (r0.verdict == js::PurityResult::Verdict::Inconclusive || r1.verdict == js::PurityResult::Verdict::Inconclusive)
      continue;
    const auto dc = js::distinguished_check(js::sample_variety(b, js::PolarGrid{16, 64}));
    EXPECT_EQ(dc.is_distinguished, r0.pure() && r1.pure()) << "seed " << s;
  }
}

TEST(DirectSum, Examples) {
  const js::PolarGrid grid{8, 16};
  const auto base = js::sample_variety(swap_example(), grid);
  const std::vector<Complex> one{1.0}, minus_one{-1.0}, none{};
  const auto u = js::direct_sum_variety(base, one, none, grid);
  EXPECT_EQ(u.points.size(), base.points.size() + grid.size());
  const MPoly defining = (z1() - z2()) * (z1() - k(1.0));
  for (const auto& p : u.points) EXPECT_LT(std::abs(defining(p.lambda)), 1e-7);

  const auto flat = js::direct_sum_variety(js::VarietySample{}, none, minus_one, grid);
  EXPECT_EQ(flat.points.size(), grid.size());
  for (const auto& p : flat.points) EXPECT_EQ(p.lambda(1), Complex(-1.0));

  const auto same = js::direct_sum_variety(base, none, none, grid);
  EXPECT_EQ(same.points.size(), base.points.size());

  const std::vector<Complex> bad{0.5};
  EXPECT_THROW(js::direct_sum_variety(base, bad, none, grid), js::InputError);
}
