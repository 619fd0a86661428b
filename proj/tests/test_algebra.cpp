#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "knz/algebra.hpp"
#include "knz/coefficients.hpp"

using namespace knz;

namespace {

MarkedCurve two_points() { return MarkedCurve::rational({{0.3, -0.2}, {-0.8, 0.9}}); }

MarkedCurve torus_one_point() { return MarkedCurve::elliptic({0.3, 1.1}, {0.9925, 0.3608}, {{0.8545, 0.9513}}); }

}  // namespace

TEST(Pairing, DualityBothRoutes) {
  for (const auto& c : {two_points(), torus_one_point()}) {
    const KNBasis B(c);
    for (int l : {-1, 0, 1, 2})
      for (int n = -3; n <= 3; ++n)
        for (int m = -3; m <= 3; ++m)
          for (int p = 0; p < c.size(); ++p)
            for (int r = 0; r < c.size(); ++r) {
              const auto f = B.form(l, n, p).section, g = B.form(1 - l, -m, r).section;
              const double want = (n == m && p == r) ? 1.0 : 0.0;
              EXPECT_LT(std::abs(kn_pairing(f, g, Route::closed_form) - want), 1e-9) << c.genus() << " " << l << " " << n << " " << m;
              EXPECT_LT(std::abs(kn_pairing(f, g, Route::quadrature) - want), 1e-9) << c.genus() << " " << l << " " << n << " " << m;
            }
  }
}

TEST(Pairing, CheckedPairingReportsBothRoutes) {
  const KNBasis B(two_points());
  const auto v = kn_pairing_checked(B.form(2, 1, 0).section, B.form(-1, -1, 0).section);
  EXPECT_EQ(v.provenance, "both");
  EXPECT_LT(std::abs(v.value - 1.0), 1e-12);
  EXPECT_LT(v.residual, 1e-10);
}

TEST(Pairing, WeightsMustBeDual) {
  const KNBasis B(two_points());
  try {
    kn_pairing(B.form(1, 0, 0).section, B.form(1, 0, 0).section);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
}

TEST(Pairing, OutPointResidueBalancesInPoints) {
  // residue theorem: in-point residues plus the out-point residue vanish
  for (const auto& c : {two_points(), torus_one_point()}) {
    const KNBasis B(c);
    const auto f = B.form(2, 2, 0).section, g = B.form(-1, 1, 0).section;
    EXPECT_LT(std::abs(kn_pairing(f, g, Route::quadrature) + kn_pairing_out(f, g)), 1e-9);
  }
}

TEST(Witt, ClassicalStructureConstants) {
  const KNBasis B(MarkedCurve::rational({0.0}));
  const auto T = structure_constants(B, AlgebraTag::vector_field, -3, 3);
  EXPECT_EQ(T.band_observed, 0);
  EXPECT_EQ(T.below_observed, 0);
  for (int n = -3; n <= 3; ++n)
    for (int m = -3; m <= 3; ++m) {
      const auto& e = T.at({n, 0}, {m, 0});
      for (const auto& t : e.terms) {
        const cplx want = t.index.degree == n + m ? cplx(m - n) : cplx{};
        EXPECT_LT(std::abs(t.coeff - want), 1e-11) << n << " " << m << " " << t.index.degree;
      }
    }
}

TEST(Witt, FunctionProductsAreMonomials) {
  const KNBasis B(MarkedCurve::rational({0.0}));
  const auto T = structure_constants(B, AlgebraTag::function, -2, 2);
  EXPECT_EQ(T.band_observed, 0);
  EXPECT_LT(std::abs(T.at({1, 0}, {-2, 0}).coeff(-1, 0) - 1.0), 1e-12);
}

TEST(AlmostGrading, GenusZeroBands) {
  EXPECT_EQ(band_bound(0, 1, AlgebraTag::function), 0);
  EXPECT_EQ(band_bound(0, 1, AlgebraTag::vector_field), 0);
  EXPECT_EQ(band_bound(0, 2, AlgebraTag::function), 1);
  EXPECT_EQ(band_bound(0, 2, AlgebraTag::vector_field), 1);
  EXPECT_EQ(band_bound(0, 3, AlgebraTag::function), 1);
  EXPECT_FALSE(band_bound(1, 2, AlgebraTag::function).has_value());
  const KNBasis B(two_points());
  for (auto tag : {AlgebraTag::function, AlgebraTag::vector_field}) {
    const auto T = structure_constants(B, tag, -2, 2);
    EXPECT_EQ(T.below_observed, 0);
    EXPECT_LE(T.band_observed, *band_bound(0, 2, tag));
    EXPECT_LT(T.max_residual, 1e-9);
  }
}

TEST(AlmostGrading, GenusOneBandIsFinite) {
  const KNBasis B(torus_one_point());
  const auto T = structure_constants(B, AlgebraTag::function, -2, 2);
  EXPECT_EQ(T.below_observed, 0);
  EXPECT_LE(T.band_observed, 3);
  EXPECT_LT(T.max_residual, 1e-8);
}

TEST(LieDerivative, AnalyticMatchesFiniteDifference) {
  const KNBasis B(torus_one_point());
  const auto e = B.vector_field(1, 0).section, g = B.form(2, -1, 0).section;
  const auto a = lie_derivative(e, g), b = lie_derivative_fd(e, g);
  EXPECT_EQ(a.weight, 2);
  for (cplx z : {cplx{0.3, 0.4}, cplx{-0.2, 0.7}}) EXPECT_LT(std::abs(a(z) - b(z)) / std::max(1.0, std::abs(a(z))), 1e-8);
}

TEST(Expansion, ResumReproducesProduct) {
  const KNBasis B(two_points());
  const Section f = B.function(1, 0).section * B.function(-2, 1).section;
  const auto e = expand_in_basis(B, EvalForm::from(f), -2, 2);
  EXPECT_LT(e.residual, 1e-10);
  const Section r = resum(B, e, 1e-13);
  const cplx z{0.11, 0.47};
  EXPECT_LT(std::abs(r(z) - f(z)), 1e-10 * std::max(1.0, std::abs(f(z))));
}

TEST(Cocycles, ClassicalValues) {
  const KNBasis B(MarkedCurve::rational({0.0}));
  for (int n = -3; n <= 3; ++n)
    for (int m = -3; m <= 3; ++m) {
      // res z^n d(z^m) = m delta_{n+m,0}
      const cplx g = cocycle_gamma(B.function(n, 0).section, B.function(m, 0).section);
      EXPECT_LT(std::abs(g - (n + m == 0 ? cplx(m) : cplx{})), 1e-12);
      // Virasoro: (n^3 - n) / 12 delta_{n+m,0}
      const cplx x = cocycle_chi(B.vector_field(n, 0).section, B.vector_field(m, 0).section);
      EXPECT_LT(std::abs(x - (n + m == 0 ? cplx((n * n * n - n) / 12.0) : cplx{})), 1e-12) << n << " " << m;
    }
}

TEST(Cocycles, Antisymmetry) {
  for (const auto& c : {two_points(), torus_one_point()}) {
    const KNBasis B(c);
    for (int n = -3; n <= 1; ++n)
      for (int m = -2; m <= 2; ++m) {
        const auto f = B.function(n, 0).section, g = B.function(m, c.size() - 1).section;
        EXPECT_LT(std::abs(cocycle_gamma(f, g) + cocycle_gamma(g, f)), 1e-9);
        const auto e = B.vector_field(n, 0).section, h = B.vector_field(m, c.size() - 1).section;
        EXPECT_LT(std::abs(cocycle_chi(e, h) + cocycle_chi(h, e)), 1e-9);
      }
  }
}

TEST(Cocycles, VanishOnUpperSubalgebra) {
  const KNBasis B(torus_one_point());
  for (int n = 0; n <= 3; ++n)
    for (int m = 0; m <= 3; ++m) {
      EXPECT_LT(std::abs(cocycle_gamma(B.function(n, 0).section, B.function(m, 0).section)), 1e-9);
      EXPECT_LT(std::abs(cocycle_chi(B.vector_field(n, 0).section, B.vector_field(m, 0).section)), 1e-9);
    }
}

TEST(Coefficients, RoutesAgreeGenusZero) {
  const KNBasis B(two_points());
  const Section e = B.vector_field(-1, 0).section;
  for (int n = -2; n <= 1; ++n)
    for (int m = -2; m <= 1; ++m) {
      const cplx a = l_coefficient(B, n, 0, m, 1, e, Route::closed_form);
      const cplx b = l_coefficient(B, n, 0, m, 1, e, Route::quadrature);
      EXPECT_LT(std::abs(a - b) / std::max(1.0, std::abs(a)), 1e-9);
      EXPECT_LT(std::abs(a - l_coefficient_at_infinity(B, n, 0, m, 1, e)), 1e-8);
    }
}
