#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "knz/laurent.hpp"

using namespace knz;

namespace {

// Plain evaluation of the stored coefficients, used as the oracle for arithmetic.
cplx eval(const LaurentExpansion& s, cplx z) {
  cplx acc{};
  for (int k = s.min_exponent(); k <= s.truncation_order(); ++k) acc += s.coefficient(k) * std::pow(z - s.center(), k);
  return acc;
}

}  // namespace

TEST(Laurent, ZeroSeriesAreCanonical) {
  const cplx c{0.5, -1.0};
  const auto a = LaurentExpansion::zero(c, 4);
  const LaurentExpansion b(c, -3, std::vector<cplx>(8, cplx{}));
  EXPECT_TRUE(a.is_zero());
  EXPECT_TRUE(b.is_zero());
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.min_exponent(), 5);
  EXPECT_EQ(residue(a), cplx{});
}

TEST(Laurent, LeadingZerosAreStripped) {
  const LaurentExpansion s(0.0, -2, {0.0, 0.0, 3.0, 1.0});
  EXPECT_EQ(s.min_exponent(), 0);
  EXPECT_EQ(s.truncation_order(), 1);
  EXPECT_EQ(s.coefficient(-5), cplx{});
  EXPECT_EQ(s.coefficient(0), cplx{3.0});
  EXPECT_THROW(s.coefficient(2), Error);
}

TEST(Laurent, GeometricSeriesInverse) {
  // (1 - z) * sum_{k<=8} z^k = 1 + O(z^9)
  const LaurentExpansion g(0.0, 0, std::vector<cplx>(9, cplx{1.0}));
  // 1 - z known exactly through z^8
  std::vector<cplx> lc(9, cplx{});
  lc[0] = 1.0;
  lc[1] = -1.0;
  const LaurentExpansion l(0.0, 0, lc);
  const auto p = g * l;
  EXPECT_EQ(p.truncation_order(), 8);
  EXPECT_EQ(p.coefficient(0), cplx{1.0});
  for (int k = 1; k <= 8; ++k) EXPECT_EQ(p.coefficient(k), cplx{}) << k;
}

TEST(Laurent, ProductMatchesPointwiseProductWithinTruncation) {
  const cplx c{0.2, 0.1};
  const LaurentExpansion a(c, -2, {{1.0, 0.5}, {-2.0, 0.0}, {0.0, 3.0}, {0.25, 0.0}, {1.0, 1.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
  const LaurentExpansion b(c, -1, {{0.5, 0.0}, {1.0, -1.0}, {2.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}});
  const auto p = a * b;
  // both factors are exact polynomials in their windows, so the product is exact up to its truncation
  EXPECT_EQ(p.min_exponent(), -3);
  EXPECT_EQ(p.truncation_order(), std::min(a.truncation_order() + b.min_exponent(), b.truncation_order() + a.min_exponent()));
  const cplx z = c + cplx{0.01, 0.02};
  EXPECT_NEAR(std::abs(eval(p, z) - eval(a, z) * eval(b, z)), 0.0, 1e-9 * std::abs(eval(a, z) * eval(b, z)));
}

TEST(Laurent, SumTakesSmallerTruncation) {
  const LaurentExpansion a(0.0, -1, {1.0, 2.0, 3.0, 4.0});
  const LaurentExpansion b(0.0, 0, {-2.0, -3.0});
  const auto s = a + b;
  EXPECT_EQ(s.truncation_order(), 1);
  EXPECT_EQ(s.coefficient(-1), cplx{1.0});
  EXPECT_EQ(s.coefficient(0), cplx{});
  EXPECT_EQ(s.coefficient(1), cplx{});
  const auto z = a + a.scaled(-1.0);
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(z.truncation_order(), 2);
}

TEST(Laurent, DerivativeAndResidue) {
  const LaurentExpansion s(0.0, -3, {2.0, 0.0, 5.0, 7.0, 1.0});
  EXPECT_EQ(residue(s), cplx{5.0});
  const auto d = s.derivative();
  EXPECT_EQ(d.min_exponent(), -4);
  EXPECT_EQ(d.coefficient(-4), cplx{-6.0});
  EXPECT_EQ(d.coefficient(-2), cplx{-5.0});
  EXPECT_EQ(d.coefficient(-1), cplx{});  // derivatives have no residue
  EXPECT_EQ(d.coefficient(0), cplx{1.0});
}

TEST(Laurent, LeadingExponentUsesRelativeThreshold) {
  const LaurentExpansion s(0.0, -2, {1e-14, 1e-3, 1.0});
  EXPECT_EQ(s.leading_exponent(1e-9), -1);
  EXPECT_EQ(s.leading_exponent(1e-2), 0);
  EXPECT_EQ(LaurentExpansion::zero(0.0, 3).leading_exponent(1e-9), 4);
}

TEST(Laurent, CenterMismatchIsRejected) {
  const LaurentExpansion a(0.0, 0, {1.0});
  const LaurentExpansion b(1.0, 0, {1.0});
  EXPECT_THROW(a + b, Error);
  EXPECT_THROW(a * b, Error);
}

TEST(Laurent, ResidueBeyondTruncationIsAnError) {
  const LaurentExpansion s = LaurentExpansion::monomial(0.0, -3, 1.0, -2);
  EXPECT_THROW(residue(s), Error);
  EXPECT_TRUE(LaurentExpansion::monomial(0.0, 3, 1.0, 2).is_zero());
}
