#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "knz/quadrature.hpp"

using namespace knz;

TEST(Quadrature, ResidueOfExponentialOverCube) {
  ContourSpec c{0.0, 0.5, 128};
  const cplx r = contour_integral([](cplx z) { return std::exp(z) / (z * z * z); }, c);
  EXPECT_NEAR(std::abs(r - 0.5), 0.0, 1e-14);
}

TEST(Quadrature, ExpansionOfExponential) {
  ContourSpec c{0.3, 0.7, 256};
  const auto s = expand_at([](cplx z) { return std::exp(z - 0.3); }, c, -2, 10);
  EXPECT_EQ(s.min_exponent(), 0);
  double fact = 1.0;
  for (int k = 0; k <= 10; ++k) {
    if (k > 0) fact *= k;
    EXPECT_NEAR(std::abs(s.coefficient(k) - 1.0 / fact), 0.0, 1e-13) << k;
  }
}

TEST(Quadrature, ExpansionAtPole) {
  const cplx p{1.0, -0.5};
  ContourSpec c{p, 0.4, 256};
  const auto s = expand_at([p](cplx z) { return 3.0 / ((z - p) * (z - p)) + 1.0 / (z - p - 2.0); }, c, -4, 3);
  EXPECT_EQ(s.leading_exponent(1e-9), -2);
  EXPECT_NEAR(std::abs(s.coefficient(-2) - 3.0), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(s.coefficient(-1)), 0.0, 1e-13);
  // 1/(w - 2) = -1/2 - w/4 - ...
  EXPECT_NEAR(std::abs(s.coefficient(0) + 0.5), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(s.coefficient(1) + 0.25), 0.0, 1e-13);
}

TEST(Quadrature, DoublingImprovesTenfoldUntilFloor) {
  // pole just outside the contour: trapezoid error decays like (r/d)^n
  const cplx pole{0.33, 0.0};
  auto f = [pole](cplx z) { return 1.0 / (z - pole); };
  double prev = -1.0;
  for (int n = 64; n <= 2048; n *= 2) {
    const double err = std::abs(contour_integral(f, ContourSpec{0.0, 0.3, n}));
    if (prev > 1e-12) {
      EXPECT_LE(err * 10.0, prev + 1e-15) << n;
    }
    prev = err;
  }
  EXPECT_LT(prev, 1e-12);
}

TEST(Quadrature, CheckedIntegralEscalates) {
  const cplx pole{0.305, 0.0};
  auto f = [pole](cplx z) { return 1.0 / (z - pole); };
  const auto r = contour_integral_checked(f, ContourSpec{0.0, 0.3, 64});
  EXPECT_EQ(r.samples_used, 4096);
  const auto easy = contour_integral_checked([](cplx z) { return 1.0 / z; }, ContourSpec{0.0, 0.3, 64});
  EXPECT_EQ(easy.samples_used, 128);
  EXPECT_NEAR(std::abs(easy.value - 1.0), 0.0, 1e-14);
}

TEST(Quadrature, InvalidContours) {
  EXPECT_THROW(contour_integral([](cplx) { return cplx{1.0}; }, ContourSpec{0.0, 0.3, 100}), Error);
  EXPECT_THROW(contour_integral([](cplx) { return cplx{1.0}; }, ContourSpec{0.0, -1.0, 128}), Error);
  EXPECT_THROW(contour_integral([](cplx) { return cplx{1.0}; }, ContourSpec{0.0, 0.3, 32}), Error);
}

TEST(Quadrature, SingularSampleIsNumericalError) {
  try {
    contour_integral([](cplx z) { return 1.0 / (z - 0.3); }, ContourSpec{0.0, 0.3, 64});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numerical);
  }
}
