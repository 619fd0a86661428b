#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "knz/elliptic.hpp"
#include "knz/quadrature.hpp"

using namespace knz;

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I{0.0, 1.0};

// Jacobi product for sigma with x = exp(2 pi i tau), evaluated without any
// lattice reduction. eta1 comes from E2 = 1 - 24 sum n x^n / (1 - x^n).
struct ProductOracle {
  cplx tau, x, eta1;

  explicit ProductOracle(cplx t) : tau(t), x(std::exp(2.0 * kPi * I * t)) {
    cplx s{}, xn = x;
    for (int n = 1; n < 400; ++n, xn *= x) s += static_cast<double>(n) * xn / (1.0 - xn);
    eta1 = kPi * kPi / 6.0 * (1.0 - 24.0 * s);
  }

  cplx sigma(cplx z) const {
    cplx p = std::sin(kPi * z) / kPi;
    cplx xn = x;
    const cplx c = std::cos(2.0 * kPi * z);
    for (int n = 1; n < 400; ++n, xn *= x) p *= (1.0 - 2.0 * xn * c + xn * xn) / ((1.0 - xn) * (1.0 - xn));
    return std::exp(eta1 * z * z) * p;
  }

  // log-derivative of the product, term by term
  cplx zeta(cplx z) const {
    cplx r = 2.0 * eta1 * z + kPi * std::cos(kPi * z) / std::sin(kPi * z);
    cplx xn = x;
    const cplx c = std::cos(2.0 * kPi * z), s = std::sin(2.0 * kPi * z);
    for (int n = 1; n < 400; ++n, xn *= x) r += 4.0 * kPi * xn * s / (1.0 - 2.0 * xn * c + xn * xn);
    return r;
  }
};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST(Elliptic, RejectsBadTau) {
  EXPECT_THROW(Lattice(cplx{0.3, -1.0}), Error);
  EXPECT_THROW(Lattice(cplx{0.0, 0.01}), Error);
}

TEST(Elliptic, AgreesWithJacobiProduct) {
  for (cplx tau : {cplx{0.3, 1.1}, cplx{-0.45, 0.84}, cplx{0.0, 2.0}}) {
    const Lattice L(tau);
    const ProductOracle P(tau);
    EXPECT_LT(rel(L.eta1(), P.eta1), 1e-12);
    for (cplx z : {cplx{0.11, 0.07}, cplx{-0.3, 0.4}, cplx{0.45, -0.2} + tau, cplx{1.2, 0.3}}) {
      EXPECT_LT(rel(L.sigma(z), P.sigma(z)), 1e-11) << z;
      EXPECT_LT(rel(L.zeta(z), P.zeta(z)), 1e-11) << z;
    }
  }
}

// Reference values from a 40-digit theta-function evaluation (mpmath jtheta,
// eta1 = -pi^2 theta1'''(0) / (6 theta1'(0)), zeta and wp by differentiation).
TEST(Elliptic, FrozenReferenceValues) {
  const Lattice L(cplx{0.3, 1.1});
  EXPECT_LT(rel(L.eta1(), {1.6571828979154102, -0.037336539552961096}), 1e-13);
  const cplx z1{0.31, 0.17}, z2{1.7, -0.8};
  EXPECT_LT(rel(L.sigma(z1), {0.31291965274315764, 0.1689135195968114}), 1e-13);
  EXPECT_LT(rel(L.zeta(z1), {2.504109565627075, -1.4605277006187218}), 1e-13);
  EXPECT_LT(rel(L.wp(z1), {4.511419083928856, -5.826986101349015}), 1e-13);
  EXPECT_LT(rel(L.sigma(z2), {42.534425805307635, -46.14659019267158}), 1e-12);
  EXPECT_LT(rel(L.zeta(z2), {5.536562026544403, -0.7743368801471373}), 1e-12);
  EXPECT_LT(rel(L.wp(z2), {-11.562012217012574, -0.1751890523998818}), 1e-12);
  // invariants from theta constants: g2 = (2/3) pi^4 sum theta_k^8, g3 = 4 e1 e2 e3
  EXPECT_LT(rel(L.g2(), {120.05792111801983, 29.37020740734357}), 1e-12);
  EXPECT_LT(rel(L.g3(), {332.8310509248966, -133.2457048945383}), 1e-12);
  EXPECT_LT(rel(L.wp(0.5), {6.530994544098317, 0.14953040942656545}), 1e-12);

  const Lattice M(cplx{-0.2, 0.9});
  EXPECT_LT(rel(M.sigma({-0.42, 0.55}), {-0.3498167124198655, 0.7074602645697838}), 1e-13);
  EXPECT_LT(rel(M.zeta({-0.42, 0.55}), {-2.287741774390101, -1.2606766062225072}), 1e-13);
  EXPECT_LT(rel(M.g2(), {160.78507497197572, -105.7697201457639}), 1e-12);
}

TEST(Elliptic, QuasiPeriodicity) {
  for (cplx tau : {cplx{0.3, 1.1}, cplx{-0.17, 0.95}}) {
    const Lattice L(tau);
    for (cplx z : {cplx{0.12, 0.31}, cplx{-0.4, 0.2}, cplx{0.7, -0.5}}) {
      // sigma(z + w) = -exp(2 eta (z + w/2)) sigma(z) for w in {1, tau}
      EXPECT_LT(rel(L.sigma(z + 1.0), -std::exp(2.0 * L.eta1() * (z + 0.5)) * L.sigma(z)), 1e-10);
      EXPECT_LT(rel(L.sigma(z + tau), -std::exp(2.0 * L.eta2() * (z + 0.5 * tau)) * L.sigma(z)), 1e-10);
      EXPECT_LT(std::abs(L.zeta(z + 1.0) - L.zeta(z) - 2.0 * L.eta1()), 1e-10);
      EXPECT_LT(std::abs(L.zeta(z + tau) - L.zeta(z) - 2.0 * L.eta2()), 1e-10);
      EXPECT_LT(rel(L.wp(z + 1.0 + tau), L.wp(z)), 1e-10);
    }
    EXPECT_LT(std::abs(L.eta1() * tau - L.eta2() - kPi * I), 1e-10);
  }
}

TEST(Elliptic, Eta2MatchesZetaShiftOfProduct) {
  const cplx tau{0.3, 1.1};
  const Lattice L(tau);
  const ProductOracle P(tau);
  const cplx z{0.21, 0.13};
  EXPECT_LT(std::abs(0.5 * (P.zeta(z + tau) - P.zeta(z)) - L.eta2()), 1e-10);
}

TEST(Elliptic, DifferentialEquationOfWp) {
  const Lattice L(cplx{0.25, 1.3});
  for (cplx z : {cplx{0.2, 0.1}, cplx{-0.33, 0.52}, cplx{0.41, -0.27}}) {
    const cplx p = L.wp(z), dp = L.wp_prime(z);
    EXPECT_LT(rel(dp * dp, 4.0 * p * p * p - L.g2() * p - L.g3()), 1e-10);
    // wp = -zeta' by a Richardson-extrapolated centered difference
    auto cd = [&](double h) { return -(L.zeta(z + h) - L.zeta(z - h)) / (2.0 * h); };
    const cplx fd = (4.0 * cd(5e-4) - cd(1e-3)) / 3.0;
    EXPECT_LT(rel(fd, p), 1e-9);
  }
}

TEST(Elliptic, TaylorSeriesAgreeWithPointValues) {
  const Lattice L(cplx{0.3, 1.1});
  const cplx d{0.05, -0.03}, u{0.02, 0.015};
  const auto s = L.sigma_taylor(d, 20);
  cplx acc{}, up = 1.0;
  for (const auto& c : s) {
    acc += c * up;
    up *= u;
  }
  EXPECT_LT(rel(acc, L.sigma(d + u)), 1e-13);
  const cplx a{0.3, 0.2};
  const auto w = L.wp_taylor(a, 16);
  acc = 0.0;
  up = 1.0;
  for (const auto& c : w) {
    acc += c * up;
    up *= u;
  }
  EXPECT_LT(rel(acc, L.wp(a + u)), 1e-12);
}

TEST(Elliptic, SigmaZerosByWindingNumber) {
  const cplx tau{0.3, 1.1};
  const Lattice L(tau);
  auto wind = [&](cplx c) {
    ContourSpec s{c, 0.2, 256};
    return contour_integral([&](cplx z) { return L.zeta(z); }, s);
  };
  for (int m = -1; m <= 1; ++m)
    for (int n = -1; n <= 1; ++n) EXPECT_LT(std::abs(wind(static_cast<double>(m) + static_cast<double>(n) * tau) - 1.0), 1e-12);
  EXPECT_LT(std::abs(wind(cplx{0.5, 0.3})), 1e-12);
  EXPECT_LT(std::abs(wind(0.5 * tau)), 1e-12);
}

TEST(Elliptic, LatticeHelpers) {
  const cplx tau{0.3, 1.1};
  const Lattice L(tau);
  const auto lp = L.lattice_point(2.0 - 3.0 * tau);
  ASSERT_TRUE(lp.has_value());
  EXPECT_EQ(lp->first, 2);
  EXPECT_EQ(lp->second, -3);
  EXPECT_FALSE(L.lattice_point(0.5).has_value());
  const cplx w = L.normalize(cplx{-0.7, -2.0});
  const double b = w.imag() / tau.imag(), a = w.real() - b * tau.real();
  EXPECT_GE(a, 0.0);
  EXPECT_LT(a, 1.0);
  EXPECT_GE(b, 0.0);
  EXPECT_LT(b, 1.0);
  EXPECT_NEAR(L.distance_to_lattice(cplx{-0.7, -2.0}), L.distance_to_lattice(w), 1e-12);
  EXPECT_EQ(L.sigma(1.0 + tau), cplx{});
  EXPECT_THROW(L.zeta(0.0), Error);
}
