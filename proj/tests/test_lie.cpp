#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "knz/lie_algebra.hpp"

using namespace knz;

namespace {

Mat comm(const Mat& a, const Mat& b) { return a * b - b * a; }

// [x, y] for x, y in sl2 from the defining matrices, as a coordinate vector.
Vec matrix_bracket(const SimpleLieAlgebraData& g, int a, int b) {
  const Mat c = comm(g.defining[a], g.defining[b]);
  Vec v(3);
  v << c(0, 1), c(1, 0), c(0, 0);
  return v;
}

Vec unit(int dim, int a) {
  Vec v = Vec::Zero(dim);
  v(a) = 1.0;
  return v;
}

}  // namespace

TEST(Sl2, StructureConstantsMatchMatrices) {
  const auto g = make_sl2();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) EXPECT_LT((g.bracket(unit(3, a), unit(3, b)) - matrix_bracket(g, a, b)).norm(), 1e-15);
}

TEST(Sl2, FormIsInvariantAndKappaIsTwo) {
  const auto g = make_sl2();
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) {
        const cplx l = g.pairing(g.bracket(unit(3, a), unit(3, b)), unit(3, c));
        const cplx r = g.pairing(unit(3, a), g.bracket(unit(3, b), unit(3, c)));
        EXPECT_LT(std::abs(l - r), 1e-15);
      }
  EXPECT_DOUBLE_EQ(g.kappa, 2.0);
  EXPECT_LT((g.adjoint_casimir() - 4.0 * Mat::Identity(3, 3)).norm(), 1e-14);
  // kappa scales inversely with the form
  EXPECT_DOUBLE_EQ(make_sl2(2.0).kappa, 1.0);
  EXPECT_DOUBLE_EQ(make_abelian(2).kappa, 0.0);
}

TEST(Sl2, IrrepsSatisfyRelations) {
  const auto g = make_sl2();
  for (int w = 0; w <= 4; ++w) {
    const auto r = irrep(g, w);
    ASSERT_EQ(r[0].rows(), w + 1);
    EXPECT_LT((comm(r[0], r[1]) - r[2]).norm(), 1e-13);
    EXPECT_LT((comm(r[2], r[0]) - 2.0 * r[0]).norm(), 1e-13);
    EXPECT_LT((comm(r[2], r[1]) + 2.0 * r[1]).norm(), 1e-13);
    // Casimir ef + fe + h^2/2 acts by w(w+2)/2
    const Mat C = r[0] * r[1] + r[1] * r[0] + 0.5 * r[2] * r[2];
    EXPECT_LT((C - (w * (w + 2) / 2.0) * Mat::Identity(w + 1, w + 1)).norm(), 1e-12);
  }
  EXPECT_THROW(irrep(g, -1), Error);
}

TEST(Sl2, TwoSiteCasimirSpectrum) {
  // V_1 (x) V_1 = V_2 + V_0: Omega_12 = (C_total - C_1 - C_2) / 2 -> 1/2 and -3/2
  const WeightedTensorSpace V(make_sl2(), {1, 1});
  const Mat O = casimir_two_site(V, 0, 1);
  Eigen::ComplexEigenSolver<Mat> es(O);
  std::vector<double> ev;
  for (int i = 0; i < 4; ++i) ev.push_back(es.eigenvalues()(i).real());
  std::sort(ev.begin(), ev.end());
  EXPECT_NEAR(ev[0], -1.5, 1e-12);
  EXPECT_NEAR(ev[1], 0.5, 1e-12);
  EXPECT_NEAR(ev[3], 0.5, 1e-12);
  EXPECT_LT((O - casimir_two_site(V, 1, 0)).norm(), 1e-14);
  EXPECT_THROW(casimir_two_site(V, 0, 0), Error);
}

TEST(Sl2, TwistedSitesRemainRepresentations) {
  const auto g = make_sl2();
  Mat t(2, 2);
  t << cplx{1.0, 0.3}, 2.0, cplx{-0.5, 0.0}, cplx{0.7, -0.2};
  const WeightedTensorSpace V(g, {2, 1}, {t, Mat::Identity(2, 2)});
  for (int p = 0; p < 2; ++p)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        const Vec br = g.bracket(unit(3, a), unit(3, b));
        EXPECT_LT((comm(V.action(a, p), V.action(b, p)) - V.action(br, p)).norm(), 1e-12);
      }
  // actions at different sites commute
  EXPECT_LT(comm(V.action(0, 0), V.action(1, 1)).norm(), 1e-14);
  // Ad(gamma) preserves the form
  const Mat A = adjoint_of_group_element(g, t);
  EXPECT_LT((A.transpose() * g.form * A - g.form).norm(), 1e-12);
}

TEST(Abelian, OneDimensionalModules) {
  const WeightedTensorSpace V(make_abelian(), {3, -2});
  EXPECT_EQ(V.dim(), 1);
  EXPECT_EQ(V.action(0, 0)(0, 0), cplx{3.0});
  EXPECT_EQ(V.action(0, 1)(0, 0), cplx{-2.0});
}

TEST(Lie, CriticalLevelIsRejected) {
  try {
    require_noncritical(-2.0, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
  }
  EXPECT_NO_THROW(require_noncritical(1.0, 2.0));
}

TEST(Lie, TensorSpaceValidation) {
  EXPECT_THROW(WeightedTensorSpace(make_sl2(), {}), Error);
  EXPECT_THROW(WeightedTensorSpace(make_sl2(), {1, 1}, {Mat::Identity(2, 2)}), Error);
  EXPECT_THROW(WeightedTensorSpace(make_sl2(), {1}, {Mat::Zero(2, 2)}), Error);
}
