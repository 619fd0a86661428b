#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "knz/serialize.hpp"
#include "knz/verify.hpp"

using namespace knz;

TEST(Sampler, StreamsAreReproducibleAndIndependent) {
  ConfigSampler a(7, 3), b(7, 3), c(7, 4);
  const cplx ta = a.tau(), tb = b.tau(), tc = c.tau();
  EXPECT_EQ(ta, tb);
  EXPECT_NE(ta, tc);
  EXPECT_GT(ta.imag(), 0.79);
  const auto pts = a.rational_points(3);
  for (int i = 0; i < 3; ++i) {
    EXPECT_LE(std::abs(pts[i]), 1.5);
    for (int j = i + 1; j < 3; ++j) EXPECT_GE(std::abs(pts[i] - pts[j]), 1.0);
  }
  const MarkedCurve e = a.elliptic(ta, 2);
  EXPECT_GE(e.min_gap(), 0.25);
  EXPECT_GE(extra_zero_margin(e, -4, 4), 0.05);
}

TEST(CheckList, BoundsAndOverride) {
  VerifyOptions o;
  CheckList l(o);
  l.upper(1, "a", "x", 1e-12, 1e-9);
  l.upper(1, "b", "x", std::numeric_limits<double>::quiet_NaN(), 1e-9);
  l.lower(1, "c", "x", 0.5, 1e-6);
  l.lower(1, "d", "x", 1e-7, 1e-6);
  const auto& r = l.results();
  EXPECT_TRUE(r[0].pass);
  EXPECT_FALSE(r[1].pass);
  EXPECT_TRUE(r[2].pass);
  EXPECT_FALSE(r[3].pass);
  o.tol = 1e-30;
  CheckList t(o);
  t.upper(1, "a", "x", 1e-12, 1e-9);
  t.lower(1, "c", "x", 0.5, 1e-6);
  EXPECT_FALSE(t.results()[0].pass);
  EXPECT_EQ(t.results()[0].bound, 1e-30);
  EXPECT_TRUE(t.results()[1].pass);  // lower bounds are not tolerances
}

TEST(Verify, CriteriaAreNumberedOneToEleven) {
  const auto cs = criteria();
  ASSERT_EQ(cs.size(), 11u);
  for (std::size_t i = 0; i < cs.size(); ++i) EXPECT_EQ(cs[i].id, static_cast<int>(i + 1));
}

TEST(Verify, SelectedCriteriaPass) {
  const RunConfig cfg = parse_config("");
  const auto rep = run_verification(cfg, VerifyOptions{}, {0, 2, 3, 11});
  EXPECT_TRUE(rep.passed());
  EXPECT_GT(rep.checks.size(), 5u);
  for (const auto& r : rep.checks) {
    EXPECT_TRUE(r.criterion == 0 || r.criterion == 2 || r.criterion == 3 || r.criterion == 11) << r.criterion;
    EXPECT_TRUE(r.pass) << r.name << " " << r.label << " " << r.value;
  }
}

TEST(Verify, TamperedToleranceFailsDuality) {
  const RunConfig cfg = parse_config("in_points = 0.3-0.2i, -0.8+0.9i\n");
  VerifyOptions o;
  o.tol = 1e-30;
  const auto rep = run_verification(cfg, o, {1});
  EXPECT_FALSE(rep.passed());
  bool named = false;
  for (const auto& r : rep.checks) named = named || (!r.pass && r.name == "duality_edu");
  EXPECT_TRUE(named);
}

TEST(Verify, ReportsAreDeterministic) {
  const RunConfig cfg = parse_config("");
  VerifyOptions o;
  o.seed = 99;
  const auto a = verify_payload(cfg, run_verification(cfg, o, {3, 8})).dump(2);
  const auto b = verify_payload(cfg, run_verification(cfg, o, {3, 8})).dump(2);
  EXPECT_EQ(a, b);
}

TEST(Verify, ExceptionsBecomeFailedChecks) {
  const Criterion broken{42, "broken", [](CheckList&, const VerifyOptions&) { fail(ErrorKind::numerical, "boom"); }};
  const auto r = run_criterion(broken, VerifyOptions{});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_FALSE(r[0].pass);
  EXPECT_EQ(r[0].detail, "boom");
}

TEST(Verify, SigmaProductOracleMatchesLattice) {
  for (cplx tau : {cplx{0.3, 1.1}, cplx{-0.4, 0.85}}) {
    const Lattice L(tau);
    const SigmaProduct P(tau, eta1_from_e2(tau));
    const cplx z{0.23, -0.31};
    EXPECT_LT(std::abs(P.sigma(z) - L.sigma(z)), 1e-12);
    EXPECT_LT(std::abs(eta1_from_e2(tau) - L.eta1()), 1e-12);
  }
}
