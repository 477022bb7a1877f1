#include <gtest/gtest.h>

#include <cmath>

#include "npgeo/classify.hpp"
#include "npgeo/npcore.hpp"
#include "support.hpp"

using namespace npgeo;
using npgeo::test::Rng;

namespace {

FitResult synthetic(double lambda, double f_lo, double f_hi, int grid = 3) {
  std::vector<PointFit> pts;
  for (int i = 0; i < 5; ++i) {
    PointFit p;
    p.lambda = lambda;
    p.f = f_lo + (f_hi - f_lo) * i / 4.0;
    pts.push_back(p);
  }
  return aggregate(pts, grid);
}

}  // namespace

TEST(Fit, HopfLorentz) {
  const Classification c = classify_metric(catalog_chart("hopf_lorentz"), "T", 5, true);
  EXPECT_EQ(c.fit.points.size(), 125u);
  EXPECT_NEAR(c.fit.lambda, -2.0, 1e-8);
  EXPECT_NEAR(c.fit.f_min, 6.0, 1e-8);
  EXPECT_NEAR(c.fit.f_max, 6.0, 1e-8);
  EXPECT_NEAR(c.fit.f_min - c.fit.lambda, 8.0, 1e-8);
  EXPECT_LE(c.fit.lambda_spread, 1e-8);
  EXPECT_LE(c.fit.max_offdiag, 1e-8);
  EXPECT_EQ(c.verdict.kind, VerdictKind::NoObstruction);
}

TEST(Fit, ProductCylinder) {
  const Classification c = classify_metric(catalog_chart("product_cylinder"), "T", 5, true);
  EXPECT_NEAR(c.fit.lambda, 0.0, 1e-10);
  EXPECT_NEAR(c.fit.f_min, 1.0, 1e-10);
  EXPECT_NEAR(c.fit.f_max, 1.0, 1e-10);
  EXPECT_EQ(c.verdict.kind, VerdictKind::SplitCase);
  ASSERT_TRUE(c.verdict.max_abs_d.has_value());
  EXPECT_LE(*c.verdict.max_abs_d, 1e-12);
  EXPECT_EQ(classify_metric(catalog_chart("product_cylinder"), "T", 3, false).verdict.kind, VerdictKind::NoObstruction);
}

TEST(Fit, MinkowskiFlat) {
  const Classification c = classify_metric(catalog_chart("minkowski"), "T", 3, true);
  EXPECT_EQ(c.fit.lambda, 0.0);
  EXPECT_EQ(c.fit.f_max, 0.0);
  EXPECT_EQ(c.verdict.kind, VerdictKind::HypothesisFailed);
  EXPECT_NE(c.verdict.reason.find("f attains 0"), std::string::npos);
}

TEST(Fit, GenericLorentzIsNotOfTheForm) {
  const Classification c = classify_metric(test::generic_lorentz(), "T", 3, true);
  EXPECT_EQ(c.verdict.kind, VerdictKind::HypothesisFailed);
  EXPECT_GT(c.fit.max_offdiag, 1e-6);
}

// Ric = f g + (f - lambda) T_b T_b, with T_b = g T, rebuilt in coordinates.
TEST(Fit, ReconstructsRicci) {
  const Chart c = catalog_chart("hopf_lorentz");
  Rng rng(1);
  for (int n = 0; n < 30; ++n) {
    const Vec3 p = rng.point(c);
    const PointFit pf = pointwise_fit(c, "T", p);
    const CurvatureValue cv = curvature_at(c, p);
    const Vec3 t = field_values(c, "T", p);
    Vec3 tb{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) tb[i] += cv.metric.g[i][j] * t[j];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        EXPECT_NEAR(cv.ricci[i][j], pf.f * cv.metric.g[i][j] + (pf.f - pf.lambda) * tb[i] * tb[j], 1e-7);
  }
}

TEST(Fit, AngleInvariance) {
  Rng rng(2);
  for (const Chart& c : {catalog_chart("hopf_lorentz"), test::generic_lorentz()}) {
    for (int n = 0; n < 20; ++n) {
      const Vec3 p = rng.point(c);
      const PointFit pf = pointwise_fit(c, "T", p);
      const FrameData f = frame_data(c, p, "T", rng.angle());
      EXPECT_NEAR(pf.lambda, -f.ric[0][0], 1e-12);
      EXPECT_NEAR(pf.f, 0.5 * (f.ric[1][1] + f.ric[2][2]), 1e-12);
    }
  }
}

TEST(Fit, Preconditions) {
  EXPECT_THROW(pointwise_fit(catalog_chart("hopf_round"), "T", {0.7, 0, 0}), PreconditionError);
  EXPECT_THROW(aggregate({}), PreconditionError);
  EXPECT_THROW(classify_metric(catalog_chart("hopf_lorentz"), "T", 0, true), PreconditionError);
  const Classification r = classify_metric(catalog_chart("euclidean"), "T", 3, true);
  EXPECT_EQ(r.verdict.kind, VerdictKind::HypothesisFailed);
  const Chart bad = test::chart_from_text(R"(coord t = -1 .. 1
coord x = -1 .. 1
coord y = -1 .. 1
g 0 0 = -1
g 1 1 = 1
g 2 2 = 1
field T = 2, 0, 0
)");
  const Classification b = classify_metric(bad, "T", 3, true);
  EXPECT_EQ(b.verdict.kind, VerdictKind::HypothesisFailed);
  EXPECT_FALSE(b.verdict.reason.empty());
}

TEST(Decide, Table) {
  EXPECT_EQ(decide(synthetic(1.0, 5.0, 5.0), true).kind, VerdictKind::ObstructedByTheorem);
  EXPECT_EQ(decide(synthetic(1.0, 5.0, 5.0), false).kind, VerdictKind::NoObstruction);
  EXPECT_EQ(decide(synthetic(0.0, 1.0, 2.0), true).kind, VerdictKind::SplitCase);
  EXPECT_EQ(decide(synthetic(0.0, 1.0, 2.0), false).kind, VerdictKind::NoObstruction);
  EXPECT_EQ(decide(synthetic(-2.0, 6.0, 6.0), true).kind, VerdictKind::NoObstruction);
  EXPECT_EQ(decide(synthetic(1.0, -1.0, 2.0), true).kind, VerdictKind::HypothesisFailed);
  EXPECT_EQ(decide(synthetic(1.0, 0.5, 2.0), true).kind, VerdictKind::HypothesisFailed);
  EXPECT_EQ(decide(synthetic(1.0, 1.0 + 5e-7, 2.0), true).kind, VerdictKind::HypothesisFailed);
  EXPECT_EQ(decide(synthetic(1.0, 1.0 + 2e-6, 2.0), true).kind, VerdictKind::ObstructedByTheorem);
  EXPECT_EQ(decide(synthetic(5e-7, 1.0, 2.0), true).kind, VerdictKind::SplitCase);
  EXPECT_EQ(decide(synthetic(2e-6, 1.0, 2.0), true).kind, VerdictKind::ObstructedByTheorem);
}

TEST(Decide, SpreadAndFit) {
  FitResult f = synthetic(1.0, 5.0, 5.0);
  f.points[0].lambda = 1.1;
  f = aggregate(f.points, 3);
  EXPECT_NEAR(f.lambda_spread, 0.1, 1e-15);
  EXPECT_EQ(decide(f, true).kind, VerdictKind::HypothesisFailed);
  FitResult g = synthetic(1.0, 5.0, 5.0);
  g.points[2].offdiag = 1e-3;
  g = aggregate(g.points, 3);
  const Verdict v = decide(g, true);
  EXPECT_EQ(v.kind, VerdictKind::HypothesisFailed);
  EXPECT_EQ(v.tolerances.fit_tol, 1e-6);
}

TEST(Decide, ReasonMentionsGrid) {
  const Verdict v = decide(synthetic(1.0, 5.0, 5.0, 7), true);
  EXPECT_NE(v.reason.find("7^3"), std::string::npos);
  EXPECT_FALSE(v.max_abs_d.has_value());
}

TEST(QuasiEinstein, Hopf) {
  const Chart c = catalog_chart("hopf_lorentz");
  const Classification cl = classify_metric(c, "T", 3, true);
  double km = 0.0;
  for (const Vec3& p : probe_grid(c, 3)) km = std::max(km, killing_residual(c, "T", p));
  const QuasiEinsteinNote n = quasi_einstein_interpret(cl.fit, km);
  ASSERT_TRUE(n.emitted);
  ASSERT_TRUE(n.m_defined);
  EXPECT_NEAR(n.m_min, 0.125, 1e-9);
  EXPECT_NEAR(n.m_max, 0.125, 1e-9);
  EXPECT_NEAR(n.mu_min, 6.0, 1e-8);
}

TEST(QuasiEinstein, EinsteinCaseAndSuppression) {
  const QuasiEinsteinNote e = quasi_einstein_interpret(synthetic(3.0, 3.0, 3.0), 0.0);
  EXPECT_TRUE(e.emitted);
  EXPECT_FALSE(e.m_defined);
  EXPECT_NE(e.reason.find("Einstein"), std::string::npos);
  const QuasiEinsteinNote s = quasi_einstein_interpret(synthetic(-2.0, 6.0, 6.0), 1e-3);
  EXPECT_FALSE(s.emitted);
  EXPECT_EQ(s.reason, "T is not Killing");
}

TEST(SampledFlow, HopfState) {
  const Chart c = catalog_chart("hopf_lorentz");
  const FlowState x = sample_flow_state(c, "T", {0.7, 1.0, 2.0});
  EXPECT_NEAR(x.theta, 0.0, 1e-12);
  EXPECT_NEAR(x.omega2, 4.0, 1e-12);
  EXPECT_NEAR(x.s, 0.0, 1e-12);
  EXPECT_NEAR(x.f, 6.0, 1e-10);
  EXPECT_NEAR(x.H, 2.0, 1e-10);
  EXPECT_NEAR(sampled_mu(c, "T", {0.7, 1.0, 2.0}), -2.0, 1e-10);
}
