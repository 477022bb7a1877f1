#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "npgeo/congruence.hpp"
#include "support.hpp"

using namespace npgeo;
using npgeo::test::Rng;
using K = ClosedFormKind;

namespace {

Chart circle_chart() {
  return test::chart_from_text(R"(name plane
coord x = -2 .. 2
coord y = -2 .. 2
coord z = -1 .. 1
g 0 0 = 1
g 1 1 = 1
g 2 2 = 1
field R = -y, x, 0
field E = 1, 0, 0
)");
}

double curve_error(double dt) {
  const Curve c = integrate_curve(circle_chart(), "R", {1.0, 0.0, 0.0}, 2.0, dt);
  const Vec3& p = c.samples.back().point;
  return std::hypot(p[0] - std::cos(2.0), p[1] - std::sin(2.0));
}

ClosedFormParams params_for(K k) {
  ClosedFormParams p;
  switch (k) {
    case K::ThetaTanh: p.mu = 1.0; p.c = 0.2; break;
    case K::ThetaConst: p.mu = 1.0; break;
    case K::FExp: p.mu = 1.0; p.f0 = 3.0; break;
    case K::FSech: p.mu = 1.0; p.c = 0.3; p.f0 = 2.0; break;
    case K::HExp: p.mu = 1.0; p.c1 = 0.01; p.c2 = 0.02; break;
    case K::ThetaRational:
    case K::HQuadratic:
    case K::FRational: p.mu = 0.0; p.c1 = 0.5; p.c2 = 1.0; p.c3 = 2.0; break;
    case K::HTrig:
    case K::FTrig: p.mu = -1.0; p.c1 = 0.3; p.c2 = 0.2; p.c3 = 1.5; break;
  }
  return p;
}

FlowState on_relation(double theta, double omega2, double s, double f, double mu) {
  FlowState x;
  x.theta = theta;
  x.omega2 = omega2;
  x.s = s;
  x.f = f;
  x.H = 0.25 * omega2 - s + 0.25 * theta * theta - 0.5 * mu;
  return x;
}

}  // namespace

TEST(Curve, StraightLine) {
  const Curve c = integrate_curve(circle_chart(), "E", {-1.0, 0.5, 0.0}, 1.0, 0.1);
  EXPECT_FALSE(c.exited);
  ASSERT_EQ(c.samples.size(), 11u);
  EXPECT_NEAR(c.samples.back().t, 1.0, 1e-14);
  EXPECT_NEAR(c.samples.back().point[0], 0.0, 1e-14);
  EXPECT_NEAR(c.samples.back().point[1], 0.5, 1e-15);
}

TEST(Curve, ExitsDomain) {
  const Curve c = integrate_curve(circle_chart(), "E", {1.5, 0.0, 0.0}, 2.0, 0.01);
  EXPECT_TRUE(c.exited);
  EXPECT_LE(c.samples.back().point[0], 2.0);
  EXPECT_THROW(integrate_curve(circle_chart(), "E", {3.0, 0.0, 0.0}, 1.0, 0.1), DomainError);
  EXPECT_THROW(integrate_curve(circle_chart(), "E", {0.0, 0.0, 0.0}, 1.0, 0.0), PreconditionError);
}

TEST(Curve, FourthOrder) {
  const double e1 = curve_error(0.1), e2 = curve_error(0.05);
  EXPECT_LT(e1, 1e-4);
  EXPECT_NEAR(e1 / e2, 16.0, 2.0);
}

TEST(Evolution, RhsExample) {
  FlowState x;
  x.theta = 1.0;
  x.omega2 = 2.0;
  x.s = 0.5;
  x.f = 3.0;
  x.H = 4.0;
  const FlowDerivative d = evolution_rhs(x, 0.25);
  EXPECT_DOUBLE_EQ(d.d.t, 1.0);
  EXPECT_DOUBLE_EQ(d.d.theta, 1.0 - 1.0 - 0.5 + 0.25);
  EXPECT_DOUBLE_EQ(d.d.omega2, -4.0);
  EXPECT_DOUBLE_EQ(d.d.s, -1.0);
  EXPECT_DOUBLE_EQ(d.d.f, -2.75);
  EXPECT_DOUBLE_EQ(d.d.H, -4.0);
  EXPECT_DOUBLE_EQ(d.theta_from_H, 8.0 - 1.0 + 0.5);
}

TEST(Evolution, TwoThetaFormsAgreeOnRelation) {
  Rng rng(1);
  for (int n = 0; n < 200; ++n) {
    const double mu = rng.uniform(-2, 2);
    const FlowState x = on_relation(rng.uniform(-3, 3), rng.uniform(0, 4), rng.uniform(-2, 2), rng.uniform(-2, 2), mu);
    EXPECT_NEAR(h_relation(x, mu), x.H, 1e-14);
    const FlowDerivative d = evolution_rhs(x, mu);
    EXPECT_NEAR(d.d.theta, d.theta_from_H, 1e-12);
  }
}

TEST(Evolution, HopfStateIsStationary) {
  const Trajectory tr = integrate_evolution(on_relation(0.0, 4.0, 0.0, 6.0, -2.0), -2.0, 5.0, 1e-3);
  EXPECT_FALSE(tr.blew_up);
  EXPECT_EQ(tr.samples.size(), 5001u);
  const FlowState& e = tr.samples.back();
  EXPECT_NEAR(e.t, 5.0, 1e-9);
  EXPECT_EQ(e.theta, 0.0);
  EXPECT_EQ(e.omega2, 4.0);
  EXPECT_EQ(e.f, 6.0);
  EXPECT_EQ(e.H, 2.0);
}

TEST(Evolution, BlowUp) {
  // theta' = -theta^2 / 2 from theta = -2: theta = -2 / (1 - t).
  const Trajectory tr = integrate_evolution(on_relation(-2.0, 0.0, 0.0, 0.0, 0.0), 0.0, 5.0, 1e-3);
  EXPECT_TRUE(tr.blew_up);
  EXPECT_NEAR(tr.blowup_time, 1.0, 1e-6);
  for (const auto& x : tr.samples)
    if (x.t < 0.9) {
      EXPECT_NEAR(x.theta, -2.0 / (1.0 - x.t), 1e-9 * std::fabs(x.theta));
    }
}

TEST(Evolution, HDriftAndSigns) {
  Rng rng(2);
  for (int n = 0; n < 50; ++n) {
    const double mu = rng.uniform(-1, 1);
    const FlowState x0 = on_relation(rng.uniform(0, 2), rng.uniform(0, 2), rng.uniform(-1, 1), rng.uniform(-2, 2), mu);
    const Trajectory tr = integrate_evolution(x0, mu, 1.0, 1e-3);
    ASSERT_FALSE(tr.blew_up);
    EXPECT_LE(tr.max_h_drift, 1e-8);
    for (const auto& x : tr.samples) {
      EXPECT_GE(x.omega2, 0.0);
      EXPECT_GE(x.s * x0.s, 0.0);
      EXPECT_GE(x.H * x0.H, 0.0);
      EXPECT_GE((x.f - mu) * (x0.f - mu), 0.0);
    }
  }
  EXPECT_THROW(integrate_evolution(FlowState{}, 0.0, 1.0, -1.0), PreconditionError);
}

TEST(Evolution, Csv) {
  std::ostringstream os;
  write_csv(os, integrate_evolution(on_relation(0.0, 4.0, 0.0, 6.0, -2.0), -2.0, 0.002, 1e-3));
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,theta,omega2,s,f,H");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 3);
}

TEST(ClosedForms, OracleResidual) {
  for (K k : all_closed_forms()) {
    const ClosedFormParams p = params_for(k);
    for (double t = 0.0; t <= 2.0; t += 0.125) EXPECT_LE(oracle_residual(k, p, t), 1e-10) << to_string(k) << " t=" << t;
  }
}

// Independent of the analytic derivatives: differences of the closed forms
// against the scalar equations each branch solves.
TEST(ClosedForms, DifferencedAgainstEquations) {
  const double h = 1e-4;
  for (K k : all_closed_forms()) {
    const ClosedFormParams p = params_for(k);
    for (double t = 0.25; t <= 1.75; t += 0.25) {
      const double F = closed_form(k, p, t);
      const double dF = (closed_form(k, p, t + h) - closed_form(k, p, t - h)) / (2 * h);
      const double th = (k == K::ThetaTanh || k == K::ThetaConst || k == K::ThetaRational) ? F : branch_theta(k, p, t);
      double want = 0.0;
      switch (k) {
        case K::ThetaTanh:
        case K::ThetaConst: want = -F * F + 2 * p.mu; break;
        case K::ThetaRational: want = 2.0 / (t * t + p.c1 * t + p.c2) - F * F; break;
        case K::FExp:
        case K::FSech:
        case K::FRational:
        case K::FTrig: want = -th * (F - p.mu); break;
        default: want = -th * F; break;
      }
      EXPECT_NEAR(dF, want, 1e-7) << to_string(k) << " t=" << t;
      if (k == K::HExp || k == K::HQuadratic || k == K::HTrig) {
        auto u = [&](double s) { return 1.0 / closed_form(k, p, s); };
        const double ddu = (u(t + 1e-3) - 2 * u(t) + u(t - 1e-3)) / 1e-6;
        EXPECT_NEAR(ddu, 2.0 + 2.0 * p.mu * u(t), 1e-5) << to_string(k);
      }
    }
  }
}

TEST(ClosedForms, ThetaConstSign) {
  ClosedFormParams p;
  p.mu = 2.0;
  p.sign = -1;
  EXPECT_DOUBLE_EQ(closed_form(K::ThetaConst, p, 1.0), -2.0);
  EXPECT_NEAR(oracle_residual(K::FExp, p, 0.5), 0.0, 1e-12);
}

TEST(ClosedForms, BranchesMatchIntegrator) {
  for (K k : all_closed_forms()) {
    const ClosedFormParams p = params_for(k);
    const FlowState x0 = branch_initial_state(k, p);
    EXPECT_NEAR(x0.H, h_relation(x0, p.mu), 1e-14) << to_string(k);
    EXPECT_NEAR(branch_observable(k, x0), closed_form(k, p, 0.0), 1e-14) << to_string(k);
    EXPECT_LE(branch_sup_error(k, p, 2.0, 1e-3), 1e-6) << to_string(k);
  }
}

TEST(ClosedForms, ParameterErrors) {
  ClosedFormParams p;
  p.mu = -1.0;
  EXPECT_THROW(closed_form(K::ThetaTanh, p, 0.0), PreconditionError);
  EXPECT_THROW(closed_form(K::HExp, p, 0.0), PreconditionError);
  EXPECT_THROW(closed_form(K::HQuadratic, p, 0.0), PreconditionError);
  p.mu = 0.0;
  p.c1 = 2.0;
  p.c2 = 1.0;
  EXPECT_THROW(closed_form(K::HQuadratic, p, 0.0), PreconditionError);
  p.mu = 1.0;
  EXPECT_THROW(closed_form(K::HTrig, p, 0.0), PreconditionError);
  EXPECT_THROW(riccati_blowup(RiccatiKind::ThetaF, 0.0, 1.0, 1.0), PreconditionError);
}

TEST(Riccati, Values) {
  EXPECT_NEAR(riccati_value(RiccatiKind::ThetaMu, 0.0, 1.0, 2.0), 1.0 / 3.0, 1e-10);
  const double r = std::sqrt(2.0);
  EXPECT_NEAR(riccati_value(RiccatiKind::ThetaMu, 1.0, 0.0, 1.0), r * std::tanh(r), 1e-10);
  EXPECT_NEAR(riccati_value(RiccatiKind::ThetaF, 1.0, 0.0, 1.0), -std::tan(1.0), 1e-10);
}

TEST(Riccati, BlowupTimes) {
  BlowupResult b = riccati_blowup(RiccatiKind::ThetaMu, 0.0, -1.0, 5.0);
  EXPECT_TRUE(b.blew_up);
  EXPECT_NEAR(b.time, 1.0, 1e-6);
  // theta0 > 0 with mu = 0 blows up in the past at -1/theta0.
  b = riccati_blowup(RiccatiKind::ThetaMu, 0.0, 2.0, 5.0);
  EXPECT_TRUE(b.blew_up);
  EXPECT_NEAR(b.time, -0.5, 1e-6);
  // theta0 < -sqrt(2 mu): theta = r coth(r t + c).
  const double mu = 0.5, r = 1.0, th0 = -2.0;
  b = riccati_blowup(RiccatiKind::ThetaMu, mu, th0, 5.0);
  EXPECT_TRUE(b.blew_up);
  EXPECT_NEAR(b.time, -0.5 * std::log((th0 + r) / (th0 - r)) / r, 1e-6);
  // f > 0 always blows up; forward time pi/2 + atan(theta0 / sqrt f) over sqrt f.
  b = riccati_blowup(RiccatiKind::ThetaF, 4.0, 1.0, 5.0);
  EXPECT_TRUE(b.blew_up);
  EXPECT_NEAR(b.time, (std::numbers::pi / 2 + std::atan(0.5)) / 2.0, 1e-6);
  // |theta0| < sqrt(2 mu): complete in both directions.
  b = riccati_blowup(RiccatiKind::ThetaMu, 1.0, 0.5, 5.0);
  EXPECT_FALSE(b.blew_up);
}
