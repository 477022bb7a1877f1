#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "npgeo/npcore.hpp"
#include "support.hpp"

using namespace npgeo;
using npgeo::test::Rng;

namespace {

const std::vector<std::string> kNames = {"S1",        "S2",         "S3",     "S4a",    "S4b",     "bid",
                                         "bid2",      "cov_T_T",    "cov_m_T", "cov_T_m", "cov_m_m", "cov_m_mbar",
                                         "lie_T_m",   "lie_m_mbar", "ric_mm", "ric_TT", "ric_Tm",  "ric_mmbar"};

double worst(const ResidualReport& r) {
  double w = 0.0;
  for (const auto& e : r.residuals) w = std::max(w, e.residual);
  return w;
}

}  // namespace

TEST(DirectionalDerivative, Polynomial) {
  const Chart c = catalog_chart("euclidean");
  auto f = [](const Vec3& q) { return Complex(q[0] * q[0] * q[1], q[2] * q[2] * q[2]); };
  const auto d = directional_derivative(c, f, {0.2, 0.3, 0.4}, {1.0, 2.0, -1.0}, 1e-3);
  // grad = (2xy, x^2, 0) + i (0, 0, 3z^2)
  const Complex want(2 * 0.2 * 0.3 + 2 * 0.04, -3 * 0.16);
  EXPECT_NEAR(std::abs(d.value - want), 0.0, 1e-12);
  EXPECT_LT(d.error, 1e-6);
}

TEST(DirectionalDerivative, Transcendental) {
  const Chart c = catalog_chart("euclidean");
  auto f = [](const Vec3& q) { return std::array<Complex, 2>{Complex(std::sin(q[0])), Complex(std::exp(q[1]))}; };
  const auto d = directional_derivative(c, f, {0.1, 0.2, 0.0}, {0.0, 1.0, 0.0}, 1e-2);
  EXPECT_NEAR(std::abs(d.value[0]), 0.0, 1e-15);
  EXPECT_NEAR(d.value[1].real(), std::exp(0.2), 1e-9);
  const auto z = directional_derivative(c, f, {0.1, 0.2, 0.0}, {0.0, 0.0, 0.0}, 1e-2);
  EXPECT_EQ(z.value[1], Complex(0.0));
}

TEST(DirectionalDerivative, LeavingDomainThrows) {
  const Chart c = catalog_chart("euclidean");
  auto f = [](const Vec3& q) { return Complex(q[0]); };
  EXPECT_THROW(directional_derivative(c, f, {0.9995, 0.0, 0.0}, {1.0, 0.0, 0.0}, 1e-3), DomainError);
  EXPECT_NO_THROW(directional_derivative(c, f, {0.99, 0.0, 0.0}, {1.0, 0.0, 0.0}, 1e-3));
}

TEST(Residuals, NamesAndFiniteness) {
  const ResidualReport r = np_residuals(catalog_chart("hopf_lorentz"), "T", {0.7, 1.0, 2.0}, 0.3);
  ASSERT_EQ(r.residuals.size(), kNames.size());
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    EXPECT_EQ(r.residuals[i].name, kNames[i]);
    EXPECT_TRUE(std::isfinite(r.residuals[i].residual));
    EXPECT_TRUE(std::isfinite(r.residuals[i].fd_error));
    EXPECT_EQ(r.residuals[i].tol, 1e-5);
  }
  EXPECT_THROW(r.at("S9"), Error);
  EXPECT_EQ(r.at("S3").name, "S3");
}

TEST(Residuals, MinkowskiVanishes) {
  const Chart c = catalog_chart("minkowski");
  Rng rng(1);
  for (int n = 0; n < 20; ++n) {
    const ResidualReport r = np_residuals(c, "T", rng.point(c), rng.angle());
    EXPECT_LE(worst(r), 1e-10);
    for (const auto& e : r.residuals) EXPECT_LE(e.fd_error, 1e-10);
  }
}

TEST(Residuals, HopfLorentzRandom) {
  const Chart c = catalog_chart("hopf_lorentz");
  Rng rng(2);
  for (int n = 0; n < 50; ++n) {
    const ResidualReport r = np_residuals(c, "T", rng.point(c), rng.angle());
    for (const auto& e : r.residuals) EXPECT_LE(e.residual, 1e-5) << e.name;
    EXPECT_TRUE(r.all_pass());
  }
}

TEST(Residuals, HopfS1ComponentsVanish) {
  const ResidualReport r = np_residuals(catalog_chart("hopf_lorentz"), "T", {0.6, 0.4, 1.1}, 1.0);
  const ResidualEntry& s1 = r.at("S1");
  EXPECT_NEAR(std::abs(s1.lhs), 0.0, 1e-8);
  EXPECT_NEAR(s1.rhs.real(), 0.0, 1e-12);
  EXPECT_NEAR(s1.rhs.imag(), 0.0, 1e-12);
}

TEST(Residuals, CatalogCharts) {
  Rng rng(3);
  for (const char* name : {"hopf_round", "product_cylinder", "euclidean", "minkowski"}) {
    const Chart c = catalog_chart(name);
    for (int n = 0; n < 10; ++n) EXPECT_TRUE(np_residuals(c, "T", rng.point(c), rng.angle()).all_pass()) << name;
  }
}

TEST(Residuals, GenericRiemannian) {
  const Chart c = test::generic_riemannian();
  Rng rng(4);
  for (int n = 0; n < 20; ++n) {
    const ResidualReport r = np_residuals(c, "T", rng.point(c), rng.angle());
    for (const auto& e : r.residuals) EXPECT_LE(e.residual, 1e-5) << e.name;
  }
}

// The printed Lorentzian S4a misses -2 sigma conj(kappa) + 2 kappa conj(rho);
// a chart with kappa != 0 separates the two forms.
TEST(Residuals, GenericLorentzS4aForms) {
  const Chart c = test::generic_lorentz();
  Rng rng(5);
  NpOptions derived;
  derived.derived_s4a = true;
  for (int n = 0; n < 20; ++n) {
    const Vec3 p = rng.point(c);
    const double a = rng.angle();
    const ResidualReport printed = np_residuals(c, "T", p, a), fixed = np_residuals(c, "T", p, a, derived);
    const FrameData f = frame_data(c, p, "T", a);
    const SpinCoefficients s = spin_coefficients(f);
    const Complex missing = -2.0 * s.sigma * std::conj(s.kappa) + 2.0 * s.kappa * std::conj(s.rho);
    EXPECT_NEAR(std::abs(printed.at("S4a").rhs + missing - fixed.at("S4a").rhs), 0.0, 1e-12);
    EXPECT_LE(fixed.at("S4a").residual, 1e-5);
    if (std::abs(missing) > 1e-3) {
      EXPECT_GT(printed.at("S4a").residual, 1e-4);
    }
    for (const auto& e : fixed.residuals) EXPECT_LE(e.residual, 1e-5) << e.name;
  }
}

TEST(Residuals, AngleInvariance) {
  const Chart c = test::generic_riemannian();
  const Vec3 p = c.center();
  for (int k = 0; k < 8; ++k) {
    const ResidualReport r = np_residuals(c, "T", p, k * std::numbers::pi / 4);
    EXPECT_TRUE(r.all_pass()) << k;
  }
}

TEST(Residuals, RichardsonEstimateBoundsError) {
  const Chart c = test::generic_riemannian();
  Rng rng(6);
  for (int n = 0; n < 10; ++n) {
    const ResidualReport r = np_residuals(c, "T", rng.point(c), rng.angle());
    for (const std::string name : {"S1", "S2", "S3", "S4a", "S4b", "bid", "bid2"}) {
      const ResidualEntry& e = r.at(name);
      EXPECT_GT(e.fd_error, 0.0);
      EXPECT_LE(e.residual, 10.0 * e.fd_error + 1e-9) << name;
    }
  }
}

TEST(Residuals, StepRefinementConverges) {
  const Chart c = test::generic_riemannian();
  const Vec3 p = c.center();
  NpOptions coarse, fine;
  coarse.fd_step = 4e-2;
  fine.fd_step = 2e-2;
  const ResidualReport a = np_residuals(c, "T", p, 0.4, coarse), b = np_residuals(c, "T", p, 0.4, fine);
  for (const std::string name : {"S1", "S2", "S3", "S4b"}) {
    EXPECT_LT(b.at(name).residual, a.at(name).residual / 8.0) << name;
  }
}

TEST(Residuals, FaultInjectionIsDetected) {
  const Chart c = catalog_chart("hopf_lorentz");
  NpOptions opt;
  opt.fault_g00_scale = 1.1;
  const ResidualReport r = np_residuals(c, "T", {0.7, 1.0, 2.0}, 0.2, opt);
  EXPECT_FALSE(r.all_pass());
  EXPECT_FALSE(r.at("S1").pass);
  EXPECT_TRUE(r.at("cov_T_T").pass);
}

TEST(Residuals, RelativeOption) {
  const Chart c = catalog_chart("hopf_lorentz");
  NpOptions abs_opt, rel_opt;
  abs_opt.fault_g00_scale = rel_opt.fault_g00_scale = 1.1;
  rel_opt.relative = true;
  const ResidualReport a = np_residuals(c, "T", {0.7, 1.0, 2.0}, 0.2, abs_opt);
  const ResidualReport b = np_residuals(c, "T", {0.7, 1.0, 2.0}, 0.2, rel_opt);
  for (std::size_t i = 0; i < a.residuals.size(); ++i) {
    const auto& e = a.residuals[i];
    const double scale = 1.0 + std::max(std::abs(e.lhs), std::abs(e.rhs));
    EXPECT_NEAR(b.residuals[i].residual, e.residual / scale, 1e-15);
  }
}

TEST(Residuals, StructureOnly) {
  Rng rng(7);
  const std::set<std::string> want(kNames.begin() + 7, kNames.end());
  for (const Chart& c : {test::generic_lorentz(), test::generic_riemannian()}) {
    const ResidualReport r = structure_residuals(c, "T", rng.point(c), rng.angle());
    std::set<std::string> got;
    for (const auto& e : r.residuals) {
      got.insert(e.name);
      EXPECT_LE(e.residual, 1e-10) << e.name;
      EXPECT_EQ(e.fd_error, 0.0);
    }
    EXPECT_EQ(got, want);
  }
}

TEST(Killing, Examples) {
  EXPECT_NEAR(killing_residual(catalog_chart("euclidean"), "V", {0.3, 0.1, 0.2}), 2.0, 1e-12);
  EXPECT_NEAR(killing_residual(catalog_chart("euclidean"), "T", {0.3, 0.1, 0.2}), 0.0, 1e-15);
  Rng rng(8);
  for (const char* name : {"hopf_round", "hopf_lorentz", "product_cylinder"}) {
    const Chart c = catalog_chart(name);
    for (int n = 0; n < 10; ++n) EXPECT_LE(killing_residual(c, "T", rng.point(c)), 1e-12) << name;
  }
  EXPECT_GT(killing_residual(test::generic_lorentz(), "T", {0.3, 0.4, -0.2}), 1e-3);
}

TEST(Bochner, KillingFields) {
  Rng rng(9);
  for (const char* name : {"hopf_round", "hopf_lorentz", "product_cylinder"}) {
    const Chart c = catalog_chart(name);
    for (int n = 0; n < 10; ++n) EXPECT_LE(bochner_check(c, "T", rng.point(c)), 1e-10) << name;
  }
  EXPECT_THROW(bochner_check(test::generic_lorentz(), "T", {0.3, 0.4, -0.2}), PreconditionError);
}
