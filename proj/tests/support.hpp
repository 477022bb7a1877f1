#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "npgeo/chart.hpp"
#include "npgeo/curvature.hpp"
#include "npgeo/linalg.hpp"

namespace npgeo::test {

inline constexpr const char* kGenericLorentz = R"(name generic_lorentz
coord t = -1 .. 1
coord x = -1 .. 1
coord y = -1 .. 1
g 0 0 = -(1 + 0.3*x^2 + 0.2*sin(y)*t)
g 0 1 = 0.2*y
g 0 2 = 0.1*x*t
g 1 1 = 1 + 0.2*t^2
g 1 2 = 0.1*sin(x*y)
g 2 2 = exp(0.3*x)
field T = 1/sqrt(1 + 0.3*x^2 + 0.2*sin(y)*t), 0, 0
)";

inline constexpr const char* kGenericRiemannian = R"(name generic_riemannian
coord t = -1 .. 1
coord x = -1 .. 1
coord y = -1 .. 1
g 0 0 = 1 + 0.3*x^2 + 0.2*sin(y)*t
g 0 1 = 0.2*y
g 0 2 = 0.1*x*t
g 1 1 = 1 + 0.2*t^2
g 1 2 = 0.1*sin(x*y)
g 2 2 = exp(0.3*x)
field T = 1/sqrt(1 + 0.3*x^2 + 0.2*sin(y)*t), 0, 0
)";

inline Chart chart_from_text(const char* text) {
  std::istringstream in(text);
  return parse_chart_config(in);
}

inline Chart generic_lorentz() { return chart_from_text(kGenericLorentz); }
inline Chart generic_riemannian() { return chart_from_text(kGenericRiemannian); }

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(unsigned long long seed) : gen(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  double angle() { return uniform(0.0, 2.0 * std::numbers::pi); }
  /// Point in the box shrunk by `margin` of each extent.
  Vec3 point(const Chart& c, double margin = 0.02) {
    Vec3 p{};
    for (int i = 0; i < 3; ++i) {
      const double w = c.domain[i].width();
      p[i] = uniform(c.domain[i].lo + margin * w, c.domain[i].hi - margin * w);
    }
    return p;
  }
};

inline Vec3 shift(const Vec3& p, int axis, double h) {
  Vec3 q = p;
  q[axis] += h;
  return q;
}

/// Christoffel symbols from central differences of plain metric values.
// Five-point central stencil weights.
inline double five_point(double fp2, double fp1, double fm1, double fm2, double h) {
  return (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h);
}

inline Tensor3<double> fd_christoffel(const Chart& c, const Vec3& p, double h = 1e-3) {
  const Mat3 g = metric_values(c, p);
  const Mat3 gi = inverse(g);
  Tensor3<double> dg{};  // dg[k][i][j] = d_k g_ij
  for (int k = 0; k < 3; ++k) {
    const Mat3 a = metric_values(c, shift(p, k, 2 * h)), b = metric_values(c, shift(p, k, h)),
               d = metric_values(c, shift(p, k, -h)), e = metric_values(c, shift(p, k, -2 * h));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) dg[k][i][j] = five_point(a[i][j], b[i][j], d[i][j], e[i][j], h);
  }
  Tensor3<double> gam{};
  for (int m = 0; m < 3; ++m)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int l = 0; l < 3; ++l) s += gi[m][l] * (dg[i][l][j] + dg[j][l][i] - dg[l][i][j]);
        gam[m][i][j] = 0.5 * s;
      }
  return gam;
}

/// R(d_a, d_b, d_c, d_d) = < nabla_a nabla_b d_c - nabla_b nabla_a d_c, d_d >,
/// expanded for coordinate fields and differenced twice.
inline Tensor4<double> fd_riemann(const Chart& c, const Vec3& p, double h = 5e-3) {
  const Tensor3<double> G = fd_christoffel(c, p);
  Tensor4<double> dG{};  // dG[a][m][b][c] = d_a Gamma^m_bc
  for (int a = 0; a < 3; ++a) {
    const auto A = fd_christoffel(c, shift(p, a, 2 * h)), B = fd_christoffel(c, shift(p, a, h)),
               D = fd_christoffel(c, shift(p, a, -h)), E = fd_christoffel(c, shift(p, a, -2 * h));
    for (int m = 0; m < 3; ++m)
      for (int b = 0; b < 3; ++b)
        for (int cc = 0; cc < 3; ++cc)
          dG[a][m][b][cc] = five_point(A[m][b][cc], B[m][b][cc], D[m][b][cc], E[m][b][cc], h);
  }
  const Mat3 g = metric_values(c, p);
  Tensor4<double> R{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int cc = 0; cc < 3; ++cc) {
        Vec3 v{};
        for (int m = 0; m < 3; ++m) {
          double s = dG[a][m][b][cc] - dG[b][m][a][cc];
          for (int k = 0; k < 3; ++k) s += G[k][b][cc] * G[m][a][k] - G[k][a][cc] * G[m][b][k];
          v[m] = s;
        }
        for (int d = 0; d < 3; ++d) {
          double s = 0.0;
          for (int m = 0; m < 3; ++m) s += g[d][m] * v[m];
          R[a][b][cc][d] = s;
        }
      }
  return R;
}

/// div V = d_i(sqrt|det g| V^i) / sqrt|det g| by central differences of a
/// vector field given as a callable point -> Vec3.
template <class F>
double fd_divergence(const Chart& c, F&& v, const Vec3& p, double h = 1e-5) {
  auto vol = [&](const Vec3& q) { return std::sqrt(std::fabs(det(metric_values(c, q)))); };
  double s = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Vec3 qp = shift(p, i, h), qm = shift(p, i, -h);
    s += (vol(qp) * v(qp)[i] - vol(qm) * v(qm)[i]) / (2 * h);
  }
  return s / vol(p);
}

inline double max_abs(const Mat3& a) {
  double m = 0.0;
  for (const auto& r : a)
    for (double x : r) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace npgeo::test
