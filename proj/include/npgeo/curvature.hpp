#pragma once

#include <array>

#include "npgeo/chart.hpp"
#include "npgeo/linalg.hpp"

namespace npgeo {

template <class T>
using Tensor3 = std::array<std::array<std::array<T, 3>, 3>, 3>;
template <class T>
using Tensor4 = std::array<Tensor3<T>, 3>;

/// Metric with exact first and second partials at a point.
/// dg[i][j][k] = d_k g_ij, ddg[i][j][k][l] = d_l d_k g_ij.
struct MetricValue {
  Vec3 point{};
  Mat3 g{};
  Tensor3<double> dg{};
  Tensor4<double> ddg{};
  Mat3 ginv{};
};

/// Levi-Civita connection and curvature at a point.
///
/// Riemann convention: R(u,v,w,z) = u^a v^b w^c z^d riemann[a][b][c][d]
///                                = < nabla_u nabla_v w - nabla_v nabla_u w - nabla_[u,v] w , z >.
/// gamma[k][i][j] = Gamma^k_ij; ricci[b][c] = g^{ad} R_abcd.
struct CurvatureValue {
  MetricValue metric;
  Tensor3<double> gamma{};
  Tensor4<double> riemann{};
  Mat3 ricci{};
  double scalar = 0.0;
};

inline MetricValue metric_at(const Chart& chart, const Vec3& p) {
  require_in_domain(chart, p);
  const auto jets = metric_jets(chart, p);
  MetricValue m;
  m.point = p;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const Jet2& c = jets[i][j];
      m.g[i][j] = c.value();
      for (int k = 0; k < 3; ++k) {
        m.dg[i][j][k] = c.grad(k);
        for (int l = 0; l < 3; ++l) m.ddg[i][j][k][l] = c.hess(k, l);
      }
    }
  m.ginv = inverse(m.g);
  return m;
}

/// Christoffel symbols Gamma^k_ij from (g, dg).
inline Tensor3<double> christoffel(const MetricValue& m) {
  Tensor3<double> gam{};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int l = 0; l < 3; ++l) s += m.ginv[k][l] * (m.dg[l][j][i] + m.dg[l][i][j] - m.dg[i][j][l]);
        gam[k][i][j] = 0.5 * s;
      }
  return gam;
}

inline CurvatureValue curvature_from_metric(const MetricValue& m) {
  CurvatureValue c;
  c.metric = m;
  c.gamma = christoffel(m);

  // d_m g^{kl} = -g^{ka} d_m g_ab g^{bl}
  Tensor3<double> dginv{};
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l)
      for (int q = 0; q < 3; ++q) {
        double s = 0.0;
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) s -= m.ginv[k][a] * m.dg[a][b][q] * m.ginv[b][l];
        dginv[k][l][q] = s;
      }
  // dgamma[k][i][j][q] = d_q Gamma^k_ij
  Tensor4<double> dgamma{};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int q = 0; q < 3; ++q) {
          double s = 0.0;
          for (int l = 0; l < 3; ++l)
            s += dginv[k][l][q] * (m.dg[l][j][i] + m.dg[l][i][j] - m.dg[i][j][l]) +
                 m.ginv[k][l] * (m.ddg[l][j][i][q] + m.ddg[l][i][j][q] - m.ddg[i][j][l][q]);
          dgamma[k][i][j][q] = 0.5 * s;
        }

  // R(d_c, d_d) d_b = Rup[a][b][c][d] d_a
  auto rup = [&](int a, int b, int cc, int d) {
    double s = dgamma[a][d][b][cc] - dgamma[a][cc][b][d];
    for (int e = 0; e < 3; ++e) s += c.gamma[a][cc][e] * c.gamma[e][d][b] - c.gamma[a][d][e] * c.gamma[e][cc][b];
    return s;
  };
  Tensor4<double> up{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int cc = 0; cc < 3; ++cc)
        for (int d = 0; d < 3; ++d) up[a][b][cc][d] = rup(a, b, cc, d);
  // R(e_a, e_b, e_c, e_d) = < R(e_a, e_b) e_c, e_d > = g_de Rup[e][c][a][b]
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int cc = 0; cc < 3; ++cc)
        for (int d = 0; d < 3; ++d) {
          double s = 0.0;
          for (int e = 0; e < 3; ++e) s += m.g[d][e] * up[e][cc][a][b];
          c.riemann[a][b][cc][d] = s;
        }
  for (int b = 0; b < 3; ++b)
    for (int cc = 0; cc < 3; ++cc) {
      double s = 0.0;
      for (int a = 0; a < 3; ++a)
        for (int d = 0; d < 3; ++d) s += m.ginv[a][d] * c.riemann[a][b][cc][d];
      c.ricci[b][cc] = s;
    }
  // symmetrize away roundoff
  for (int b = 0; b < 3; ++b)
    for (int cc = b + 1; cc < 3; ++cc) c.ricci[b][cc] = c.ricci[cc][b] = 0.5 * (c.ricci[b][cc] + c.ricci[cc][b]);
  c.scalar = 0.0;
  for (int b = 0; b < 3; ++b)
    for (int cc = 0; cc < 3; ++cc) c.scalar += m.ginv[b][cc] * c.ricci[b][cc];
  return c;
}

inline CurvatureValue curvature_at(const Chart& chart, const Vec3& p) {
  return curvature_from_metric(metric_at(chart, p));
}

/// R(u, v, w, z) for real or complex coordinate vectors.
template <class V>
auto riemann(const CurvatureValue& c, const V& u, const V& v, const V& w, const V& z) {
  using S = std::decay_t<decltype(u[0])>;
  S s{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const S uv = u[a] * v[b];
      if (uv == S{}) continue;
      for (int cc = 0; cc < 3; ++cc)
        for (int d = 0; d < 3; ++d) s += uv * w[cc] * z[d] * c.riemann[a][b][cc][d];
    }
  return s;
}

template <class V>
auto ricci(const CurvatureValue& c, const V& u, const V& v) {
  using S = std::decay_t<decltype(u[0])>;
  S s{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) s += u[a] * v[b] * c.ricci[a][b];
  return s;
}

/// nabla_u V at a point, with V's coordinate partials dv[k][i] = d_i V^k.
inline Vec3 covariant_derivative(const Tensor3<double>& gamma, const Vec3& u, const Vec3& v, const Mat3& dv) {
  Vec3 r{};
  for (int k = 0; k < 3; ++k) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i) {
      s += u[i] * dv[k][i];
      for (int j = 0; j < 3; ++j) s += gamma[k][i][j] * u[i] * v[j];
    }
    r[k] = s;
  }
  return r;
}

}  // namespace npgeo
