#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include "npgeo/chart.hpp"
#include "npgeo/curvature.hpp"
#include "npgeo/errors.hpp"
#include "npgeo/jet.hpp"
#include "npgeo/linalg.hpp"

namespace npgeo {

/// Which coordinate basis vectors seed X0 and Y0. Resolved once at a point
/// and reused at neighbouring points so the frame field stays smooth.
struct FrameRecipe {
  int first = 0;
  int second = 1;
};

/// Orthonormal frame {T, X, Y} at a point; d*[k][i] = d_i (component k).
struct Triad {
  Vec3 point{};
  Vec3 t{}, x{}, y{};
  Mat3 dt{}, dx{}, dy{};
  double t_norm = -1.0;  ///< g(T,T): -1 Lorentzian, +1 Riemannian
  FrameRecipe recipe;
  double angle = 0.0;

  const Vec3& vec(int a) const { return a == 0 ? t : (a == 1 ? x : y); }
  const Mat3& dvec(int a) const { return a == 0 ? dt : (a == 1 ? dx : dy); }
};

struct KinematicScalars {
  double div = 0.0;
  double omega = 0.0;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double detD = 0.0;

  double omega2() const { return omega * omega; }
  double shear2() const { return sigma1 * sigma1 + sigma2 * sigma2; }
};

struct SpinCoefficients {
  Complex kappa, rho, sigma, epsilon, beta;
};

using Mat2 = std::array<std::array<double, 2>, 2>;

namespace detail {

using JetVec = std::array<Jet2, 3>;
using JetMat = std::array<std::array<Jet2, 3>, 3>;

inline Jet2 jinner(const JetMat& g, const JetVec& u, const JetVec& v) {
  Jet2 s(0.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += g[i][j] * u[i] * v[j];
  return s;
}

inline JetVec axpy(const JetVec& v, const Jet2& a, const JetVec& w) {
  return {v[0] + a * w[0], v[1] + a * w[1], v[2] + a * w[2]};
}

inline JetVec basis(int i) {
  JetVec e{Jet2(0.0), Jet2(0.0), Jet2(0.0)};
  e[i] = Jet2(1.0);
  return e;
}

inline void unpack(const JetVec& v, Vec3& val, Mat3& d) {
  for (int k = 0; k < 3; ++k) {
    val[k] = v[k].value();
    for (int i = 0; i < 3; ++i) d[k][i] = v[k].grad(i);
  }
}

}  // namespace detail

/// Picks the seeding basis vectors at a point: X0 from the basis vector with
/// the largest T-orthogonal g-norm, Y0 from the better conditioned of the two
/// remaining ones.
inline FrameRecipe choose_recipe(const Mat3& g, const Vec3& t) {
  const double tt = inner(g, t, t);
  Vec3 perp_norm{};
  for (int i = 0; i < 3; ++i) {
    const double gi_t = g[i][0] * t[0] + g[i][1] * t[1] + g[i][2] * t[2];
    perp_norm[i] = g[i][i] - gi_t * gi_t / tt;
  }
  int first = 0;
  for (int i = 1; i < 3; ++i)
    if (perp_norm[i] > perp_norm[first]) first = i;
  if (!(perp_norm[first] > 1e-10)) throw DomainError("degenerate frame projection: every basis vector parallel to T");
  // X0 direction, value only
  Vec3 x0{};
  for (int k = 0; k < 3; ++k) x0[k] = (k == first ? 1.0 : 0.0);
  {
    const double gi_t = g[first][0] * t[0] + g[first][1] * t[1] + g[first][2] * t[2];
    for (int k = 0; k < 3; ++k) x0[k] -= gi_t / tt * t[k];
    const double n = std::sqrt(inner(g, x0, x0));
    for (double& c : x0) c /= n;
  }
  int best = -1;
  double best_norm = 0.0;
  for (int step = 1; step <= 2; ++step) {
    const int j = (first + step) % 3;
    Vec3 w{};
    w[j] = 1.0;
    const double wt = inner(g, w, t), wx = inner(g, w, x0);
    for (int k = 0; k < 3; ++k) w[k] -= wt / tt * t[k] + wx * x0[k];
    const double n = inner(g, w, w);
    if (n > best_norm + 1e-12) {
      best = j;
      best_norm = n;
    }
  }
  if (best < 0 || !(best_norm > 1e-10)) throw DomainError("degenerate frame projection for Y0");
  return {first, best};
}

/// Completes the unit field T to an orthonormal triad at `p`, rotating the
/// Gram-Schmidt pair (X0, Y0) by `angle`. Frame partials come from running
/// the same construction on jets.
inline Triad complete_frame(const Chart& chart, const Vec3& p, const std::string& field, double angle,
                            std::optional<FrameRecipe> recipe = std::nullopt) {
  require_in_domain(chart, p);
  const detail::JetMat g = metric_jets(chart, p);
  const detail::JetVec t = field_jets(chart, field, p);
  const Jet2 tt = detail::jinner(g, t, t);
  const double expected = chart.signature == Signature::Lorentzian ? -1.0 : 1.0;
  if (std::fabs(tt.value() - expected) > 1e-8)
    throw PreconditionError("field '" + field + "' is not unit " +
                            (expected < 0 ? std::string("timelike") : std::string("length")) +
                            " (g(T,T) = " + std::to_string(tt.value()) + ")");

  Mat3 gv{};
  Vec3 tv{};
  for (int i = 0; i < 3; ++i) {
    tv[i] = t[i].value();
    for (int j = 0; j < 3; ++j) gv[i][j] = g[i][j].value();
  }
  const FrameRecipe r = recipe ? *recipe : choose_recipe(gv, tv);

  detail::JetVec x0 = detail::basis(r.first);
  x0 = detail::axpy(x0, -(detail::jinner(g, x0, t) / tt), t);
  const Jet2 nx = detail::jinner(g, x0, x0);
  if (!(nx.value() > 1e-10)) throw DomainError("degenerate frame projection: basis vector parallel to T");
  const Jet2 inv_x = Jet2(1.0) / sqrt(nx);
  for (auto& c : x0) c *= inv_x;

  detail::JetVec y0 = detail::basis(r.second);
  y0 = detail::axpy(y0, -(detail::jinner(g, y0, t) / tt), t);
  y0 = detail::axpy(y0, -detail::jinner(g, y0, x0), x0);
  const Jet2 ny = detail::jinner(g, y0, y0);
  if (!(ny.value() > 1e-10)) throw DomainError("degenerate frame projection for Y0");
  const Jet2 inv_y = Jet2(1.0) / sqrt(ny);
  for (auto& c : y0) c *= inv_y;

  const double ca = std::cos(angle), sa = std::sin(angle);
  detail::JetVec x, y;
  for (int k = 0; k < 3; ++k) {
    x[k] = ca * x0[k] + sa * y0[k];
    y[k] = -sa * x0[k] + ca * y0[k];
  }

  Triad tri;
  tri.point = p;
  tri.t_norm = expected;
  tri.recipe = r;
  tri.angle = angle;
  detail::unpack(t, tri.t, tri.dt);
  detail::unpack(x, tri.x, tri.dx);
  detail::unpack(y, tri.y, tri.dy);
  return tri;
}

/// Everything frame-related at one point: the triad, the curvature, and the
/// frame components of the connection, Lie brackets, Riemann and Ricci.
struct FrameData {
  Triad triad;
  CurvatureValue curv;
  Tensor3<double> conn{};  ///< conn[a][b][c] = < nabla_{e_a} e_b , e_c >
  Tensor3<double> lie{};   ///< lie[a][b][c]  = < [e_a, e_b] , e_c >
  Tensor4<double> riem{};  ///< R(e_a, e_b, e_c, e_d)
  Mat3 ric{};              ///< Ric(e_a, e_b)
  Vec3 divergence{};       ///< div e_a (coordinate divergence)

  double eta(int a) const { return a == 0 ? triad.t_norm : 1.0; }
};

inline Vec3 lie_bracket(const Vec3& u, const Mat3& du, const Vec3& v, const Mat3& dv) {
  Vec3 r{};
  for (int k = 0; k < 3; ++k)
    for (int i = 0; i < 3; ++i) r[k] += u[i] * dv[k][i] - v[i] * du[k][i];
  return r;
}

inline FrameData frame_data(const CurvatureValue& curv, const Triad& tri) {
  FrameData f;
  f.triad = tri;
  f.curv = curv;
  const Mat3& g = curv.metric.g;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Vec3 nab = covariant_derivative(curv.gamma, tri.vec(a), tri.vec(b), tri.dvec(b));
      const Vec3 br = lie_bracket(tri.vec(a), tri.dvec(a), tri.vec(b), tri.dvec(b));
      for (int c = 0; c < 3; ++c) {
        f.conn[a][b][c] = inner(g, nab, tri.vec(c));
        f.lie[a][b][c] = inner(g, br, tri.vec(c));
      }
    }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      f.ric[a][b] = ricci(curv, tri.vec(a), tri.vec(b));
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) f.riem[a][b][c][d] = riemann(curv, tri.vec(a), tri.vec(b), tri.vec(c), tri.vec(d));
    }
  for (int a = 0; a < 3; ++a) {
    double s = 0.0;
    const Vec3& v = tri.vec(a);
    const Mat3& dv = tri.dvec(a);
    for (int i = 0; i < 3; ++i) {
      s += dv[i][i];
      for (int j = 0; j < 3; ++j) s += curv.gamma[i][i][j] * v[j];
    }
    f.divergence[a] = s;
  }
  return f;
}

inline FrameData frame_data(const Chart& chart, const Vec3& p, const std::string& field, double angle,
                            std::optional<FrameRecipe> recipe = std::nullopt) {
  return frame_data(curvature_at(chart, p), complete_frame(chart, p, field, angle, recipe));
}

/// Complex vectors in frame components: T, m = (X - iY)/sqrt2, mbar.
namespace frame_vec {
inline const CVec3 T{Complex(1.0), Complex(0.0), Complex(0.0)};
inline const CVec3 m{Complex(0.0), Complex(std::numbers::sqrt2 / 2), Complex(0.0, -std::numbers::sqrt2 / 2)};
inline const CVec3 mbar{Complex(0.0), Complex(std::numbers::sqrt2 / 2), Complex(0.0, std::numbers::sqrt2 / 2)};
}  // namespace frame_vec

/// < nabla_u v , w > for constant-coefficient complex frame combinations.
inline Complex connection(const FrameData& f, const CVec3& u, const CVec3& v, const CVec3& w) {
  Complex s{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) s += u[a] * v[b] * w[c] * f.conn[a][b][c];
  return s;
}

inline Complex bracket(const FrameData& f, const CVec3& u, const CVec3& v, const CVec3& w) {
  Complex s{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c) s += u[a] * v[b] * w[c] * f.lie[a][b][c];
  return s;
}

inline Complex frame_riemann(const FrameData& f, const CVec3& u, const CVec3& v, const CVec3& w, const CVec3& z) {
  Complex s{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Complex uv = u[a] * v[b];
      if (uv == Complex{}) continue;
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d) s += uv * w[c] * z[d] * f.riem[a][b][c][d];
    }
  return s;
}

inline Complex frame_ricci(const FrameData& f, const CVec3& u, const CVec3& v) {
  Complex s{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) s += u[a] * v[b] * f.ric[a][b];
  return s;
}

/// Matrix of v -> nabla_v T on T-perp in the basis {X, Y}:
/// [[<nabla_X T, X>, <nabla_Y T, X>], [<nabla_X T, Y>, <nabla_Y T, Y>]].
inline Mat2 d_matrix(const FrameData& f) {
  return {{{f.conn[1][0][1], f.conn[2][0][1]}, {f.conn[1][0][2], f.conn[2][0][2]}}};
}

inline Mat2 d_matrix(const Chart& chart, const Triad& tri) {
  return d_matrix(frame_data(curvature_at(chart, tri.point), tri));
}

inline KinematicScalars kinematics(const Mat2& d) {
  KinematicScalars k;
  k.div = d[0][0] + d[1][1];
  k.omega = d[0][1] - d[1][0];
  k.sigma1 = 0.5 * (d[1][1] - d[0][0]);
  k.sigma2 = 0.5 * (d[0][1] + d[1][0]);
  k.detD = d[0][0] * d[1][1] - d[0][1] * d[1][0];
  return k;
}

inline SpinCoefficients spin_coefficients(const FrameData& f) {
  using namespace frame_vec;
  SpinCoefficients s;
  s.kappa = -connection(f, T, T, m);
  s.rho = -connection(f, mbar, T, m);
  s.sigma = -connection(f, m, T, m);
  s.epsilon = connection(f, T, m, mbar);
  s.beta = connection(f, m, m, mbar);
  return s;
}

inline SpinCoefficients spin_coefficients(const Chart& chart, const Triad& tri) {
  return spin_coefficients(frame_data(curvature_at(chart, tri.point), tri));
}

/// D in the frame rotated by `angle`: R^T D R.
inline Mat2 rotate_d(const Mat2& d, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  const Mat2 r{{{c, -s}, {s, c}}};
  Mat2 out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) out[i][j] += r[k][i] * d[k][l] * r[l][j];
  return out;
}

/// Rotation angle in [0, pi) taking the frame to one whose X is the
/// +sqrt(mu/2) eigenvector of a trace-free D with 2|sigma|^2 - omega^2/2 = mu > 0.
/// In that frame sigma1 = -sqrt(mu/2) and sigma2 = omega/2.
inline double shear_eigenframe(const Mat2& d, double mu, double tol = 1e-8) {
  const KinematicScalars k = kinematics(d);
  if (std::fabs(k.div) > tol) throw PreconditionError("shear eigenframe needs trace-free D (div = " + std::to_string(k.div) + ")");
  if (!(mu > 0.0)) throw PreconditionError("shear eigenframe needs mu > 0");
  const double discr = 2.0 * k.shear2() - 0.5 * k.omega2();
  if (std::fabs(discr - mu) > tol * std::max(1.0, std::fabs(mu)))
    throw PreconditionError("2|sigma|^2 - omega^2/2 = " + std::to_string(discr) + " does not match mu = " + std::to_string(mu));
  if (!(discr > 0.0)) throw PreconditionError("D has no distinct real eigenvalues");
  const double s = std::sqrt(0.5 * mu);
  const double r0a = d[0][0] - s, r0b = d[0][1];
  const double r1a = d[1][0], r1b = d[1][1] - s;
  double vx, vy;
  if (r0a * r0a + r0b * r0b >= r1a * r1a + r1b * r1b) {
    vx = -r0b;
    vy = r0a;
  } else {
    vx = -r1b;
    vy = r1a;
  }
  double a = std::atan2(vy, vx);
  if (a < 0) a += std::numbers::pi;
  if (a >= std::numbers::pi) a -= std::numbers::pi;
  return a;
}

}  // namespace npgeo
