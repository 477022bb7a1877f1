#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "npgeo/chart.hpp"
#include "npgeo/curvature.hpp"
#include "npgeo/errors.hpp"
#include "npgeo/frames.hpp"

namespace npgeo {

struct ResidualEntry {
  std::string name;
  Complex lhs;
  Complex rhs;
  double residual = 0.0;  ///< |lhs - rhs|, or relative when requested
  double fd_error = 0.0;  ///< Richardson error estimate of the FD terms (0 when none)
  double tol = 0.0;
  bool pass = false;
};

struct ResidualReport {
  Vec3 point{};
  double angle = 0.0;
  Signature signature = Signature::Lorentzian;
  std::vector<ResidualEntry> residuals;

  bool all_pass() const {
    return std::all_of(residuals.begin(), residuals.end(), [](const ResidualEntry& e) { return e.pass; });
  }
  const ResidualEntry& at(const std::string& name) const {
    for (const auto& e : residuals)
      if (e.name == name) return e;
    throw Error("no residual named '" + name + "'");
  }
};

struct NpOptions {
  double tol = 1e-5;
  double fd_step = 0.0;  ///< <= 0 selects 1e-3 of the smallest domain extent
  bool relative = false;
  /// Test hook: when != 1, the Ricci/Riemann terms are taken from a copy of
  /// the chart with g_00 scaled by this factor, while frames and spin
  /// coefficients use the true metric.
  double fault_g00_scale = 1.0;
  /// S4a as printed leaves -2 sigma conj(kappa) + 2 kappa conj(rho) out of the
  /// Lorentzian right-hand side; invisible whenever kappa = 0. When set, the
  /// derived form sigma(-s conj(kappa) - conj(beta)) - s kappa (eps - conj(rho)) is used.
  bool derived_s4a = false;

  double step_for(const Chart& c) const { return fd_step > 0 ? fd_step : 1e-3 * c.min_extent(); }
};

template <class V>
struct Derivative {
  V value{};
  double error = 0.0;
};

namespace detail {

template <class V>
struct FieldOps;

template <>
struct FieldOps<Complex> {
  static Complex lin(const Complex& a, double ca, const Complex& b, double cb) { return ca * a + cb * b; }
  static double norm(const Complex& a) { return std::abs(a); }
};

template <std::size_t N>
struct FieldOps<std::array<Complex, N>> {
  using V = std::array<Complex, N>;
  static V lin(const V& a, double ca, const V& b, double cb) {
    V r;
    for (std::size_t i = 0; i < N; ++i) r[i] = ca * a[i] + cb * b[i];
    return r;
  }
  static double norm(const V& a) {
    double m = 0.0;
    for (const auto& x : a) m = std::max(m, std::abs(x));
    return m;
  }
};

}  // namespace detail

/// Central differences at steps h and h/2 combined by Richardson
/// extrapolation. `h` is the coordinate displacement of the outer stencil
/// point; the returned error is |extrapolated - fine|.
template <class F>
auto directional_derivative(const Chart& chart, F&& field, const Vec3& p, const Vec3& dir, double h) {
  using V = std::decay_t<decltype(field(p))>;
  using Ops = detail::FieldOps<V>;
  const double len = std::max({std::fabs(dir[0]), std::fabs(dir[1]), std::fabs(dir[2])});
  if (len == 0.0) return Derivative<V>{Ops::lin(field(p), 0.0, field(p), 0.0), 0.0};
  const double s = h / len;
  auto at = [&](double t) {
    const Vec3 q{p[0] + t * dir[0], p[1] + t * dir[1], p[2] + t * dir[2]};
    if (!chart.contains(q)) throw DomainError("finite-difference stencil exits the domain");
    return field(q);
  };
  const V fp = at(s), fm = at(-s), fp2 = at(0.5 * s), fm2 = at(-0.5 * s);
  const V coarse = Ops::lin(fp, 0.5 / s, fm, -0.5 / s);
  const V fine = Ops::lin(fp2, 1.0 / s, fm2, -1.0 / s);
  const V rich = Ops::lin(fine, 4.0 / 3.0, coarse, -1.0 / 3.0);
  return Derivative<V>{rich, Ops::norm(Ops::lin(rich, 1.0, fine, -1.0))};
}

/// Frame components < v, e_c > of a complex vector given in frame components.
inline CVec3 lower(const FrameData& f, const CVec3& v) { return {f.eta(0) * v[0], v[1], v[2]}; }

namespace detail {

inline CVec3 combo(std::initializer_list<std::pair<Complex, CVec3>> terms) {
  CVec3 r{};
  for (const auto& [c, v] : terms)
    for (int k = 0; k < 3; ++k) r[k] += c * v[k];
  return r;
}

inline ResidualEntry make_entry(const std::string& name, Complex lhs, Complex rhs, double fd_error,
                                const NpOptions& opt) {
  ResidualEntry e{name, lhs, rhs, std::abs(lhs - rhs), fd_error, opt.tol, false};
  if (opt.relative) e.residual /= 1.0 + std::max(std::abs(lhs), std::abs(rhs));
  e.pass = std::isfinite(e.residual) && e.residual <= opt.tol;
  return e;
}

inline ResidualEntry vector_entry(const std::string& name, const CVec3& lhs_lower, const CVec3& rhs_lower,
                                  const NpOptions& opt) {
  double worst = 0.0;
  int at = 0;
  for (int c = 0; c < 3; ++c) {
    const double d = std::abs(lhs_lower[c] - rhs_lower[c]);
    if (d > worst || std::isnan(d)) {
      worst = d;
      at = c;
    }
  }
  return make_entry(name, lhs_lower[at], rhs_lower[at], 0.0, opt);
}

/// +1 for the metric signature as printed (Lorentzian); -1 flips every
/// sign that differs from the Riemannian formalism.
template <Signature S>
constexpr double red = S == Signature::Lorentzian ? 1.0 : -1.0;

}  // namespace detail

/// Covariant-derivative table, Lie-bracket table and Ricci relations in the
/// complex frame {T, m, mbar}. Pointwise; no finite differences.
template <Signature S>
std::vector<ResidualEntry> structure_entries(const FrameData& f, const SpinCoefficients& sc, const NpOptions& opt) {
  using namespace frame_vec;
  using detail::combo;
  constexpr double s = detail::red<S>;
  const Complex k = sc.kappa, r = sc.rho, sg = sc.sigma, e = sc.epsilon, b = sc.beta;
  auto cov = [&](const CVec3& u, const CVec3& v) {
    CVec3 out;
    for (int c = 0; c < 3; ++c) {
      CVec3 ec{};
      ec[c] = 1.0;
      out[c] = connection(f, u, v, ec);
    }
    return out;
  };
  auto lie = [&](const CVec3& u, const CVec3& v) {
    CVec3 out;
    for (int c = 0; c < 3; ++c) {
      CVec3 ec{};
      ec[c] = 1.0;
      out[c] = bracket(f, u, v, ec);
    }
    return out;
  };
  std::vector<ResidualEntry> out;
  out.push_back(detail::vector_entry("cov_T_T", cov(T, T), lower(f, combo({{-std::conj(k), m}, {-k, mbar}})), opt));
  out.push_back(detail::vector_entry("cov_m_T", cov(m, T), lower(f, combo({{-std::conj(r), m}, {-sg, mbar}})), opt));
  out.push_back(detail::vector_entry("cov_T_m", cov(T, m), lower(f, combo({{-s * k, T}, {e, m}})), opt));
  out.push_back(detail::vector_entry("cov_m_m", cov(m, m), lower(f, combo({{-s * sg, T}, {b, m}})), opt));
  out.push_back(detail::vector_entry("cov_m_mbar", cov(m, mbar), lower(f, combo({{-s * std::conj(r), T}, {-b, mbar}})), opt));
  out.push_back(detail::vector_entry("lie_T_m", lie(T, m),
                                     lower(f, combo({{-s * k, T}, {e + std::conj(r), m}, {sg, mbar}})), opt));
  out.push_back(detail::vector_entry("lie_m_mbar", lie(m, mbar),
                                     lower(f, combo({{-s * (std::conj(r) - r), T}, {std::conj(b), m}, {-b, mbar}})), opt));

  const Complex ric_mm = frame_ricci(f, m, m), ric_tt = frame_ricci(f, T, T), ric_tm = frame_ricci(f, T, m),
                ric_mmb = frame_ricci(f, m, mbar);
  out.push_back(detail::make_entry("ric_mm", ric_mm, s * frame_riemann(f, T, m, T, m), 0.0, opt));
  out.push_back(detail::make_entry("ric_TT", ric_tt, -2.0 * frame_riemann(f, T, m, T, mbar), 0.0, opt));
  out.push_back(detail::make_entry("ric_Tm", ric_tm, -frame_riemann(f, T, m, m, mbar), 0.0, opt));
  out.push_back(detail::make_entry("ric_mmbar", ric_mmb, -s * 0.5 * ric_tt - frame_riemann(f, mbar, m, m, mbar), 0.0, opt));
  return out;
}

/// Scalar fields whose derivatives enter the structure equations.
enum NpField { kKappa, kRho, kSigma, kEpsilon, kBeta, kRicTT, kRicTm, kRicmm, kRicmmb, kNpFieldCount };
using NpFieldValues = std::array<Complex, kNpFieldCount>;

namespace detail {

inline NpFieldValues np_fields(const FrameData& f, const Mat3& ricci_frame) {
  using namespace frame_vec;
  const SpinCoefficients sc = spin_coefficients(f);
  FrameData rf = f;
  rf.ric = ricci_frame;
  return {sc.kappa, sc.rho, sc.sigma, sc.epsilon, sc.beta, frame_ricci(rf, T, T), frame_ricci(rf, T, m),
          frame_ricci(rf, m, m), frame_ricci(rf, m, mbar)};
}

inline Mat3 ricci_in_frame(const CurvatureValue& c, const Triad& tri) {
  Mat3 r{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) r[a][b] = ricci(c, tri.vec(a), tri.vec(b));
  return r;
}

inline Chart scale_g00(const Chart& chart, double factor) {
  Chart c = chart;
  c.metric[0][0] = Expression::number(factor) * chart.metric[0][0];
  return c;
}

}  // namespace detail

/// Every structure identity at `p`: the pointwise tables plus S1-S4b and both
/// differential Bianchi identities, whose derivative terms come from
/// Richardson-extrapolated central differences of the frame field
/// q -> complete_frame(chart, q, field, angle) with the seeding frozen at p.
template <Signature S>
ResidualReport np_residuals(const Chart& chart, const std::string& field, const Vec3& p, double angle,
                            const NpOptions& opt = {}) {
  using std::conj;
  constexpr double s = detail::red<S>;
  const double h = opt.step_for(chart);

  const FrameData f0 = frame_data(chart, p, field, angle);
  const FrameRecipe recipe = f0.triad.recipe;
  std::optional<Chart> faulty;
  if (opt.fault_g00_scale != 1.0) faulty = detail::scale_g00(chart, opt.fault_g00_scale);

  auto fields_at = [&](const Vec3& q) {
    const FrameData fq = frame_data(chart, q, field, angle, recipe);
    const Mat3 ric = faulty ? detail::ricci_in_frame(curvature_at(*faulty, q), fq.triad) : fq.ric;
    return detail::np_fields(fq, ric);
  };

  const NpFieldValues v = fields_at(p);
  const auto dT = directional_derivative(chart, fields_at, p, f0.triad.t, h);
  const auto dX = directional_derivative(chart, fields_at, p, f0.triad.x, h);
  const auto dY = directional_derivative(chart, fields_at, p, f0.triad.y, h);
  const double fd_err = std::max({dT.error, dX.error, dY.error});

  const double r2 = std::numbers::sqrt2 / 2;
  const Complex I(0.0, 1.0);
  auto Td = [&](int q) { return dT.value[q]; };
  auto md = [&](int q) { return r2 * (dX.value[q] - I * dY.value[q]); };
  auto mbd = [&](int q) { return r2 * (dX.value[q] + I * dY.value[q]); };

  const Complex k = v[kKappa], r = v[kRho], sg = v[kSigma], e = v[kEpsilon], b = v[kBeta];
  const Complex ricTT = v[kRicTT], ricTm = v[kRicTm], ricmm = v[kRicmm], ricmmb = v[kRicmmb];
  const Complex ricTmb = conj(ricTm), ricmbmb = conj(ricmm);
  const double abs_k2 = std::norm(k), abs_s2 = std::norm(sg), abs_r2 = std::norm(r), abs_b2 = std::norm(b);

  ResidualReport rep;
  rep.point = p;
  rep.angle = angle;
  rep.signature = S;

  // S1
  rep.residuals.push_back(detail::make_entry(
      "S1", Td(kRho) - mbd(kKappa), -s * abs_k2 + abs_s2 + r * r + k * conj(b) + 0.5 * ricTT, fd_err, opt));
  // S2
  rep.residuals.push_back(detail::make_entry(
      "S2", Td(kSigma) - md(kKappa), -s * k * k + 2.0 * sg * e + sg * (r + conj(r)) - k * b - s * ricmm, fd_err, opt));
  // S3
  rep.residuals.push_back(detail::make_entry(
      "S3", md(kRho) - mbd(kSigma), 2.0 * sg * conj(b) - s * (conj(r) - r) * k + ricTm, fd_err, opt));
  // S4a
  const Complex s4a_rhs = opt.derived_s4a
                              ? sg * (-s * conj(k) - conj(b)) - s * k * (e - conj(r)) + b * (e + conj(r)) - ricTm
                              : sg * (conj(k) - conj(b)) + k * (-s * e - conj(r)) + b * (e + conj(r)) - ricTm;
  rep.residuals.push_back(detail::make_entry("S4a", Td(kBeta) - md(kEpsilon), s4a_rhs, fd_err, opt));
  // S4b: m(conj beta) = conj(mbar(beta))
  rep.residuals.push_back(detail::make_entry(
      "S4b", conj(mbd(kBeta)) + mbd(kBeta),
      -s * abs_s2 + s * abs_r2 - 2.0 * abs_b2 - s * (r - conj(r)) * e - ricmmb - s * 0.5 * ricTT, fd_err, opt));
  // first differential Bianchi identity
  rep.residuals.push_back(detail::make_entry(
      "bid", Td(kRicTm) - 0.5 * md(kRicTT) - s * mbd(kRicmm),
      -k * (s * ricTT + ricmmb) + (e + 2.0 * r + conj(r)) * ricTm + sg * ricTmb - (conj(k) - s * 2.0 * conj(b)) * ricmm,
      fd_err, opt));
  // second differential Bianchi identity; m(Ric(T,mbar)) = conj(mbar(Ric(T,m)))
  rep.residuals.push_back(detail::make_entry(
      "bid2", conj(mbd(kRicTm)) + mbd(kRicTm) - (Td(kRicmmb) + s * 0.5 * Td(kRicTT)),
      -s * (r + conj(r)) * (ricTT + s * ricmmb) - conj(sg) * ricmm - sg * ricmbmb -
          (-s * 2.0 * conj(k) + conj(b)) * ricTm - (-s * 2.0 * k + b) * ricTmb,
      fd_err, opt));

  for (auto& entry : structure_entries<S>(f0, spin_coefficients(f0), opt)) rep.residuals.push_back(std::move(entry));
  return rep;
}

inline ResidualReport np_residuals(const Chart& chart, const std::string& field, const Vec3& p, double angle,
                                   const NpOptions& opt = {}) {
  return chart.signature == Signature::Lorentzian ? np_residuals<Signature::Lorentzian>(chart, field, p, angle, opt)
                                                  : np_residuals<Signature::Riemannian>(chart, field, p, angle, opt);
}

/// Only the pointwise tables (covariant derivatives, Lie brackets, Ricci relations).
inline ResidualReport structure_residuals(const Chart& chart, const std::string& field, const Vec3& p, double angle,
                                          const NpOptions& opt = {}) {
  const FrameData f = frame_data(chart, p, field, angle);
  ResidualReport rep;
  rep.point = p;
  rep.angle = angle;
  rep.signature = chart.signature;
  rep.residuals = chart.signature == Signature::Lorentzian
                      ? structure_entries<Signature::Lorentzian>(f, spin_coefficients(f), opt)
                      : structure_entries<Signature::Riemannian>(f, spin_coefficients(f), opt);
  return rep;
}

/// g-orthonormal frame (rows) from the eigenvectors of g, each scaled by
/// 1/sqrt|eigenvalue|. Coordinate vectors may be null, so no Gram-Schmidt.
inline std::array<Vec3, 3> orthonormal_frame(const Mat3& g) {
  const SymmetricEigen e = symmetric_eigen(g);
  std::array<Vec3, 3> f{};
  for (int a = 0; a < 3; ++a) {
    if (std::fabs(e.values[a]) < 1e-12) throw DomainError("degenerate metric");
    const double scale = 1.0 / std::sqrt(std::fabs(e.values[a]));
    for (int k = 0; k < 3; ++k) f[a][k] = scale * e.vectors[a][k];
  }
  return f;
}

/// max over orthonormal frame pairs of |(L_V g)(e_a, e_b)| = |nabla_a V_b + nabla_b V_a|.
inline double killing_residual(const Chart& chart, const std::string& field, const Vec3& p) {
  const CurvatureValue c = curvature_at(chart, p);
  const auto vj = field_jets(chart, field, p);
  Vec3 v{};
  Mat3 dv{};
  for (int k = 0; k < 3; ++k) {
    v[k] = vj[k].value();
    for (int i = 0; i < 3; ++i) dv[k][i] = vj[k].grad(i);
  }
  // nabla_i V^k
  Mat3 nab{};
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) {
      double s = dv[k][i];
      for (int j = 0; j < 3; ++j) s += c.gamma[k][i][j] * v[j];
      nab[i][k] = s;
    }
  const Mat3& g = c.metric.g;
  Mat3 lg{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) lg[i][j] += g[j][k] * nab[i][k] + g[i][k] * nab[j][k];
  const auto frame = orthonormal_frame(g);
  double worst = 0.0;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += frame[a][i] * frame[b][j] * lg[i][j];
      worst = std::max(worst, std::fabs(s));
    }
  return worst;
}

/// |Ric(T,T) - omega^2/2| for a unit Killing T.
inline double bochner_check(const Chart& chart, const std::string& field, const Vec3& p, double killing_tol = 1e-8) {
  const double kr = killing_residual(chart, field, p);
  if (kr > killing_tol)
    throw PreconditionError("field '" + field + "' is not Killing (residual " + std::to_string(kr) + ")");
  const FrameData f = frame_data(chart, p, field, 0.0);
  const KinematicScalars k = kinematics(d_matrix(f));
  return std::fabs(f.ric[0][0] - 0.5 * k.omega2());
}

}  // namespace npgeo
