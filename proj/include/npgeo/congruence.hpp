#pragma once

#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "npgeo/chart.hpp"
#include "npgeo/errors.hpp"

namespace npgeo {

struct FlowState {
  double t = 0.0;
  double theta = 0.0;   ///< div T
  double omega2 = 0.0;  ///< omega^2
  double s = 0.0;       ///< |sigma|^2
  double f = 0.0;
  double H = 0.0;       ///< det D - mu/2
};

struct Trajectory {
  std::vector<FlowState> samples;
  bool blew_up = false;
  double blowup_time = 0.0;
  /// max |H - (omega^2/4 - s + theta^2/4 - mu/2)| / (1 + sum of the term magnitudes)
  double max_h_drift = 0.0;
};

struct CurveSample {
  double t;
  Vec3 point;
};

struct Curve {
  std::vector<CurveSample> samples;
  bool exited = false;  ///< the next RK4 stage would have left the domain
};

/// RK4 integral curve of the field `v` from p0, stopping early with
/// `exited` set if a stage point leaves the coordinate box.
inline Curve integrate_curve(const Chart& chart, const std::string& v, const Vec3& p0, double t_end, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("integrate_curve needs dt > 0");
  if (!chart.contains(p0)) throw DomainError("integral curve starts outside the domain");
  Curve c;
  c.samples.push_back({0.0, p0});
  Vec3 p = p0;
  double t = 0.0;
  auto axpy = [](const Vec3& a, double h, const Vec3& b) { return Vec3{a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2]}; };
  while (t < t_end - 1e-12 * dt) {
    const double h = std::min(dt, t_end - t);
    std::optional<Vec3> k[4];
    auto eval = [&](const Vec3& q) -> std::optional<Vec3> {
      if (!chart.contains(q)) return std::nullopt;
      return field_values(chart, v, q);
    };
    k[0] = eval(p);
    if (k[0]) k[1] = eval(axpy(p, 0.5 * h, *k[0]));
    if (k[1]) k[2] = eval(axpy(p, 0.5 * h, *k[1]));
    if (k[2]) k[3] = eval(axpy(p, h, *k[2]));
    if (!k[3]) {
      c.exited = true;
      return c;
    }
    Vec3 next{};
    for (int i = 0; i < 3; ++i) next[i] = p[i] + h / 6.0 * ((*k[0])[i] + 2.0 * (*k[1])[i] + 2.0 * (*k[2])[i] + (*k[3])[i]);
    if (!chart.contains(next)) {
      c.exited = true;
      return c;
    }
    p = next;
    t += h;
    c.samples.push_back({t, p});
  }
  return c;
}

struct FlowDerivative {
  FlowState d;             ///< d.t is 1
  double theta_from_H = 0.0;  ///< 2H - theta^2 + 2mu
};

inline FlowDerivative evolution_rhs(const FlowState& x, double mu) {
  FlowDerivative r;
  r.d.t = 1.0;
  r.d.theta = 0.5 * x.omega2 - 2.0 * x.s - 0.5 * x.theta * x.theta + mu;
  r.d.omega2 = -2.0 * x.theta * x.omega2;
  r.d.s = -2.0 * x.theta * x.s;
  r.d.f = -x.theta * (x.f - mu);
  r.d.H = -x.theta * x.H;
  r.theta_from_H = 2.0 * x.H - x.theta * x.theta + 2.0 * mu;
  return r;
}

inline double h_relation(const FlowState& x, double mu) {
  return 0.25 * x.omega2 - x.s + 0.25 * x.theta * x.theta - 0.5 * mu;
}

inline constexpr double kBlowupThreshold = 1e8;

namespace detail {

inline FlowState flow_axpy(const FlowState& a, double h, const FlowState& b) {
  return {a.t + h * b.t, a.theta + h * b.theta, a.omega2 + h * b.omega2, a.s + h * b.s, a.f + h * b.f, a.H + h * b.H};
}

inline FlowState rk4_flow(const FlowState& x, double mu, double h) {
  const FlowState k1 = evolution_rhs(x, mu).d;
  const FlowState k2 = evolution_rhs(flow_axpy(x, 0.5 * h, k1), mu).d;
  const FlowState k3 = evolution_rhs(flow_axpy(x, 0.5 * h, k2), mu).d;
  const FlowState k4 = evolution_rhs(flow_axpy(x, h, k3), mu).d;
  FlowState out = x;
  out.t = x.t + h;
  out.theta += h / 6.0 * (k1.theta + 2 * k2.theta + 2 * k3.theta + k4.theta);
  out.omega2 += h / 6.0 * (k1.omega2 + 2 * k2.omega2 + 2 * k3.omega2 + k4.omega2);
  out.s += h / 6.0 * (k1.s + 2 * k2.s + 2 * k3.s + k4.s);
  out.f += h / 6.0 * (k1.f + 2 * k2.f + 2 * k3.f + k4.f);
  out.H += h / 6.0 * (k1.H + 2 * k2.H + 2 * k3.H + k4.H);
  return out;
}

// Steps shrink once |theta| h > 0.05 so the approach to a Riccati pole is
// resolved; past the threshold the remaining time is ~ 1/|theta|.
inline constexpr double kStiffness = 0.05;

}  // namespace detail

inline Trajectory integrate_evolution(const FlowState& x0, double mu, double t_end, double dt) {
  if (!(dt > 0.0)) throw PreconditionError("integrate_evolution needs dt > 0");
  Trajectory tr;
  FlowState x = x0;
  tr.samples.push_back(x);
  auto drift = [&](const FlowState& s) {
    const double scale = 1.0 + std::fabs(s.H) + 0.25 * std::fabs(s.omega2) + std::fabs(s.s) + 0.25 * s.theta * s.theta +
                         0.5 * std::fabs(mu);
    return std::fabs(s.H - h_relation(s, mu)) / scale;
  };
  tr.max_h_drift = drift(x);
  const double t_stop = x0.t + t_end;
  while (x.t < t_stop - 1e-12 * dt) {
    double h = std::min(dt, t_stop - x.t);
    while (std::fabs(x.theta) * h > detail::kStiffness && h > 1e-300) h *= 0.5;
    x = detail::rk4_flow(x, mu, h);
    if (!std::isfinite(x.theta) || std::fabs(x.theta) > kBlowupThreshold) {
      tr.blew_up = true;
      const FlowState& last = tr.samples.back();
      tr.blowup_time = last.t + 1.0 / std::fabs(last.theta);
      return tr;
    }
    tr.samples.push_back(x);
    tr.max_h_drift = std::max(tr.max_h_drift, drift(x));
  }
  return tr;
}

inline void write_csv(std::ostream& os, const Trajectory& tr) {
  os << "t,theta,omega2,s,f,H\n";
  os.precision(17);
  for (const auto& x : tr.samples) os << x.t << ',' << x.theta << ',' << x.omega2 << ',' << x.s << ',' << x.f << ',' << x.H << '\n';
}

enum class ClosedFormKind {
  ThetaTanh,
  ThetaConst,
  FExp,
  FSech,
  HExp,
  ThetaRational,
  HQuadratic,
  FRational,
  HTrig,
  FTrig,
};

inline const char* to_string(ClosedFormKind k) {
  switch (k) {
    case ClosedFormKind::ThetaTanh: return "theta_tanh";
    case ClosedFormKind::ThetaConst: return "theta_const";
    case ClosedFormKind::FExp: return "f_exp";
    case ClosedFormKind::FSech: return "f_sech";
    case ClosedFormKind::HExp: return "H_exp";
    case ClosedFormKind::ThetaRational: return "theta_rational";
    case ClosedFormKind::HQuadratic: return "H_quadratic";
    case ClosedFormKind::FRational: return "f_rational";
    case ClosedFormKind::HTrig: return "H_trig";
    case ClosedFormKind::FTrig: return "f_trig";
  }
  return "?";
}

inline const std::vector<ClosedFormKind>& all_closed_forms() {
  static const std::vector<ClosedFormKind> v{ClosedFormKind::ThetaTanh,     ClosedFormKind::ThetaConst, ClosedFormKind::FExp,
                                             ClosedFormKind::FSech,         ClosedFormKind::HExp,       ClosedFormKind::ThetaRational,
                                             ClosedFormKind::HQuadratic,    ClosedFormKind::FRational,  ClosedFormKind::HTrig,
                                             ClosedFormKind::FTrig};
  return v;
}

/// Parameters shared by the branches; each kind reads the ones it needs.
/// sign picks +sqrt(2mu) (theta_const) and the matching e^{-/+ kt} in f_exp.
struct ClosedFormParams {
  double mu = 0.0;
  double c = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double f0 = 0.0;
  int sign = 1;
};

namespace detail {

struct CfValue {
  double v;   ///< closed-form value
  double dv;  ///< analytic t-derivative
};

struct Recip {  // 1/H = u and its first two derivatives
  double u, du, ddu;
};

inline void require_mu(bool ok, ClosedFormKind k, const char* need) {
  if (!ok) throw PreconditionError(std::string(to_string(k)) + " needs " + need);
}

inline Recip recip(ClosedFormKind k, const ClosedFormParams& p, double t) {
  switch (k) {
    case ClosedFormKind::HExp: {
      require_mu(p.mu > 0, k, "mu > 0");
      const double r = std::sqrt(2 * p.mu), ep = p.c1 * std::exp(r * t), em = p.c2 * std::exp(-r * t);
      return {-1.0 / p.mu + ep + em, r * (ep - em), r * r * (ep + em)};
    }
    case ClosedFormKind::HQuadratic:
    case ClosedFormKind::ThetaRational:
    case ClosedFormKind::FRational: {
      require_mu(p.mu == 0.0, k, "mu = 0");
      if (!(p.c1 * p.c1 < 4 * p.c2)) throw PreconditionError(std::string(to_string(k)) + " needs c1^2 < 4 c2");
      return {t * t + p.c1 * t + p.c2, 2 * t + p.c1, 2.0};
    }
    case ClosedFormKind::HTrig:
    case ClosedFormKind::FTrig: {
      require_mu(p.mu < 0, k, "mu < 0");
      const double r = std::sqrt(2 * std::fabs(p.mu)), sn = std::sin(r * t), cs = std::cos(r * t);
      return {-1.0 / p.mu + p.c1 * sn + p.c2 * cs, r * (p.c1 * cs - p.c2 * sn), -r * r * (p.c1 * sn + p.c2 * cs)};
    }
    default:
      throw PreconditionError("no 1/H form for this branch");
  }
}

inline CfValue closed_form_eval(ClosedFormKind k, const ClosedFormParams& p, double t) {
  using K = ClosedFormKind;
  switch (k) {
    case K::ThetaTanh: {
      require_mu(p.mu > 0, k, "mu > 0");
      const double r = std::sqrt(2 * p.mu), th = std::tanh(r * t + p.c);
      return {r * th, r * r * (1 - th * th)};
    }
    case K::ThetaConst:
      require_mu(p.mu >= 0, k, "mu >= 0");
      return {p.sign * std::sqrt(2 * p.mu), 0.0};
    case K::FExp: {
      require_mu(p.mu >= 0, k, "mu >= 0");
      const double r = p.sign * std::sqrt(2 * p.mu), e = std::exp(-r * t);
      return {(p.f0 - p.mu) * e + p.mu, -r * (p.f0 - p.mu) * e};
    }
    case K::FSech: {
      require_mu(p.mu > 0, k, "mu > 0");
      const double r = std::sqrt(2 * p.mu), a = r * t + p.c, sech = 1.0 / std::cosh(a);
      return {p.mu + (p.f0 - p.mu) * sech, -(p.f0 - p.mu) * r * sech * std::tanh(a)};
    }
    case K::HExp:
    case K::HQuadratic:
    case K::HTrig: {
      const Recip u = recip(k, p, t);
      if (u.u == 0.0) throw DomainError(std::string(to_string(k)) + ": 1/H vanishes");
      return {1.0 / u.u, -u.du / (u.u * u.u)};
    }
    case K::ThetaRational: {
      const Recip u = recip(k, p, t);
      return {u.du / u.u, u.ddu / u.u - (u.du * u.du) / (u.u * u.u)};
    }
    case K::FRational: {
      const Recip u = recip(k, p, t);
      return {p.c3 / u.u, -p.c3 * u.du / (u.u * u.u)};
    }
    case K::FTrig: {
      const Recip u = recip(k, p, t);
      if (u.u == 0.0) throw DomainError("f_trig: 1/H vanishes");
      return {p.mu + p.c3 / u.u, -p.c3 * u.du / (u.u * u.u)};
    }
  }
  throw PreconditionError("unknown closed-form kind");
}

}  // namespace detail

inline double closed_form(ClosedFormKind k, const ClosedFormParams& p, double t) {
  return detail::closed_form_eval(k, p, t).v;
}

/// theta along the branch's solution (needed on the right-hand side of the f and H equations).
inline double branch_theta(ClosedFormKind k, const ClosedFormParams& p, double t) {
  using K = ClosedFormKind;
  switch (k) {
    case K::ThetaTanh:
    case K::FSech:
      return detail::closed_form_eval(K::ThetaTanh, p, t).v;
    case K::ThetaConst:
    case K::FExp:
      return detail::closed_form_eval(K::ThetaConst, p, t).v;
    default: {
      const detail::Recip u = detail::recip(k, p, t);
      return u.du / u.u;
    }
  }
}

/// |d/dt(closed form) - right-hand side of its equation|, analytic derivatives.
inline double oracle_residual(ClosedFormKind k, const ClosedFormParams& p, double t) {
  using K = ClosedFormKind;
  const detail::CfValue c = detail::closed_form_eval(k, p, t);
  switch (k) {
    case K::ThetaTanh:
    case K::ThetaConst:
      return std::fabs(c.dv - (-c.v * c.v + 2 * p.mu));
    case K::FExp:
    case K::FSech:
    case K::FRational:
    case K::FTrig:
      return std::fabs(c.dv + branch_theta(k, p, t) * (c.v - p.mu));
    case K::ThetaRational:
      return std::fabs(c.dv - (2.0 * detail::closed_form_eval(K::HQuadratic, p, t).v - c.v * c.v + 2 * p.mu));
    case K::HExp:
    case K::HQuadratic:
    case K::HTrig: {
      const detail::Recip u = detail::recip(k, p, t);
      // (1/H)'' = 2 + 2 mu (1/H), together with H' = -theta H
      return std::max(std::fabs(u.ddu - (2.0 + 2.0 * p.mu * u.u)), std::fabs(c.dv + branch_theta(k, p, t) * c.v));
    }
  }
  return 0.0;
}

/// Initial state at t = 0 lying on the branch; omega^2 and s are chosen
/// (one of them zero) so the H relation holds exactly.
inline FlowState branch_initial_state(ClosedFormKind k, const ClosedFormParams& p) {
  using K = ClosedFormKind;
  FlowState x;
  x.theta = branch_theta(k, p, 0.0);
  switch (k) {
    case K::ThetaTanh:
    case K::ThetaConst:
      x.H = 0.0;
      x.f = p.mu;
      break;
    case K::FExp:
    case K::FSech:
      x.H = 0.0;
      x.f = closed_form(k, p, 0.0);
      break;
    case K::HExp:
    case K::ThetaRational:
    case K::HQuadratic:
    case K::FRational:
    case K::HTrig:
    case K::FTrig: {
      const detail::Recip u = detail::recip(k, p, 0.0);
      x.H = 1.0 / u.u;
      x.f = (k == K::FRational || k == K::FTrig) ? closed_form(k, p, 0.0) : p.mu;
      break;
    }
  }
  const double rest = x.H + 0.5 * p.mu - 0.25 * x.theta * x.theta;  // omega^2/4 - s
  if (rest >= 0) {
    x.omega2 = 4.0 * rest;
  } else {
    x.s = -rest;
  }
  return x;
}

/// The state component a branch describes.
inline double branch_observable(ClosedFormKind k, const FlowState& x) {
  using K = ClosedFormKind;
  switch (k) {
    case K::ThetaTanh:
    case K::ThetaConst:
    case K::ThetaRational:
      return x.theta;
    case K::FExp:
    case K::FSech:
    case K::FRational:
    case K::FTrig:
      return x.f;
    default:
      return x.H;
  }
}

/// sup |RK4 - closed form| of the branch's observable on [0, t_end].
inline double branch_sup_error(ClosedFormKind k, const ClosedFormParams& p, double t_end, double dt) {
  const Trajectory tr = integrate_evolution(branch_initial_state(k, p), p.mu, t_end, dt);
  if (tr.blew_up) return INFINITY;
  double worst = 0.0;
  for (const auto& x : tr.samples) worst = std::max(worst, std::fabs(branch_observable(k, x) - closed_form(k, p, x.t)));
  return worst;
}

enum class RiccatiKind { ThetaMu, ThetaF };

struct BlowupResult {
  bool blew_up = false;
  double time = 0.0;  ///< signed: negative when the blow-up lies in the past
  double horizon = 0.0;
};

/// theta' = -theta^2 + 2 mu (ThetaMu) or -theta^2 - f (ThetaF, `param` = f),
/// searched forward on [0, horizon] and then backward. Any mu is accepted
/// so the complete mu >= 0 cases can be contrasted.
inline BlowupResult riccati_blowup(RiccatiKind kind, double param, double theta0, double horizon, double dt = 1e-3) {
  if (kind == RiccatiKind::ThetaF && !(param > 0)) throw PreconditionError("theta_f needs f > 0");
  const double c = kind == RiccatiKind::ThetaMu ? 2.0 * param : -param;
  auto run = [&](double dir) -> std::optional<double> {
    double th = theta0, t = 0.0;
    auto rhs = [&](double x) { return dir * (-x * x + c); };
    while (t < horizon - 1e-12 * dt) {
      double h = std::min(dt, horizon - t);
      while (std::fabs(th) * h > detail::kStiffness && h > 1e-300) h *= 0.5;
      const double k1 = rhs(th), k2 = rhs(th + 0.5 * h * k1), k3 = rhs(th + 0.5 * h * k2), k4 = rhs(th + h * k3);
      const double next = th + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
      if (!std::isfinite(next) || std::fabs(next) > kBlowupThreshold) return t + 1.0 / std::fabs(th);
      th = next;
      t += h;
    }
    return std::nullopt;
  };
  BlowupResult r;
  r.horizon = horizon;
  if (auto f = run(1.0)) {
    r.blew_up = true;
    r.time = *f;
  } else if (auto b = run(-1.0)) {
    r.blew_up = true;
    r.time = -*b;
  }
  return r;
}

inline double riccati_value(RiccatiKind kind, double param, double theta0, double t_end, double dt = 1e-3) {
  const double c = kind == RiccatiKind::ThetaMu ? 2.0 * param : -param;
  double th = theta0, t = 0.0;
  auto rhs = [&](double x) { return -x * x + c; };
  while (t < t_end - 1e-12 * dt) {
    const double h = std::min(dt, t_end - t);
    const double k1 = rhs(th), k2 = rhs(th + 0.5 * h * k1), k3 = rhs(th + 0.5 * h * k2), k4 = rhs(th + h * k3);
    th += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
    t += h;
  }
  return th;
}

}  // namespace npgeo
