#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "npgeo/chart.hpp"
#include "npgeo/congruence.hpp"
#include "npgeo/errors.hpp"
#include "npgeo/frames.hpp"

namespace npgeo {

struct PointFit {
  Vec3 point{};
  double lambda = 0.0;   ///< -Ric(T,T)
  double f = 0.0;        ///< (Ric(X,X) + Ric(Y,Y)) / 2
  double offdiag = 0.0;  ///< what Ric = f g + (f - lambda) T T cannot absorb
  double max_abs_d = 0.0;
};

struct FitResult {
  std::vector<PointFit> points;
  int grid = 0;
  double lambda = 0.0;  ///< mean over points
  double lambda_spread = 0.0;
  double f_min = 0.0, f_max = 0.0;
  double max_offdiag = 0.0;
  double max_abs_d = 0.0;
};

enum class VerdictKind { ObstructedByTheorem, SplitCase, NoObstruction, HypothesisFailed };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::ObstructedByTheorem: return "ObstructedByTheorem";
    case VerdictKind::SplitCase: return "SplitCase";
    case VerdictKind::NoObstruction: return "NoObstruction";
    case VerdictKind::HypothesisFailed: return "HypothesisFailed";
  }
  return "?";
}

struct ClassifyOptions {
  double lambda_spread_tol = 1e-6;
  double lambda_zero_tol = 1e-6;
  double f_margin = 1e-6;
  double fit_tol = 1e-6;
};

struct Verdict {
  VerdictKind kind = VerdictKind::HypothesisFailed;
  std::string reason;
  ClassifyOptions tolerances;
  std::optional<double> max_abs_d;  ///< SplitCase only
};

inline PointFit pointwise_fit(const Chart& chart, const std::string& field, const Vec3& p) {
  if (chart.signature != Signature::Lorentzian) throw PreconditionError("classification needs a Lorentzian chart");
  const FrameData f = frame_data(chart, p, field, 0.0);
  const Mat3& r = f.ric;
  PointFit out;
  out.point = p;
  out.lambda = -r[0][0];
  out.f = 0.5 * (r[1][1] + r[2][2]);
  out.offdiag = std::max({std::fabs(r[0][1]), std::fabs(r[0][2]), std::fabs(r[1][2]), 0.5 * std::fabs(r[1][1] - r[2][2])});
  const Mat2 d = d_matrix(f);
  out.max_abs_d = std::max({std::fabs(d[0][0]), std::fabs(d[0][1]), std::fabs(d[1][0]), std::fabs(d[1][1])});
  return out;
}

inline FitResult aggregate(std::vector<PointFit> pts, int grid = 0) {
  if (pts.empty()) throw PreconditionError("empty probe grid");
  FitResult r;
  r.grid = grid;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo, sum = 0.0;
  r.f_min = lo;
  r.f_max = -lo;
  for (const auto& p : pts) {
    lo = std::min(lo, p.lambda);
    hi = std::max(hi, p.lambda);
    sum += p.lambda;
    r.f_min = std::min(r.f_min, p.f);
    r.f_max = std::max(r.f_max, p.f);
    r.max_offdiag = std::max(r.max_offdiag, p.offdiag);
    r.max_abs_d = std::max(r.max_abs_d, p.max_abs_d);
  }
  r.lambda = sum / static_cast<double>(pts.size());
  r.lambda_spread = hi - lo;
  r.points = std::move(pts);
  return r;
}

/// The decision table on an aggregated fit.
inline Verdict decide(const FitResult& fit, bool closed, const ClassifyOptions& opt = {}) {
  Verdict v;
  v.tolerances = opt;
  auto fail = [&](std::string why) {
    v.kind = VerdictKind::HypothesisFailed;
    v.reason = std::move(why);
    return v;
  };
  if (!(fit.max_offdiag <= opt.fit_tol)) return fail("Ricci tensor is not of the form f g + (f - lambda) T T");
  if (!(fit.lambda_spread <= opt.lambda_spread_tol)) return fail("lambda is not constant on the grid");
  const double lam = fit.lambda;
  auto hits = [&](double c) { return fit.f_min - opt.f_margin <= c && c <= fit.f_max + opt.f_margin; };
  if (hits(0.0)) return fail("f attains 0 on the sampled range");
  if (hits(lam)) return fail("f attains lambda on the sampled range");
  const std::string grid_note = fit.grid > 0 ? " (checked on a " + std::to_string(fit.grid) + "^3 grid)" : "";
  if (lam > opt.lambda_zero_tol) {
    if (closed) {
      v.kind = VerdictKind::ObstructedByTheorem;
      v.reason = "lambda > 0 on a manifold flagged closed: no such metric exists, so the input is inconsistent" + grid_note;
    } else {
      v.kind = VerdictKind::NoObstruction;
      v.reason = "lambda > 0 but the manifold is not flagged closed" + grid_note;
    }
  } else if (lam >= -opt.lambda_zero_tol) {
    if (closed) {
      v.kind = VerdictKind::SplitCase;
      v.reason = "lambda = 0: T is parallel and the metric splits as -dt^2 + h" + grid_note;
      v.max_abs_d = fit.max_abs_d;
    } else {
      v.kind = VerdictKind::NoObstruction;
      v.reason = "lambda = 0 but the manifold is not flagged closed" + grid_note;
    }
  } else {
    v.kind = VerdictKind::NoObstruction;
    v.reason = "lambda < 0" + grid_note;
  }
  return v;
}

struct Classification {
  FitResult fit;
  Verdict verdict;
};

inline Classification classify_metric(const Chart& chart, const std::string& field, int grid, bool closed,
                                      const ClassifyOptions& opt = {}) {
  if (grid < 1) throw PreconditionError("empty probe grid");
  std::vector<PointFit> pts;
  try {
    for (const Vec3& p : probe_grid(chart, grid)) pts.push_back(pointwise_fit(chart, field, p));
  } catch (const PreconditionError& e) {
    Classification c;
    c.fit.grid = grid;
    c.verdict.kind = VerdictKind::HypothesisFailed;
    c.verdict.reason = e.what();
    c.verdict.tolerances = opt;
    return c;
  }
  Classification c;
  c.fit = aggregate(std::move(pts), grid);
  c.verdict = decide(c.fit, closed, opt);
  return c;
}

struct QuasiEinsteinNote {
  bool emitted = false;
  std::string reason;
  double mu_min = 0.0, mu_max = 0.0;  ///< mu = f
  bool m_defined = false;
  double m_min = 0.0, m_max = 0.0;  ///< m = 1 / (f - lambda)
};

inline QuasiEinsteinNote quasi_einstein_interpret(const FitResult& fit, double killing_max,
                                                  const ClassifyOptions& opt = {}) {
  QuasiEinsteinNote n;
  if (!(killing_max <= 1e-8)) {
    n.reason = "T is not Killing";
    return n;
  }
  if (fit.points.empty() || !(fit.max_offdiag <= opt.fit_tol) || !(fit.lambda_spread <= opt.lambda_spread_tol)) {
    n.reason = "generalized Einstein condition does not hold";
    return n;
  }
  n.emitted = true;
  n.mu_min = fit.f_min;
  n.mu_max = fit.f_max;
  n.m_defined = true;
  n.m_min = std::numeric_limits<double>::infinity();
  n.m_max = -n.m_min;
  for (const auto& p : fit.points) {
    const double gap = p.f - p.lambda;
    if (std::fabs(gap) <= 1e-10) {
      n.m_defined = false;
      n.reason = "f = lambda somewhere: 1/m = 0, the Einstein case";
      break;
    }
    n.m_min = std::min(n.m_min, 1.0 / gap);
    n.m_max = std::max(n.m_max, 1.0 / gap);
  }
  if (!n.m_defined) n.m_min = n.m_max = 0.0;
  return n;
}

/// (theta, omega^2, |sigma|^2, f, H) read off the geometry at p, with
/// mu = lambda_p = -Ric(T,T) and H = det D - mu/2.
inline FlowState sample_flow_state(const Chart& chart, const std::string& field, const Vec3& p, double t = 0.0) {
  const FrameData fd = frame_data(chart, p, field, 0.0);
  const KinematicScalars k = kinematics(d_matrix(fd));
  const double mu = -fd.ric[0][0];
  FlowState x;
  x.t = t;
  x.theta = k.div;
  x.omega2 = k.omega2();
  x.s = k.shear2();
  x.f = 0.5 * (fd.ric[1][1] + fd.ric[2][2]);
  x.H = k.detD - 0.5 * mu;
  return x;
}

inline double sampled_mu(const Chart& chart, const std::string& field, const Vec3& p) {
  return -frame_data(chart, p, field, 0.0).ric[0][0];
}

}  // namespace npgeo
