#pragma once

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "npgeo/classify.hpp"
#include "npgeo/congruence.hpp"
#include "npgeo/npcore.hpp"

namespace npgeo {

using Json = nlohmann::ordered_json;

/// Everything that determines a run; embedded verbatim in every report.
struct RunConfig {
  std::string command;
  std::string chart = "hopf_lorentz";  ///< catalog name, unless config_path is set
  std::string config_path;
  std::string field = "T";
  int grid = 7;
  double fd_step = 0.0;  ///< resolved before serialization
  double tol = 1e-5;
  unsigned long long seed = 1;
  std::string out;
  std::string format = "json";
  bool closed = false;
  bool relative = false;
  bool derived_s4a = false;
  double fault_scale = 1.0;

  void validate() const {
    if (grid < 2) throw ConfigError("grid resolution must be at least 2");
    if (!(tol > 0)) throw ConfigError("tolerance must be positive");
    if (fd_step < 0) throw ConfigError("finite-difference step must be positive");
    if (format != "json" && format != "csv") throw ConfigError("format must be json or csv");
  }
};

inline Json to_json(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  if (c.config_path.empty())
    j["chart"] = c.chart;
  else
    j["config"] = c.config_path;
  j["field"] = c.field;
  j["grid"] = c.grid;
  j["fd_step"] = c.fd_step;
  j["tol"] = c.tol;
  j["seed"] = c.seed;
  j["format"] = c.format;
  j["closed"] = c.closed;
  j["relative"] = c.relative;
  j["derived_s4a"] = c.derived_s4a;
  j["fault_scale"] = c.fault_scale;
  return j;
}

inline Json to_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }
inline Json to_json(const Complex& z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const ResidualReport& r) {
  Json j;
  j["point"] = to_json(r.point);
  j["angle"] = r.angle;
  j["signature"] = to_string(r.signature);
  Json res = Json::object();
  for (const auto& e : r.residuals) {
    Json x;
    x["residual"] = e.residual;
    x["lhs"] = to_json(e.lhs);
    x["rhs"] = to_json(e.rhs);
    x["fd_error"] = e.fd_error;
    x["tol"] = e.tol;
    x["pass"] = e.pass;
    res[e.name] = x;
  }
  j["residuals"] = res;
  j["pass"] = r.all_pass();
  return j;
}

struct ResidualSummary {
  std::string name;
  double max = 0.0;
  double mean = 0.0;
  bool pass = true;
};

inline std::vector<ResidualSummary> summarize(const std::vector<ResidualReport>& reps) {
  std::vector<ResidualSummary> out;
  std::map<std::string, std::size_t> index;
  for (const auto& r : reps)
    for (const auto& e : r.residuals) {
      auto [it, fresh] = index.emplace(e.name, out.size());
      if (fresh) out.push_back({e.name});
      auto& s = out[it->second];
      s.max = std::max(s.max, e.residual);
      s.mean += e.residual;
      s.pass = s.pass && e.pass;
    }
  for (auto& s : out) s.mean /= static_cast<double>(reps.size());
  return out;
}

inline void write_summary_csv(std::ostream& os, const std::vector<ResidualSummary>& s) {
  os << "identity,max,mean,pass\n";
  os.precision(17);
  for (const auto& x : s) os << x.name << ',' << x.max << ',' << x.mean << ',' << (x.pass ? 1 : 0) << '\n';
}

inline Json to_json(const FlowState& x) {
  return Json{{"t", x.t}, {"theta", x.theta}, {"omega2", x.omega2}, {"s", x.s}, {"f", x.f}, {"H", x.H}};
}

inline Json to_json(const Trajectory& tr) {
  Json s = Json::array();
  for (const auto& x : tr.samples) s.push_back(to_json(x));
  Json j;
  j["samples"] = s;
  j["blew_up"] = tr.blew_up;
  if (tr.blew_up) j["blowup_time"] = tr.blowup_time;
  j["max_h_drift"] = tr.max_h_drift;
  return j;
}

inline Json to_json(const PointFit& p) {
  return Json{{"point", to_json(p.point)}, {"lambda", p.lambda}, {"f", p.f}, {"offdiag", p.offdiag}, {"max_abs_d", p.max_abs_d}};
}

inline Json to_json(const FitResult& f) {
  Json pts = Json::array();
  for (const auto& p : f.points) pts.push_back(to_json(p));
  Json j;
  j["grid"] = f.grid;
  j["lambda"] = f.lambda;
  j["lambda_spread"] = f.lambda_spread;
  j["f_min"] = f.f_min;
  j["f_max"] = f.f_max;
  j["max_offdiag"] = f.max_offdiag;
  j["max_abs_d"] = f.max_abs_d;
  j["points"] = pts;
  return j;
}

inline Json to_json(const Verdict& v) {
  Json j;
  j["kind"] = to_string(v.kind);
  j["reason"] = v.reason;
  j["tolerances"] = Json{{"lambda_spread", v.tolerances.lambda_spread_tol},
                         {"lambda_zero", v.tolerances.lambda_zero_tol},
                         {"f_margin", v.tolerances.f_margin},
                         {"fit", v.tolerances.fit_tol}};
  if (v.max_abs_d) j["max_abs_d"] = *v.max_abs_d;
  return j;
}

inline Json to_json(const QuasiEinsteinNote& n) {
  Json j;
  j["emitted"] = n.emitted;
  if (!n.reason.empty()) j["reason"] = n.reason;
  if (n.emitted) {
    j["mu"] = Json::array({n.mu_min, n.mu_max});
    j["m_defined"] = n.m_defined;
    if (n.m_defined) j["m"] = Json::array({n.m_min, n.m_max});
  }
  return j;
}

}  // namespace npgeo
