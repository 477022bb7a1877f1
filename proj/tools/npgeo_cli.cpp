#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "npgeo/classify.hpp"
#include "npgeo/congruence.hpp"
#include "npgeo/npcore.hpp"
#include "npgeo/report.hpp"

using namespace npgeo;

namespace {

enum Exit { kPass = 0, kCheckFailed = 1, kUsage = 2, kNumerical = 3 };

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", std::fabs(x) < 5e-15 ? 0.0 : x);
  return buf;
}
std::string num(const Complex& z) { return num(z.real()) + (z.imag() < 0 ? " - " : " + ") + num(std::fabs(z.imag())) + "i"; }
std::string vec(const Vec3& v) { return "(" + num(v[0]) + ", " + num(v[1]) + ", " + num(v[2]) + ")"; }

struct Options {
  RunConfig run;
  std::vector<double> point;
  double angle = 0.0;
  bool inject_fault = false;
  // verify-s3 golden values
  double gold_f = 8.0, gold_lambda = -2.0, gold_txxt = -1.0, gold_yxxy = 7.0;
  // flow
  double mu = 0.0, theta0 = 0.0, omega2 = 0.0, s0 = 0.0, f0 = 0.0, t_end = 5.0, dt = 1e-3;
  std::optional<double> H0;
  std::string branch;
  ClosedFormParams params;
  bool field_sampled = false;
};

Chart load_chart(const RunConfig& rc) {
  return rc.config_path.empty() ? catalog_chart(rc.chart) : load_chart_config(rc.config_path);
}

Vec3 point_or_center(const Options& o, const Chart& c) {
  if (o.point.empty()) return c.center();
  return {o.point[0], o.point[1], o.point[2]};
}

/// Report goes to --out (file, or "-" for stdout in place of the summary).
void emit(const Options& o, const std::string& summary, const std::string& report) {
  const std::string& out = o.run.out;
  if (out == "-") {
    std::cout << report;
    return;
  }
  std::cout << summary;
  if (out.empty()) return;
  std::ofstream f(out, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + out + "'");
  f << report;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string kv_csv(const std::vector<std::pair<std::string, double>>& rows) {
  std::ostringstream os;
  os.precision(17);
  os << "key,value\n";
  for (const auto& [k, v] : rows) os << k << ',' << v << '\n';
  return os.str();
}

int cmd_inspect(const Options& o) {
  const Chart c = load_chart(o.run);
  const Vec3 p = point_or_center(o, c);
  const FrameData f = frame_data(c, p, o.run.field, o.angle);
  const Mat2 d = d_matrix(f);
  const KinematicScalars k = kinematics(d);
  const SpinCoefficients sc = spin_coefficients(f);
  const Triad& t = f.triad;

  std::ostringstream s;
  s << "chart " << c.name << " (" << to_string(c.signature) << ") at " << vec(p) << ", angle " << num(o.angle) << "\n";
  s << "T = " << vec(t.t) << "\nX = " << vec(t.x) << "\nY = " << vec(t.y) << "\n";
  s << "D = [[" << num(d[0][0]) << ", " << num(d[0][1]) << "], [" << num(d[1][0]) << ", " << num(d[1][1]) << "]]\n";
  s << "div " << num(k.div) << "  omega " << num(k.omega) << "  omega^2 " << num(k.omega2()) << "  sigma1 "
    << num(k.sigma1) << "  sigma2 " << num(k.sigma2) << "  |sigma|^2 " << num(k.shear2()) << "  detD " << num(k.detD)
    << "\n";
  s << "kappa " << num(sc.kappa) << "\nrho " << num(sc.rho) << "\nsigma " << num(sc.sigma) << "\nepsilon "
    << num(sc.epsilon) << "\nbeta " << num(sc.beta) << "\n";
  s << "Ric(frame) =";
  for (int a = 0; a < 3; ++a) s << " [" << num(f.ric[a][0]) << ", " << num(f.ric[a][1]) << ", " << num(f.ric[a][2]) << "]";
  s << "\n";

  std::string report;
  if (o.run.format == "csv") {
    report = kv_csv({{"div", k.div}, {"omega", k.omega}, {"omega2", k.omega2()}, {"sigma1", k.sigma1},
                     {"sigma2", k.sigma2}, {"detD", k.detD}, {"kappa_re", sc.kappa.real()}, {"kappa_im", sc.kappa.imag()},
                     {"rho_re", sc.rho.real()}, {"rho_im", sc.rho.imag()}, {"sigma_re", sc.sigma.real()},
                     {"sigma_im", sc.sigma.imag()}, {"epsilon_re", sc.epsilon.real()}, {"epsilon_im", sc.epsilon.imag()},
                     {"beta_re", sc.beta.real()}, {"beta_im", sc.beta.imag()}});
  } else {
    Json j;
    j["config"] = to_json(o.run);
    j["point"] = to_json(p);
    j["angle"] = o.angle;
    j["triad"] = Json{{"T", to_json(t.t)}, {"X", to_json(t.x)}, {"Y", to_json(t.y)}};
    j["D"] = Json::array({Json::array({d[0][0], d[0][1]}), Json::array({d[1][0], d[1][1]})});
    j["kinematics"] = Json{{"div", k.div}, {"omega", k.omega}, {"omega2", k.omega2()}, {"sigma1", k.sigma1},
                           {"sigma2", k.sigma2}, {"detD", k.detD}};
    j["spin"] = Json{{"kappa", to_json(sc.kappa)}, {"rho", to_json(sc.rho)}, {"sigma", to_json(sc.sigma)},
                     {"epsilon", to_json(sc.epsilon)}, {"beta", to_json(sc.beta)}};
    report = dump(j);
  }
  emit(o, s.str(), report);
  return kPass;
}

int cmd_check_np(Options o) {
  Chart c = load_chart(o.run);
  NpOptions opt;
  opt.tol = o.run.tol;
  opt.fd_step = o.run.fd_step;
  opt.relative = o.run.relative;
  opt.derived_s4a = o.run.derived_s4a;
  if (o.inject_fault) opt.fault_g00_scale = o.run.fault_scale;
  o.run.fd_step = opt.step_for(c);

  std::mt19937_64 rng(o.run.seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::vector<ResidualReport> reps;
  for (const Vec3& p : probe_grid(c, o.run.grid)) reps.push_back(np_residuals(c, o.run.field, p, angle(rng), opt));

  const auto summary = summarize(reps);
  bool pass = true;
  std::ostringstream s;
  s << "check-np " << c.name << " (" << to_string(c.signature) << "), " << reps.size() << " points, tol " << num(opt.tol)
    << (opt.relative ? " relative" : "") << "\n";
  for (const auto& x : summary) {
    char line[128];
    std::snprintf(line, sizeof line, "  %-11s max %-12.4g mean %-12.4g %s\n", x.name.c_str(), x.max, x.mean,
                  x.pass ? "ok" : "FAIL");
    s << line;
    pass = pass && x.pass;
  }
  s << (pass ? "PASS" : "FAIL") << "\n";

  std::string report;
  if (o.run.format == "csv") {
    std::ostringstream os;
    write_summary_csv(os, summary);
    report = os.str();
  } else {
    Json j;
    j["config"] = to_json(o.run);
    j["chart"] = Json{{"name", c.name}, {"signature", to_string(c.signature)}};
    Json pts = Json::array();
    for (const auto& r : reps) pts.push_back(to_json(r));
    j["points"] = pts;
    Json sj = Json::array();
    for (const auto& x : summary) sj.push_back(Json{{"identity", x.name}, {"max", x.max}, {"mean", x.mean}, {"pass", x.pass}});
    j["summary"] = sj;
    j["pass"] = pass;
    report = dump(j);
  }
  emit(o, s.str(), report);
  return pass ? kPass : kCheckFailed;
}

int cmd_verify_s3(Options o) {
  if (o.run.config_path.empty() && o.run.chart.empty()) o.run.chart = "hopf_lorentz";
  const Chart c = load_chart(o.run);
  if (c.signature != Signature::Lorentzian) throw PreconditionError("verify-s3 needs a Lorentzian chart");
  const double F = o.gold_f, L = o.gold_lambda;
  double dev_ric = 0, dev_tt = 0, dev_w2 = 0, dev_txxt = 0, dev_yxxy = 0, dev_xx = 0;
  double ric_tt = 0, w2 = 0, txxt = 0, yxxy = 0, ric_xx = 0, ric_yy = 0, k_tx = 0, k_xy = 0;
  const double gold_tt = F - L - F;  // Ric(T,T) = -f + (f - lambda)
  for (const Vec3& p : probe_grid(c, o.run.grid)) {
    const FrameData fd = frame_data(c, p, o.run.field, 0.0);
    const Mat3& g = fd.curv.metric.g;
    const Vec3 tv = fd.triad.t;
    Vec3 tl{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) tl[i] += g[i][j] * tv[j];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        dev_ric = std::max(dev_ric, std::fabs(fd.curv.ricci[i][j] - (F * g[i][j] + (F - L) * tl[i] * tl[j])));
    ric_tt = fd.ric[0][0];
    w2 = kinematics(d_matrix(fd)).omega2();
    txxt = fd.riem[0][1][1][0];
    yxxy = fd.riem[2][1][1][2];
    ric_xx = fd.ric[1][1];
    ric_yy = fd.ric[2][2];
    k_tx = txxt / (fd.eta(0) * fd.eta(1));
    k_xy = fd.riem[1][2][2][1];
    dev_tt = std::max(dev_tt, std::fabs(ric_tt - gold_tt));
    dev_w2 = std::max(dev_w2, std::fabs(w2 - 4.0));
    dev_txxt = std::max(dev_txxt, std::fabs(txxt - o.gold_txxt));
    dev_yxxy = std::max(dev_yxxy, std::fabs(yxxy - o.gold_yxxy));
    dev_xx = std::max({dev_xx, std::fabs(ric_xx - F), std::fabs(ric_yy - F)});
  }
  struct Check {
    const char* name;
    double dev, tol;
  };
  const Check checks[] = {{"Ric - (f g + (f - lambda) T T)", dev_ric, 1e-7}, {"Ric(T,T)", dev_tt, 1e-8},
                          {"omega^2", dev_w2, 1e-8},           {"R(T,X,X,T)", dev_txxt, 1e-7},
                          {"R(Y,X,X,Y)", dev_yxxy, 1e-7},      {"Ric(X,X), Ric(Y,Y)", dev_xx, 1e-7}};
  bool pass = true;
  std::ostringstream s;
  s << "verify-s3 " << c.name << " against f = " << num(F) << ", lambda = " << num(L) << ", R(T,X,X,T) = "
    << num(o.gold_txxt) << ", R(Y,X,X,Y) = " << num(o.gold_yxxy) << "\n";
  s << "  computed: Ric(T,T) " << num(ric_tt) << "  omega^2 " << num(w2) << "  Ric(X,X) " << num(ric_xx) << "  Ric(Y,Y) "
    << num(ric_yy) << "  R(T,X,X,T) " << num(txxt) << "  R(Y,X,X,Y) " << num(yxxy) << "\n";
  s << "  sectional: K(T,X) " << num(k_tx) << "  K(X,Y) " << num(k_xy) << "\n";
  for (const auto& ch : checks) {
    const bool ok = ch.dev <= ch.tol;
    pass = pass && ok;
    char line[160];
    std::snprintf(line, sizeof line, "  %-32s max dev %-12.4g tol %-8.1g %s\n", ch.name, ch.dev, ch.tol, ok ? "ok" : "FAIL");
    s << line;
  }
  s << (pass ? "PASS" : "FAIL") << "\n";

  std::string report;
  if (o.run.format == "csv") {
    report = kv_csv({{"max_dev_ricci", dev_ric}, {"ric_tt", ric_tt}, {"omega2", w2}, {"ric_xx", ric_xx}, {"ric_yy", ric_yy},
                     {"r_txxt", txxt}, {"r_yxxy", yxxy}, {"k_tx", k_tx}, {"k_xy", k_xy}});
  } else {
    Json j;
    j["config"] = to_json(o.run);
    j["golden"] = Json{{"f", F}, {"lambda", L}, {"R_TXXT", o.gold_txxt}, {"R_YXXY", o.gold_yxxy}};
    j["computed"] = Json{{"Ric_TT", ric_tt}, {"omega2", w2},   {"Ric_XX", ric_xx}, {"Ric_YY", ric_yy},
                         {"R_TXXT", txxt},   {"R_YXXY", yxxy}, {"K_TX", k_tx},     {"K_XY", k_xy}};
    Json cj = Json::array();
    for (const auto& ch : checks) cj.push_back(Json{{"check", ch.name}, {"max_dev", ch.dev}, {"tol", ch.tol}, {"pass", ch.dev <= ch.tol}});
    j["checks"] = cj;
    j["pass"] = pass;
    report = dump(j);
  }
  emit(o, s.str(), report);
  return pass ? kPass : kCheckFailed;
}

ClosedFormKind parse_kind(const std::string& name) {
  for (ClosedFormKind k : all_closed_forms())
    if (name == to_string(k)) return k;
  throw ConfigError("unknown branch '" + name + "'");
}

int cmd_flow(const Options& o) {
  std::ostringstream s;
  Json j;
  j["config"] = to_json(o.run);
  bool pass = true;
  std::string csv;

  if (o.field_sampled) {
    const Chart c = load_chart(o.run);
    const Vec3 p = point_or_center(o, c);
    const Curve curve = integrate_curve(c, o.run.field, p, o.t_end, o.dt);
    Trajectory tr;
    for (const auto& cs : curve.samples) tr.samples.push_back(sample_flow_state(c, o.run.field, cs.point, cs.t));
    const FlowState& x0 = tr.samples.front();
    const double mu = sampled_mu(c, o.run.field, p);
    double dev = 0.0;
    for (const auto& x : tr.samples)
      dev = std::max({dev, std::fabs(x.theta - x0.theta), std::fabs(x.omega2 - x0.omega2), std::fabs(x.s - x0.s),
                      std::fabs(x.f - x0.f), std::fabs(x.H - x0.H)});
    const FlowDerivative r = evolution_rhs(x0, mu);
    const double rhs = std::max({std::fabs(r.d.theta), std::fabs(r.d.omega2), std::fabs(r.d.s), std::fabs(r.d.f), std::fabs(r.d.H)});
    pass = !curve.exited && dev <= 1e-7 && rhs <= 1e-12;
    s << "flow along " << o.run.field << " on " << c.name << " from " << vec(p) << ", " << tr.samples.size() << " samples"
      << (curve.exited ? " (left the domain)" : "") << "\n";
    s << "  start theta " << num(x0.theta) << "  omega^2 " << num(x0.omega2) << "  |sigma|^2 " << num(x0.s) << "  f "
      << num(x0.f) << "  H " << num(x0.H) << "  mu " << num(mu) << "\n";
    s << "  max drift " << num(dev) << " (tol 1e-7), |evolution rhs| " << num(rhs) << " (tol 1e-12)\n";
    j["mode"] = "field_sampled";
    j["mu"] = mu;
    j["exited"] = curve.exited;
    j["max_drift"] = dev;
    j["max_rhs"] = rhs;
    j["trajectory"] = to_json(tr);
    std::ostringstream os;
    write_csv(os, tr);
    csv = os.str();
  } else if (!o.branch.empty()) {
    const ClosedFormKind k = parse_kind(o.branch);
    ClosedFormParams prm = o.params;
    prm.mu = o.mu;
    const Trajectory tr = integrate_evolution(branch_initial_state(k, prm), prm.mu, o.t_end, o.dt);
    double sup = 0.0;
    for (const auto& x : tr.samples) sup = std::max(sup, std::fabs(branch_observable(k, x) - closed_form(k, prm, x.t)));
    double oracle = 0.0;
    for (int i = 0; i < 100; ++i) oracle = std::max(oracle, oracle_residual(k, prm, o.t_end * i / 99.0));
    pass = !tr.blew_up && sup <= 1e-6 && oracle <= 1e-9;
    s << "flow " << o.branch << " mu " << num(prm.mu) << " on [0, " << num(o.t_end) << "], dt " << num(o.dt) << "\n";
    s << "  sup |rk4 - closed form| " << num(sup) << " (tol 1e-6), oracle residual " << num(oracle) << " (tol 1e-9)\n";
    j["mode"] = "branch";
    j["branch"] = o.branch;
    j["params"] = Json{{"mu", prm.mu}, {"c", prm.c}, {"c1", prm.c1}, {"c2", prm.c2}, {"c3", prm.c3}, {"f0", prm.f0}, {"sign", prm.sign}};
    j["sup_error"] = sup;
    j["oracle_residual"] = oracle;
    j["trajectory"] = to_json(tr);
    std::ostringstream os;
    write_csv(os, tr);
    csv = os.str();
  } else {
    FlowState x0{0.0, o.theta0, o.omega2, o.s0, o.f0, 0.0};
    x0.H = o.H0 ? *o.H0 : h_relation(x0, o.mu);
    const Trajectory tr = integrate_evolution(x0, o.mu, o.t_end, o.dt);
    s << "flow mu " << num(o.mu) << " from theta " << num(x0.theta) << ", omega^2 " << num(x0.omega2) << ", |sigma|^2 "
      << num(x0.s) << ", f " << num(x0.f) << ", H " << num(x0.H) << "\n";
    if (tr.blew_up)
      s << "  blow-up at t = " << num(tr.blowup_time) << "\n";
    else
      s << "  complete on [0, " << num(o.t_end) << "], final theta " << num(tr.samples.back().theta) << "\n";
    s << "  max H-relation drift " << num(tr.max_h_drift) << "\n";
    j["mode"] = "free";
    j["mu"] = o.mu;
    j["trajectory"] = to_json(tr);
    std::ostringstream os;
    write_csv(os, tr);
    csv = os.str();
  }
  j["pass"] = pass;
  s << (pass ? "PASS" : "FAIL") << "\n";
  emit(o, s.str(), o.run.format == "csv" ? csv : dump(j));
  return pass ? kPass : kCheckFailed;
}

int cmd_classify(const Options& o) {
  const Chart c = load_chart(o.run);
  const Classification cl = classify_metric(c, o.run.field, o.run.grid, o.run.closed);
  double killing = 0.0;
  for (const Vec3& p : probe_grid(c, o.run.grid)) killing = std::max(killing, killing_residual(c, o.run.field, p));
  const QuasiEinsteinNote qe = quasi_einstein_interpret(cl.fit, killing);

  std::ostringstream s;
  s << "classify " << c.name << " (" << (o.run.closed ? "closed" : "not flagged closed") << "), " << o.run.grid << "^3 grid\n";
  if (!cl.fit.points.empty()) {
    s << "  lambda " << num(cl.fit.lambda) << " (spread " << num(cl.fit.lambda_spread) << ")  f in [" << num(cl.fit.f_min)
      << ", " << num(cl.fit.f_max) << "]  max offdiag " << num(cl.fit.max_offdiag) << "  max |D| " << num(cl.fit.max_abs_d)
      << "\n";
  }
  s << "  verdict " << to_string(cl.verdict.kind) << ": " << cl.verdict.reason << "\n";
  s << "  Killing residual " << num(killing);
  if (qe.emitted) {
    s << "; quasi-Einstein reading mu in [" << num(qe.mu_min) << ", " << num(qe.mu_max) << "]";
    if (qe.m_defined)
      s << ", m in [" << num(qe.m_min) << ", " << num(qe.m_max) << "]";
    else
      s << ", m undefined";
  }
  s << "\n";

  std::string report;
  if (o.run.format == "csv") {
    std::ostringstream os;
    os.precision(17);
    os << "x0,x1,x2,lambda,f,offdiag,max_abs_d\n";
    for (const auto& p : cl.fit.points)
      os << p.point[0] << ',' << p.point[1] << ',' << p.point[2] << ',' << p.lambda << ',' << p.f << ',' << p.offdiag << ','
         << p.max_abs_d << '\n';
    report = os.str();
  } else {
    Json j;
    j["config"] = to_json(o.run);
    j["fit"] = to_json(cl.fit);
    j["verdict"] = to_json(cl.verdict);
    j["killing_max"] = killing;
    j["quasi_einstein"] = to_json(qe);
    report = dump(j);
  }
  emit(o, s.str(), report);
  return kPass;
}

void common_flags(CLI::App* sub, Options& o) {
  sub->add_option("--chart", o.run.chart, "catalog chart name")->capture_default_str();
  sub->add_option("--config", o.run.config_path, "chart config file (overrides --chart)");
  sub->add_option("--field", o.run.field, "name of the unit field T")->capture_default_str();
  sub->add_option("--grid", o.run.grid, "probe grid points per axis")->capture_default_str();
  sub->add_option("--fd-step", o.run.fd_step, "finite-difference step (default 1e-3 of the smallest extent)");
  sub->add_option("--tol", o.run.tol, "residual tolerance")->capture_default_str();
  sub->add_option("--seed", o.run.seed, "RNG seed for frame angles")->capture_default_str();
  sub->add_option("--out", o.run.out, "report path; '-' prints the report instead of the summary");
  sub->add_option("--format", o.run.format, "json or csv")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Newman-Penrose toolkit for Lorentzian 3-manifolds"};
  app.require_subcommand(1);
  Options o;

  auto* inspect = app.add_subcommand("inspect", "frame, D matrix, kinematics and spin coefficients at a point");
  auto* check = app.add_subcommand("check-np", "structure-equation residuals over the probe grid");
  auto* s3 = app.add_subcommand("verify-s3", "Ricci and curvature golden values on the Lorentzian S^3");
  auto* flow = app.add_subcommand("flow", "evolution equations along the congruence");
  auto* classify = app.add_subcommand("classify", "fit Ric = f g + (f - lambda) T T and give the verdict");
  for (auto* sub : {inspect, check, s3, flow, classify}) common_flags(sub, o);

  for (auto* sub : {inspect, flow}) sub->add_option("--point", o.point, "point in chart coordinates")->expected(3);
  inspect->add_option("--angle", o.angle, "frame rotation angle");

  check->add_flag("--relative", o.run.relative, "scale residuals by 1 + max(|lhs|, |rhs|)");
  check->add_flag("--derived-s4a", o.run.derived_s4a, "use the derived Lorentzian signs in S4a");
  check->add_flag("--inject-fault", o.inject_fault, "scale g_00 in the curvature terms only (test hook)");
  o.run.fault_scale = 1.1;
  check->add_option("--fault-scale", o.run.fault_scale, "g_00 factor used by --inject-fault")->capture_default_str();

  s3->add_option("--f", o.gold_f, "expected f")->capture_default_str();
  s3->add_option("--lambda", o.gold_lambda, "expected lambda")->capture_default_str();
  s3->add_option("--r-txxt", o.gold_txxt, "expected R(T,X,X,T)")->capture_default_str();
  s3->add_option("--r-yxxy", o.gold_yxxy, "expected R(Y,X,X,Y)")->capture_default_str();

  flow->add_option("--mu", o.mu, "mu (= -Ric(T,T))")->capture_default_str();
  flow->add_option("--theta0", o.theta0, "initial div T");
  flow->add_option("--omega2", o.omega2, "initial omega^2");
  flow->add_option("--s0", o.s0, "initial |sigma|^2");
  flow->add_option("--f0", o.f0, "initial f (also the f0 of the f branches)");
  flow->add_option("--H0", o.H0, "initial H (default from the H relation)");
  flow->add_option("--t-end", o.t_end, "integration horizon")->capture_default_str();
  flow->add_option("--dt", o.dt, "RK4 step")->capture_default_str();
  flow->add_option("--branch", o.branch, "closed-form branch to compare against");
  flow->add_option("--c", o.params.c, "branch constant c");
  flow->add_option("--c1", o.params.c1, "branch constant c1");
  flow->add_option("--c2", o.params.c2, "branch constant c2");
  flow->add_option("--c3", o.params.c3, "branch constant c3");
  flow->add_option("--sign", o.params.sign, "branch sign (+1 or -1)");
  flow->add_flag("--field-sampled", o.field_sampled, "sample the state from the geometry along an integral curve");

  classify->add_flag("--closed", o.run.closed, "treat the manifold as closed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kUsage;
  }
  o.params.f0 = o.f0;
  if (!o.inject_fault) o.run.fault_scale = 1.0;

  try {
    o.run.validate();
    const std::pair<CLI::App*, int (*)(Options)> commands[] = {
        {inspect, [](Options x) { return cmd_inspect(x); }}, {check, cmd_check_np},
        {s3, cmd_verify_s3},
        {flow, [](Options x) { return cmd_flow(x); }},
        {classify, [](Options x) { return cmd_classify(x); }}};
    for (const auto& [sub, run] : commands)
      if (sub->parsed()) {
        o.run.command = sub->get_name();
        return run(o);
      }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
  return kUsage;
}
