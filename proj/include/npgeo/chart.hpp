#pragma once

#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "npgeo/errors.hpp"
#include "npgeo/expr.hpp"
#include "npgeo/jet.hpp"
#include "npgeo/linalg.hpp"

namespace npgeo {

enum class Signature { Lorentzian, Riemannian };

inline const char* to_string(Signature s) { return s == Signature::Lorentzian ? "lorentzian" : "riemannian"; }

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double width() const { return hi - lo; }
  double mid() const { return 0.5 * (lo + hi); }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

using FieldExprs = std::array<Expression, 3>;
using MetricExprs = std::array<std::array<Expression, 3>, 3>;

/// Coordinate box carrying metric component expressions and named vector
/// fields (components in the coordinate basis). Build through make_chart so
/// the nondegeneracy and signature checks run.
struct Chart {
  std::string name;
  std::array<std::string, 3> coords;
  std::array<Interval, 3> domain;
  MetricExprs metric;
  std::map<std::string, FieldExprs> fields;
  Signature signature = Signature::Lorentzian;

  std::span<const std::string> coord_names() const { return coords; }
  double min_extent() const {
    return std::min({domain[0].width(), domain[1].width(), domain[2].width()});
  }
  Vec3 center() const { return {domain[0].mid(), domain[1].mid(), domain[2].mid()}; }
  bool contains(const Vec3& p) const {
    return domain[0].contains(p[0]) && domain[1].contains(p[1]) && domain[2].contains(p[2]);
  }
  const FieldExprs& field(const std::string& f) const {
    auto it = fields.find(f);
    if (it == fields.end()) throw ConfigError("chart '" + name + "' has no field '" + f + "'");
    return it->second;
  }
};

/// Cell-centred uniform grid: n points per axis at lo + (i + 1/2) * width / n,
/// so every point is interior.
inline std::vector<Vec3> probe_grid(const Chart& chart, int n) {
  if (n < 1) throw ConfigError("grid resolution must be positive");
  std::vector<Vec3> pts;
  pts.reserve(static_cast<std::size_t>(n) * n * n);
  auto at = [&](int axis, int i) {
    const Interval& iv = chart.domain[axis];
    return iv.lo + (i + 0.5) * iv.width() / n;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) pts.push_back({at(0, i), at(1, j), at(2, k)});
  return pts;
}

inline void require_in_domain(const Chart& chart, const Vec3& p) {
  if (!chart.contains(p)) {
    std::ostringstream os;
    os << "point (" << p[0] << ", " << p[1] << ", " << p[2] << ") outside domain of chart '" << chart.name << "'";
    throw DomainError(os.str());
  }
}

inline Mat3 metric_values(const Chart& chart, const Vec3& p) {
  Mat3 g{};
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) g[i][j] = g[j][i] = evaluate<double>(chart.metric[i][j], p, chart.coords);
  return g;
}

inline Vec3 field_values(const Chart& chart, const std::string& f, const Vec3& p) {
  const FieldExprs& v = chart.field(f);
  return {evaluate<double>(v[0], p, chart.coords), evaluate<double>(v[1], p, chart.coords),
          evaluate<double>(v[2], p, chart.coords)};
}

inline std::array<Jet2, 3> seeded(const Vec3& p) {
  return {Jet2::seed(p, 0), Jet2::seed(p, 1), Jet2::seed(p, 2)};
}

inline std::array<std::array<Jet2, 3>, 3> metric_jets(const Chart& chart, const Vec3& p) {
  const auto env = seeded(p);
  std::array<std::array<Jet2, 3>, 3> g;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) g[i][j] = g[j][i] = evaluate<Jet2>(chart.metric[i][j], env, chart.coords);
  return g;
}

inline std::array<Jet2, 3> field_jets(const Chart& chart, const std::string& f, const Vec3& p) {
  const auto env = seeded(p);
  const FieldExprs& v = chart.field(f);
  return {evaluate<Jet2>(v[0], env, chart.coords), evaluate<Jet2>(v[1], env, chart.coords),
          evaluate<Jet2>(v[2], env, chart.coords)};
}

inline int negative_eigenvalues(const Mat3& g) {
  const Vec3 ev = symmetric_eigenvalues(g);
  return (ev[0] < 0) + (ev[1] < 0) + (ev[2] < 0);
}

/// Validates and seals a chart: nondegenerate on the 5^3 probe grid, and
/// signature (-,+,+) or (+,+,+) at the box centre.
inline Chart make_chart(std::string name, std::array<std::string, 3> coords, std::array<Interval, 3> domain,
                        MetricExprs metric, std::map<std::string, FieldExprs> fields) {
  Chart c{std::move(name), std::move(coords), domain, std::move(metric), std::move(fields), Signature::Lorentzian};
  for (int a = 0; a < 3; ++a)
    if (!(c.domain[a].hi > c.domain[a].lo))
      throw ConfigError("empty domain interval for coordinate '" + c.coords[a] + "'");
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j)
      if (!(c.metric[i][j] == c.metric[j][i])) throw ConfigError("metric expressions are not symmetric");
  for (const Vec3& p : probe_grid(c, 5)) {
    const double d = det(metric_values(c, p));
    if (!(std::fabs(d) > 1e-12)) throw ConfigError("metric of chart '" + c.name + "' is degenerate on the probe grid");
  }
  const int neg = negative_eigenvalues(metric_values(c, c.center()));
  if (neg == 1) c.signature = Signature::Lorentzian;
  else if (neg == 0) c.signature = Signature::Riemannian;
  else throw ConfigError("chart '" + c.name + "' has signature with " + std::to_string(neg) + " negative directions");
  return c;
}

namespace detail {

inline bool is_zero_literal(const Expression& e) {
  return e.root().kind == ExprNode::Kind::Number && e.root().number == 0.0;
}

/// a * b with literal-zero and literal-one operands elided.
inline Expression product(const Expression& a, const Expression& b) {
  if (is_zero_literal(a) || is_zero_literal(b)) return Expression::number(0.0);
  auto one = [](const Expression& e) { return e.root().kind == ExprNode::Kind::Number && e.root().number == 1.0; };
  if (one(a)) return b;
  if (one(b)) return a;
  return a * b;
}

inline Expression sum(const Expression& a, const Expression& b) {
  if (is_zero_literal(a)) return b;
  if (is_zero_literal(b)) return a;
  return a + b;
}

/// Components of g(T, .) as expressions.
inline std::array<Expression, 3> lower(const MetricExprs& g, const FieldExprs& t) {
  std::array<Expression, 3> out;
  for (int i = 0; i < 3; ++i) {
    Expression s = Expression::number(0.0);
    for (int k = 0; k < 3; ++k) s = sum(s, product(g[i][k], t[k]));
    out[i] = s;
  }
  return out;
}

/// g + coeff * T^b (x) T^b, built by expression composition.
inline Chart add_tt(const Chart& chart, const std::string& field, double coeff, const std::string& suffix) {
  const auto tb = lower(chart.metric, chart.field(field));
  MetricExprs g;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      const Expression tt = product(tb[i], tb[j]);
      Expression e = is_zero_literal(tt) ? chart.metric[i][j]
                                         : chart.metric[i][j] + Expression::number(coeff) * tt;
      g[i][j] = g[j][i] = e;
    }
  return make_chart(chart.name + suffix, chart.coords, chart.domain, g, chart.fields);
}

}  // namespace detail

/// g' = g - 2 g(T,.) (x) g(T,.) for a unit spacelike T; T becomes unit timelike.
inline Chart flip_metric(const Chart& chart, const std::string& field) {
  for (const Vec3& p : probe_grid(chart, 5)) {
    const Vec3 t = field_values(chart, field, p);
    const double n = inner(metric_values(chart, p), t, t);
    if (std::fabs(n - 1.0) > 1e-8)
      throw PreconditionError("field '" + field + "' is not unit spacelike (g(T,T) = " + std::to_string(n) + ")");
  }
  return detail::add_tt(chart, field, -2.0, "_flipped");
}

/// h = g + 2 T^b (x) T^b for a unit timelike T; h is Riemannian with h(T,T) = 1.
inline Chart riemannianize(const Chart& chart, const std::string& field) {
  for (const Vec3& p : probe_grid(chart, 5)) {
    const Vec3 t = field_values(chart, field, p);
    const double n = inner(metric_values(chart, p), t, t);
    if (std::fabs(n + 1.0) > 1e-8)
      throw PreconditionError("field '" + field + "' is not unit timelike (g(T,T) = " + std::to_string(n) + ")");
  }
  Chart h = detail::add_tt(chart, field, 2.0, "_riemannian");
  if (h.signature != Signature::Riemannian) throw PreconditionError("riemannianized metric is not positive definite");
  for (const Vec3& p : probe_grid(h, 5))
    if (negative_eigenvalues(metric_values(h, p)) != 0)
      throw PreconditionError("riemannianized metric is not positive definite on the probe grid");
  return h;
}

namespace detail {

inline Chart chart_from_strings(std::string name, std::array<std::string, 3> coords, std::array<Interval, 3> domain,
                                const std::array<std::string, 6>& g_upper,
                                const std::map<std::string, std::array<std::string, 3>>& fields) {
  MetricExprs g;
  int k = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) g[i][j] = g[j][i] = parse(g_upper[k++], coords);
  std::map<std::string, FieldExprs> fx;
  for (const auto& [fname, comps] : fields)
    fx[fname] = {parse(comps[0], coords), parse(comps[1], coords), parse(comps[2], coords)};
  return make_chart(std::move(name), std::move(coords), domain, g, fx);
}

}  // namespace detail

inline std::vector<std::string> catalog_names() {
  return {"minkowski", "euclidean", "hopf_round", "hopf_lorentz", "product_cylinder"};
}

/// Built-in charts. Hopf coordinates (eta, xi1, xi2) on S^3 keep
/// T = d/dxi1 + d/dxi2 a coordinate field; boxes stay 0.15 away from the
/// coordinate degeneracies.
inline Chart catalog_chart(const std::string& name) {
  constexpr double pi = std::numbers::pi;
  if (name == "minkowski")
    return detail::chart_from_strings("minkowski", {"t", "x", "y"}, {{{-1, 1}, {-1, 1}, {-1, 1}}},
                                      {"-1", "0", "0", "1", "0", "1"},
                                      {{"T", {"1", "0", "0"}}, {"X", {"0", "1", "0"}}});
  if (name == "euclidean")
    return detail::chart_from_strings("euclidean", {"x", "y", "z"}, {{{-1, 1}, {-1, 1}, {-1, 1}}},
                                      {"1", "0", "0", "1", "0", "1"},
                                      {{"T", {"1", "0", "0"}}, {"V", {"x", "0", "0"}}});
  if (name == "hopf_round")
    return detail::chart_from_strings("hopf_round", {"eta", "xi1", "xi2"},
                                      {{{0.15, pi / 2 - 0.15}, {0, 2 * pi}, {0, 2 * pi}}},
                                      {"1", "0", "0", "cos(eta)^2", "0", "sin(eta)^2"},
                                      {{"T", {"0", "1", "1"}}});
  if (name == "hopf_lorentz") {
    Chart c = flip_metric(catalog_chart("hopf_round"), "T");
    c.name = "hopf_lorentz";
    return c;
  }
  if (name == "product_cylinder")
    return detail::chart_from_strings("product_cylinder", {"t", "theta", "phi"},
                                      {{{-1, 1}, {0.15, pi - 0.15}, {0, 2 * pi}}},
                                      {"-1", "0", "0", "1", "0", "sin(theta)^2"}, {{"T", {"1", "0", "0"}}});
  throw ConfigError("unknown catalog chart '" + name + "'");
}

/// Parses the declarative chart format:
///
///   # comment
///   name my_chart
///   coord eta = 0.15 .. pi/2 - 0.15      (three lines, in order)
///   g 0 0 = 1                            (unset entries are 0; g i j sets g j i)
///   g 1 1 = cos(eta)^2
///   field T = 0, 1, 1
///   flip T                               (optional post-processing)
///   riemannianize T
inline Chart parse_chart_config(std::istream& in, const std::string& default_name = "user_chart") {
  std::string name = default_name;
  std::vector<std::string> coords;
  std::vector<Interval> domain;
  std::array<std::array<std::string, 3>, 3> g_text;
  std::array<std::array<int, 3>, 3> g_line{};
  struct FieldText {
    std::string name;
    std::array<std::string, 3> comps;
    int line;
  };
  std::vector<FieldText> field_text;
  std::vector<std::pair<std::string, std::string>> post;  // (op, field)
  std::vector<int> post_line;

  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  };
  auto constant = [&](const std::string& text, int line) {
    try {
      return evaluate<double>(parse(text, std::span<const std::string>{}), std::span<const double>{});
    } catch (const Error& e) {
      throw ConfigError(std::string("bad constant '") + text + "': " + e.what(), line);
    }
  };

  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string text = trim(raw);
    if (text.empty()) continue;
    std::istringstream ls(text);
    std::string keyword;
    ls >> keyword;
    if (keyword == "name") {
      ls >> name;
    } else if (keyword == "coord") {
      const auto eq = text.find('=');
      const auto dots = text.find("..");
      if (eq == std::string::npos || dots == std::string::npos || dots < eq)
        throw ConfigError("expected 'coord NAME = MIN .. MAX'", line);
      const std::string cname = trim(text.substr(5, eq - 5));
      if (cname.empty()) throw ConfigError("missing coordinate name", line);
      if (coords.size() >= 3) throw ConfigError("more than three coordinates", line);
      coords.push_back(cname);
      domain.push_back({constant(trim(text.substr(eq + 1, dots - eq - 1)), line),
                        constant(trim(text.substr(dots + 2)), line)});
      if (!(domain.back().lo < domain.back().hi))
        throw ConfigError("empty domain interval for coordinate '" + cname + "'", line);
    } else if (keyword == "g") {
      int i = -1, j = -1;
      ls >> i >> j;
      const auto eq = text.find('=');
      if (!ls || eq == std::string::npos || i < 0 || i > 2 || j < 0 || j > 2)
        throw ConfigError("expected 'g I J = EXPR' with I, J in 0..2", line);
      if (i > j) std::swap(i, j);
      if (g_line[i][j] != 0) throw ConfigError("metric entry g " + std::to_string(i) + " " + std::to_string(j) + " set twice", line);
      g_text[i][j] = trim(text.substr(eq + 1));
      g_line[i][j] = line;
    } else if (keyword == "field") {
      const auto eq = text.find('=');
      if (eq == std::string::npos) throw ConfigError("expected 'field NAME = E0, E1, E2'", line);
      const std::string fname = trim(text.substr(5, eq - 5));
      std::array<std::string, 3> comps;
      std::string rest = text.substr(eq + 1);
      for (int k = 0; k < 3; ++k) {
        const auto comma = rest.find(',');
        if ((k < 2) == (comma == std::string::npos)) throw ConfigError("field needs exactly three components", line);
        comps[k] = trim(rest.substr(0, comma));
        rest = comma == std::string::npos ? "" : rest.substr(comma + 1);
      }
      field_text.push_back({fname, comps, line});
    } else if (keyword == "flip" || keyword == "riemannianize") {
      std::string fname;
      ls >> fname;
      if (fname.empty()) throw ConfigError("expected '" + keyword + " FIELD'", line);
      post.emplace_back(keyword, fname);
      post_line.push_back(line);
    } else {
      throw ConfigError("unknown keyword '" + keyword + "'", line);
    }
  }
  if (coords.size() != 3) throw ConfigError("exactly three 'coord' lines are required");

  std::array<std::string, 3> cs{coords[0], coords[1], coords[2]};
  MetricExprs g;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      if (g_line[i][j] == 0) {
        g[i][j] = g[j][i] = Expression::number(0.0);
        continue;
      }
      try {
        g[i][j] = g[j][i] = parse(g_text[i][j], cs);
      } catch (const ParseError& e) {
        throw ConfigError(e.what(), g_line[i][j]);
      }
    }
  std::map<std::string, FieldExprs> fields;
  for (const auto& ft : field_text) {
    FieldExprs fx;
    for (int k = 0; k < 3; ++k) {
      try {
        fx[k] = parse(ft.comps[k], cs);
      } catch (const ParseError& e) {
        throw ConfigError("field '" + ft.name + "': " + e.what(), ft.line);
      }
    }
    fields[ft.name] = fx;
  }
  Chart chart;
  try {
    chart = make_chart(name, cs, {domain[0], domain[1], domain[2]}, g, fields);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  for (std::size_t k = 0; k < post.size(); ++k) {
    try {
      chart = post[k].first == "flip" ? flip_metric(chart, post[k].second) : riemannianize(chart, post[k].second);
      chart.name = name;
    } catch (const Error& e) {
      throw ConfigError(e.what(), post_line[k]);
    }
  }
  return chart;
}

inline Chart load_chart_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open chart config '" + path + "'");
  return parse_chart_config(in);
}

}  // namespace npgeo
