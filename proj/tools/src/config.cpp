#include "mixtype_cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "mixtype/errors.hpp"

namespace mixtype::cli {

namespace {

constexpr std::pair<Scenario, std::string_view> kScenarios[] = {
    {Scenario::EllipticOnly, "elliptic-only"},     {Scenario::HyperbolicOnly, "hyperbolic-only"},
    {Scenario::CompositeLinear, "composite-linear"}, {Scenario::Counterexample, "counterexample"},
    {Scenario::NashMoser, "nash-moser"},           {Scenario::VerificationSuite, "verification-suite"},
};

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
T parse_number(std::string_view s) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) throw Error(ErrorKind::Config, "not a number: '" + std::string(s) + "'");
  return v;
}

bool parse_bool(std::string_view s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw Error(ErrorKind::Config, "expected true or false, got '" + std::string(s) + "'");
}

std::vector<double> parse_list(std::string_view s) {
  std::vector<double> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    out.push_back(parse_number<double>(trim(s.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  if (out.empty()) throw Error(ErrorKind::Config, "empty list");
  return out;
}

struct Key {
  std::string section, name, doc;
  std::function<void(RunConfig&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <class T>
Key field(const char* section, const char* name, T RunConfig::*m, const char* doc) {
  Key k{section, name, doc, {}, {}};
  k.set = [m](RunConfig& c, std::string_view v) {
    if constexpr (std::is_same_v<T, double> || std::is_same_v<T, int> || std::is_same_v<T, unsigned>)
      c.*m = parse_number<T>(v);
    else if constexpr (std::is_same_v<T, bool>)
      c.*m = parse_bool(v);
    else if constexpr (std::is_same_v<T, std::string>)
      c.*m = std::string(v);
    else
      c.*m = parse_list(v);
  };
  k.get = [m](const RunConfig& c) -> std::string {
    if constexpr (std::is_same_v<T, double>)
      return number(c.*m);
    else if constexpr (std::is_same_v<T, int> || std::is_same_v<T, unsigned>)
      return std::to_string(c.*m);
    else if constexpr (std::is_same_v<T, bool>)
      return c.*m ? "true" : "false";
    else if constexpr (std::is_same_v<T, std::string>)
      return c.*m;
    else {
      std::string s;
      for (double v : c.*m) s += (s.empty() ? "" : ",") + number(v);
      return s;
    }
  };
  return k;
}

const std::vector<Key>& schema() {
  static const std::vector<Key> keys = [] {
    std::vector<Key> k;
    Key sc{"", "scenario", "elliptic-only | hyperbolic-only | composite-linear | counterexample | nash-moser | verification-suite", {}, {}};
    sc.set = [](RunConfig& c, std::string_view v) { c.scenario = parse_scenario(v); };
    sc.get = [](const RunConfig& c) { return std::string(scenario_name(c.scenario)); };
    k.push_back(sc);
    k.push_back(field("grid", "h", &RunConfig::h, "grid spacing"));
    k.push_back(field("grid", "radius_inner", &RunConfig::radius_inner, "radius of B_1 (solution reported here)"));
    k.push_back(field("grid", "radius_outer", &RunConfig::radius_outer, "radius of B_2 (elliptic outer boundary)"));
    k.push_back(field("problem", "preset", &RunConfig::preset, "tricomi_cross (K = x^2 - y^2) | reversed (K = y^2 - x^2) | custom"));
    k.push_back(field("problem", "K", &RunConfig::K, "K(x, y) for preset custom"));
    k.push_back(field("problem", "gamma1", &RunConfig::gamma1, "decreasing curve y = gamma1(x) for preset custom"));
    k.push_back(field("problem", "gamma2", &RunConfig::gamma2, "increasing curve y = gamma2(x) for preset custom"));
    k.push_back(field("problem", "a", &RunConfig::a, "a(x, y) in a K u_xx"));
    k.push_back(field("problem", "b1", &RunConfig::b1, "b1(x, y)"));
    k.push_back(field("problem", "b2", &RunConfig::b2, "b2(x, y)"));
    k.push_back(field("problem", "c", &RunConfig::c, "c(x, y)"));
    k.push_back(field("data", "kind", &RunConfig::data, "zero | manufactured (f, g from exact) | expression (f, g given)"));
    k.push_back(field("data", "exact", &RunConfig::exact, "manufactured solution u*(x, y)"));
    k.push_back(field("data", "f", &RunConfig::f, "right-hand side for kind expression"));
    k.push_back(field("data", "g", &RunConfig::g, "data on the curves for kind expression"));
    k.push_back(field("data", "tolerance", &RunConfig::tolerance, "relative L2 error bound asserted for manufactured runs"));
    k.push_back(field("solver", "delta_schedule", &RunConfig::delta_schedule, "elliptic regularization, decreasing"));
    k.push_back(field("solver", "epsilon_schedule", &RunConfig::epsilon_schedule, "hyperbolic regularization, decreasing"));
    k.push_back(field("solver", "cfl", &RunConfig::cfl, "CFL safety factor of the march"));
    k.push_back(field("solver", "enforce_invariants", &RunConfig::enforce_invariants, "reject coefficients failing the invariant checks"));
    k.push_back(field("solver", "compat_order", &RunConfig::compat_order, "corner conditions reported"));
    k.push_back(field("solver", "compat_gate", &RunConfig::compat_gate, "corner conditions enforced"));
    k.push_back(field("solver", "trace_compat_factor", &RunConfig::trace_compat_factor, "graded corner tolerance factor"));
    k.push_back(field("solver", "glue_factor", &RunConfig::glue_factor, "glue defect threshold factor (times h^2 max|u|)"));
    k.push_back(field("hyperbolic", "x_extent", &RunConfig::x_extent, "march box |x| <= x_extent"));
    k.push_back(field("hyperbolic", "y_top", &RunConfig::y_top, "march box top"));
    k.push_back(field("hyperbolic", "dy", &RunConfig::dy, "level spacing; 0 picks it from the CFL factor"));
    k.push_back(field("hyperbolic", "allow_unstable", &RunConfig::allow_unstable, "flag instability instead of failing"));
    k.push_back(field("hyperbolic", "energy_bound", &RunConfig::energy_bound, "asserted bound on max/min of the energy over levels"));
    k.push_back(field("counterexample", "force", &RunConfig::force, "march the reversed region anyway and report the outcome"));
    k.push_back(field("nashmoser", "epsilon", &RunConfig::epsilon, "scaling parameter"));
    k.push_back(field("nashmoser", "psi", &RunConfig::psi, "psi(x, y, u, p1, p2)"));
    k.push_back(field("nashmoser", "psi_lower", &RunConfig::psi_lower, "lower bound of psi"));
    k.push_back(field("nashmoser", "theta0", &RunConfig::theta0, "first smoothing cutoff (cycles per unit length)"));
    k.push_back(field("nashmoser", "theta_growth", &RunConfig::theta_growth, "cutoff growth per level"));
    k.push_back(field("nashmoser", "max_levels", &RunConfig::max_levels, "corrections"));
    k.push_back(field("nashmoser", "target", &RunConfig::target, "stop when the residual falls below target times the first"));
    k.push_back(field("nashmoser", "s0", &RunConfig::s0, "Sobolev order of the residual norm"));
    k.push_back(field("nashmoser", "s1", &RunConfig::s1, "Sobolev order reported for w"));
    k.push_back(field("nashmoser", "work_radius", &RunConfig::work_radius, "w is solved for on this disk"));
    k.push_back(field("nashmoser", "taper", &RunConfig::taper, "fade-out width of the extension"));
    k.push_back(field("nashmoser", "reflection", &RunConfig::reflection, "smooth | even extension across the work disk"));
    k.push_back(field("nashmoser", "halving", &RunConfig::halving, "halve epsilon on stagnation"));
    k.push_back(field("nashmoser", "stagnation_levels", &RunConfig::stagnation_levels, "levels without decrease before stagnation"));
    k.push_back(field("nashmoser", "max_halvings", &RunConfig::max_halvings, "epsilon halvings allowed"));
    k.push_back(field("nashmoser", "decay_bound", &RunConfig::decay_bound, "asserted bound on the last over the first residual"));
    k.push_back(field("verification", "seed", &RunConfig::seed, "seed of the randomized checks"));
    k.push_back(field("output", "dir", &RunConfig::out, "output directory"));
    return k;
  }();
  return keys;
}

Curve curve(const std::string& text) { return Curve::analytic(Expr::parse(text)); }

}  // namespace

std::string_view scenario_name(Scenario s) {
  for (const auto& [k, n] : kScenarios)
    if (k == s) return n;
  return "unknown";
}

Scenario parse_scenario(std::string_view name) {
  for (const auto& [k, n] : kScenarios)
    if (n == name) return k;
  throw Error(ErrorKind::Config, "unknown scenario '" + std::string(name) + "'");
}

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::string section;
  std::set<std::string> seen;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto where = [&] { return "line " + std::to_string(line_no) + ": "; };
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorKind::Config, where() + "malformed section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      bool known = false;
      for (const Key& k : schema()) known = known || (!section.empty() && k.section == section);
      if (!known) throw Error(ErrorKind::Config, where() + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorKind::Config, where() + "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const Key* match = nullptr;
    for (const Key& k : schema())
      if (k.section == section && k.name == key) match = &k;
    if (!match)
      throw Error(ErrorKind::Config, where() + "unknown key '" + key + "'" + (section.empty() ? "" : " in [" + section + "]"));
    if (!seen.insert(section + "." + key).second) throw Error(ErrorKind::Config, where() + "repeated key '" + key + "'");
    try {
      match->set(c, value);
    } catch (const Error& e) {
      std::string_view msg = e.what();
      msg.remove_prefix(std::min(msg.size(), error_name(e.kind()).size() + 2));
      throw Error(ErrorKind::Config, where() + key + ": " + std::string(msg));
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Config, "cannot read config file " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return parse_config(s.str());
}

std::string config_schema() {
  const RunConfig d;
  std::string out;
  std::string section = "-";
  for (const Key& k : schema()) {
    if (k.section != section) {
      section = k.section;
      out += section.empty() ? "  (top level)\n" : "  [" + section + "]\n";
    }
    out += "    " + k.name + " = " + k.get(d) + "\n        " + k.doc + "\n";
  }
  return out;
}

std::vector<std::pair<std::string, std::string>> RunConfig::echo() const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Key& k : schema()) out.emplace_back(k.section.empty() ? k.name : k.section + "." + k.name, k.get(*this));
  return out;
}

DomainSpec RunConfig::domain() const {
  DomainSpec s = cross_domain(radius_inner, radius_outer);
  if (preset == "custom") {
    s.gamma1 = curve(gamma1);
    s.gamma2 = curve(gamma2);
  } else if (preset != "tricomi_cross" && preset != "reversed") {
    throw Error(ErrorKind::Config, "unknown preset '" + preset + "'");
  }
  return s;
}

CoefficientSet RunConfig::coefficients() const {
  CoefficientSet cs;
  if (preset == "tricomi_cross")
    cs.K = ScalarField::parse("x^2 - y^2");
  else if (preset == "reversed")
    cs.K = ScalarField::parse("y^2 - x^2");
  else if (preset == "custom")
    cs.K = ScalarField::parse(K);
  else
    throw Error(ErrorKind::Config, "unknown preset '" + preset + "'");
  cs.a = ScalarField::parse(a);
  cs.b1 = ScalarField::parse(b1);
  cs.b2 = ScalarField::parse(b2);
  cs.c = ScalarField::parse(c);
  if (data == "zero")
    cs.f = ScalarField();
  else if (data == "expression")
    cs.f = ScalarField::parse(f);
  else if (data == "manufactured")
    cs.f = manufacture_linear(ScalarField::parse(exact), cs);
  else
    throw Error(ErrorKind::Config, "unknown data kind '" + data + "'");
  return cs;
}

CompositeOptions RunConfig::composite_options() const {
  CompositeOptions o;
  o.h = h;
  o.delta_schedule = delta_schedule;
  o.epsilon_schedule = epsilon_schedule;
  o.cfl = cfl;
  o.enforce_invariants = enforce_invariants;
  o.compat_order = compat_order;
  o.compat_gate = compat_gate;
  o.trace_compat_factor = trace_compat_factor;
  o.glue_factor = glue_factor;
  if (data == "manufactured")
    o.dirichlet = ScalarField::parse(exact);
  else if (data == "expression")
    o.dirichlet = ScalarField::parse(g);
  return o;
}

NonlinearProblem RunConfig::nonlinear_problem() const {
  NonlinearProblem p;
  p.psi = Expr::parse(psi);
  p.psi_lower = psi_lower;
  p.K = coefficients().K;
  p.spec = domain();
  return p;
}

NashMoserConfig RunConfig::nashmoser_config() const {
  NashMoserConfig n;
  n.h = h;
  n.s0 = s0;
  n.s1 = s1;
  n.theta0 = theta0;
  n.theta_growth = theta_growth;
  n.max_levels = max_levels;
  n.target = target;
  n.stagnation_levels = stagnation_levels;
  n.max_halvings = max_halvings;
  n.work_radius = work_radius;
  n.taper = taper;
  if (reflection == "smooth")
    n.reflection = Reflection::Smooth;
  else if (reflection == "even")
    n.reflection = Reflection::Even;
  else
    throw Error(ErrorKind::Config, "unknown reflection '" + reflection + "'");
  n.linear.delta_schedule = delta_schedule;
  n.linear.epsilon_schedule = epsilon_schedule;
  n.linear.cfl = cfl;
  return n;
}

}  // namespace mixtype::cli
