#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mixtype/composite.hpp"
#include "mixtype/nashmoser.hpp"

namespace mixtype::cli {

enum class Scenario { EllipticOnly, HyperbolicOnly, CompositeLinear, Counterexample, NashMoser, VerificationSuite };

std::string_view scenario_name(Scenario s);
/// Throws Config for an unknown name.
Scenario parse_scenario(std::string_view name);

/// A run configuration. Every field has a default; the text form is
/// line-based `key = value` under `[section]` headers, with `scenario` at the
/// top. See config_schema() for the keys.
struct RunConfig {
  Scenario scenario = Scenario::CompositeLinear;

  // [grid]
  double h = 1.0 / 64;
  double radius_inner = 1.0;
  double radius_outer = 2.0;

  // [problem]
  std::string preset = "tricomi_cross";  // tricomi_cross | reversed | custom
  std::string K = "x^2 - y^2";            // custom only
  std::string gamma1 = "-x", gamma2 = "x";  // custom only
  std::string a = "1", b1 = "0", b2 = "0", c = "0";

  // [data]
  std::string data = "zero";  // zero | manufactured | expression
  std::string exact = "(x^2 - y^2)*exp(x*y)";
  std::string f = "0";
  std::string g = "0";
  double tolerance = 1e-2;  // relative L2 error bound for manufactured runs

  // [solver]
  std::vector<double> delta_schedule{1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<double> epsilon_schedule{1e-2, 1e-3, 1e-4, 1e-5};
  double cfl = 0.8;
  bool enforce_invariants = true;
  int compat_order = 4;
  int compat_gate = 3;
  double trace_compat_factor = 50.0;
  double glue_factor = 50.0;

  // [hyperbolic]
  double x_extent = 1.0;
  double y_top = 1.0;
  double dy = 0.0;
  bool allow_unstable = false;
  double energy_bound = 10.0;

  // [counterexample]
  bool force = true;

  // [nashmoser]
  double epsilon = 0.05;
  std::string psi = "1";
  double psi_lower = 1.0;
  double theta0 = 4.0;
  double theta_growth = 2.0;
  int max_levels = 3;
  double target = 1e-3;
  int s0 = 2, s1 = 2;
  double work_radius = 2.0;
  double taper = 0.5;
  std::string reflection = "smooth";  // smooth | even
  bool halving = true;
  int stagnation_levels = 3;
  int max_halvings = 3;
  double decay_bound = 0.1;

  // [verification]
  unsigned seed = 20240611;

  // [output]
  std::string out = "mixtype-out";

  CoefficientSet coefficients() const;
  DomainSpec domain() const;
  CompositeOptions composite_options() const;
  NonlinearProblem nonlinear_problem() const;
  NashMoserConfig nashmoser_config() const;

  /// Every key as "section.key" -> value text, in schema order.
  std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Parses the text form; unknown sections, unknown keys, repeated keys and
/// malformed values are Config errors naming the line.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

/// One line per key: section, key, default, description.
std::string config_schema();

}  // namespace mixtype::cli
