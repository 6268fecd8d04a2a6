#include "mixtype_cli/run.hpp"

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>

#include "mixtype/errors.hpp"
#include "mixtype/version.hpp"
#include "mixtype_cli/verification.hpp"

namespace mixtype::cli {

namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

struct Assertion {
  std::string name;
  bool pass = true;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
};

// Collects everything a scenario produces.
struct Context {
  const RunConfig& config;
  std::ostream& log;
  std::filesystem::path dir;
  std::vector<Assertion> assertions;
  json diagnostics = json::object();
  json files = json::array();
  json timing = json::object();
  Clock::time_point t0 = Clock::now();

  Context(const RunConfig& c, std::ostream& l) : config(c), log(l), dir(c.out) {}

  std::string path(const std::string& name) {
    files.push_back(name);
    return (dir / name).string();
  }
  void check(std::string name, bool pass, double value, double bound, std::string detail = {}) {
    log << (pass ? "  ok    " : "  FAIL  ") << name << "\n";
    assertions.push_back({std::move(name), pass, value, bound, std::move(detail)});
  }
  void stage(const std::string& name) {
    timing[name] = std::chrono::duration<double>(Clock::now() - t0).count();
    t0 = Clock::now();
  }
};

using File = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

File open_csv(const std::string& path, const char* header) {
  File f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw Error(ErrorKind::Config, "cannot write " + path);
  std::fputs(header, f.get());
  return f;
}

void write_energy(const EnergyLedger& e, const std::string& path) {
  File f = open_csv(path, "y,E,E_weighted\n");
  for (std::size_t k = 0; k < e.y.size(); ++k)
    std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", e.y[k], e.unweighted[k], e.weighted[k]);
}

void write_json(const json& j, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorKind::Config, "cannot write " + path);
  f << j.dump(2) << "\n";
}

// NaN and infinity are not JSON numbers
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json to_json(const CompatReport& r) {
  json j;
  j["order"] = r.order;
  j["residuals"] = r.residuals;
  json tols = json::array();
  for (double t : r.tols) tols.push_back(num(t));
  j["tolerances"] = tols;
  j["pass"] = r.pass;
  j["scale"] = r.scale;
  j["ok"] = r.ok();
  return j;
}

json to_json(const std::vector<InvariantCheck>& checks) {
  json a = json::array();
  for (const InvariantCheck& c : checks) a.push_back({{"name", c.name}, {"pass", c.pass}, {"worst", c.worst}, {"nodes", c.nodes}});
  return a;
}

json to_json(const GlueDefect& g) {
  return {{"value_jump", g.value_jump}, {"slope_jump", g.slope_jump}, {"threshold", g.threshold},
          {"columns", g.columns}, {"pass", g.pass}};
}

json to_json(const EllipticSolution& s) {
  json solves = json::array();
  for (const LinearSolveStats& st : s.solves)
    solves.push_back({{"method", st.method}, {"iterations", st.iterations},
                      {"relative_residual", st.relative_residual}, {"unknowns", st.unknowns}});
  return {{"deltas", s.deltas}, {"gaps", s.gaps}, {"linf", s.linf}, {"solves", solves},
          {"psi_corner", s.psi_corner}, {"trace_x_max", s.trace_x_max}};
}

json to_json(const DegenerateSolution& d) {
  json runs = json::array();
  for (const MarchResult& r : d.runs)
    runs.push_back({{"dy", r.dy}, {"courant", r.courant}, {"levels", r.levels}, {"data_scale", r.data_scale},
                    {"max_level_norm", r.max_level_norm}});
  return {{"epsilons", d.epsilons}, {"gaps", d.gaps}, {"energy_mu", d.energy.mu}, {"runs", runs}};
}

double rel_error(const GridFunction& u, const ScalarField& exact) {
  double e = 0.0, n = 0.0;
  const Grid2D& g = u.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!u.defined(i, j)) continue;
      const double ex = exact(g.x(i), g.y(j)), d = u(i, j) - ex;
      e += d * d;
      n += ex * ex;
    }
  return n > 0.0 ? std::sqrt(e / n) : std::sqrt(e);
}

void check_manufactured(Context& ctx, const GridFunction& u) {
  if (ctx.config.data != "manufactured") return;
  const double e = rel_error(u, ScalarField::parse(ctx.config.exact));
  ctx.diagnostics["relative_l2_error"] = e;
  ctx.check("manufactured relative L2 error", e <= ctx.config.tolerance, e, ctx.config.tolerance);
}

void check_zero(Context& ctx, const GridFunction& u) {
  if (ctx.config.data != "zero") return;
  const double m = u.max_abs();
  ctx.check("zero data gives zero solution", m <= 1e-12, m, 1e-12);
}

double energy_spread(const EnergyLedger& e) {
  if (e.unweighted.empty()) return 1.0;
  const auto [mn, mx] = std::minmax_element(e.unweighted.begin(), e.unweighted.end());
  if (*mx == 0.0) return 1.0;
  return *mn > 0.0 ? *mx / *mn : std::numeric_limits<double>::infinity();
}

void elliptic_only(Context& ctx) {
  const RunConfig& c = ctx.config;
  const DomainSpec spec = c.domain();
  spec.validate();
  const CoefficientSet coeffs = c.coefficients();
  EllipticProblem p{spec, build_region_map(spec, Grid2D::covering(spec.radius_outer, c.h), coeffs.K), coeffs,
                    c.composite_options().dirichlet, c.delta_schedule};
  ctx.stage("region_map");
  const std::vector<InvariantCheck> inv = check_invariants(p.coeffs, p.map, p.spec.kappa_upper(), p.spec.kappa_lower());
  ctx.diagnostics["invariants"] = to_json(inv);
  if (c.enforce_invariants)
    for (const InvariantCheck& ic : inv) ctx.check("invariant " + ic.name, ic.pass, ic.worst, 0.0);
  const EllipticSolution s = continue_to_degenerate(p);
  ctx.stage("elliptic");
  ctx.diagnostics["elliptic"] = to_json(s);
  json ratios = json::array();
  for (int m = 0; m <= 2; ++m) ratios.push_back({{"m", m}, {"ratio", num(estimate_ratio(s, p.coeffs.f, m))}});
  ctx.diagnostics["estimate_ratios"] = ratios;
  p.map.write_csv(ctx.path("region_map.csv"));
  s.u.write_csv(ctx.path("u_elliptic.csv"));
  check_manufactured(ctx, s.u);
  check_zero(ctx, s.u);
}

void hyperbolic_only(Context& ctx) {
  const RunConfig& c = ctx.config;
  // only the upper curve is used; the march checks that it is space-like
  const DomainSpec spec = c.domain();
  HyperbolicProblem p;
  p.coeffs = c.coefficients();
  const Curve kappa = spec.kappa_upper();
  if (c.data == "zero") {
    p.trace = CauchyTrace{kappa, Trace(), Trace()};
  } else {
    const ScalarField u = ScalarField::parse(c.data == "manufactured" ? c.exact : c.g);
    p.trace = CauchyTrace{kappa, Trace::from_field(u, kappa, false), Trace::from_field(u, kappa, true)};
  }
  p.grid = Grid2D::covering(std::max(c.x_extent, c.y_top) + 0.2, c.h);
  p.x_lo = -c.x_extent;
  p.x_hi = c.x_extent;
  p.y_top = c.y_top;
  p.epsilon_schedule = c.epsilon_schedule;
  p.cfl = c.cfl;
  p.dy = c.dy;
  p.allow_unstable = c.allow_unstable;

  GridFunction u;
  EnergyLedger energy;
  if (c.allow_unstable) {
    // a single march at the last epsilon, so the instability flag is reported rather than raised
    const MarchResult r = march(p, c.epsilon_schedule.back());
    ctx.diagnostics["march"] = {{"dy", r.dy}, {"courant", r.courant}, {"levels", r.levels}, {"unstable", r.unstable},
                                {"max_level_norm", r.max_level_norm}, {"data_scale", r.data_scale}};
    ctx.check("march stable", !r.unstable, r.courant, 1.0);
    u = r.u;
    energy = r.energy;
  } else {
    const DegenerateSolution s = solve_degenerate(p);
    ctx.diagnostics["hyperbolic"] = to_json(s);
    ctx.diagnostics["loss_ratio_m1"] = num(loss_ratio(s.u, p, 1));
    u = s.u;
    energy = s.energy;
  }
  ctx.stage("hyperbolic");
  const double spread = energy_spread(energy);
  ctx.diagnostics["energy_max_over_min"] = num(spread);
  // with a source term the energy may grow; the bound is asserted for the homogeneous equation
  if (p.coeffs.f.is_zero()) ctx.check("energy bounded", spread <= c.energy_bound, spread, c.energy_bound);
  u.write_csv(ctx.path("u_hyperbolic.csv"));
  write_energy(energy, ctx.path("energy.csv"));
  check_manufactured(ctx, u);
  check_zero(ctx, u);
}

void composite_linear(Context& ctx) {
  const RunConfig& c = ctx.config;
  const CompositeRun r = solve_linear_mixed(c.domain(), c.coefficients(), c.composite_options());
  ctx.stage("composite");
  json& d = ctx.diagnostics;
  d["orientation"] = {{"pass", r.orientation.pass}, {"checked", r.orientation.checked}, {"failed", r.orientation.failed}};
  d["invariants"] = to_json(r.invariants);
  d["elliptic"] = to_json(r.elliptic);
  d["compat_upper"] = to_json(r.compat_up);
  d["compat_lower"] = to_json(r.compat_down);
  d["hyperbolic_upper"] = to_json(r.up);
  d["hyperbolic_lower"] = to_json(r.down);
  d["glue_upper"] = to_json(r.glue_up);
  d["glue_lower"] = to_json(r.glue_down);
  json est = json::array();
  for (const EstimateRow& row : verify_estimate(r, 2))
    est.push_back({{"s", row.s}, {"norm_u", row.norm_u}, {"norm_f", row.norm_f}, {"ratio", num(row.ratio)}});
  d["estimate_table"] = est;
  ctx.stage("estimate");

  ctx.check("corner conditions (upper)", r.compat_up.ok(), r.compat_up.residuals.empty() ? 0.0 : r.compat_up.residuals[0],
            r.compat_up.tol);
  ctx.check("corner conditions (lower)", r.compat_down.ok(),
            r.compat_down.residuals.empty() ? 0.0 : r.compat_down.residuals[0], r.compat_down.tol);
  ctx.check("glue defect (upper)", r.glue_up.pass, std::max(r.glue_up.value_jump, r.glue_up.slope_jump), r.glue_up.threshold);
  ctx.check("glue defect (lower)", r.glue_down.pass, std::max(r.glue_down.value_jump, r.glue_down.slope_jump),
            r.glue_down.threshold);
  check_manufactured(ctx, r.u_global);
  check_zero(ctx, r.u_global);

  r.map.write_csv(ctx.path("region_map.csv"));
  r.u_global.write_csv(ctx.path("u.csv"));
  r.elliptic.u.write_csv(ctx.path("u_elliptic.csv"));
  write_energy(r.up.energy, ctx.path("energy_upper.csv"));
  write_energy(r.down.energy, ctx.path("energy_lower.csv"));
  File f = open_csv(ctx.path("convergence.csv"), "stage,parameter,gap\n");
  for (std::size_t k = 0; k < r.elliptic.gaps.size(); ++k)
    std::fprintf(f.get(), "elliptic,%.17g,%.17g\n", r.elliptic.deltas[k + 1], r.elliptic.gaps[k]);
  for (const auto* s : {&r.up, &r.down})
    for (std::size_t k = 0; k < s->gaps.size(); ++k)
      std::fprintf(f.get(), "%s,%.17g,%.17g\n", s == &r.up ? "hyperbolic_upper" : "hyperbolic_lower", s->epsilons[k + 1],
                   s->gaps[k]);
}

void counterexample(Context& ctx) {
  const RunConfig& c = ctx.config;
  const DomainSpec spec = c.domain();
  const CoefficientSet coeffs = c.coefficients();
  const FailureReport rep = demonstrate_failure_mode(spec, coeffs, c.h, c.force);
  ctx.stage("counterexample");
  ctx.log << "  failure_mode: " << rep.failure_mode << "\n";
  ctx.diagnostics["failure_mode"] = rep.failure_mode;
  ctx.diagnostics["orientation"] = {{"pass", rep.orientation.pass}, {"checked", rep.orientation.checked},
                                    {"failed", rep.orientation.failed}};
  ctx.diagnostics["forced"] = rep.forced;
  ctx.diagnostics["forced_outcome"] = rep.forced_outcome;
  ctx.diagnostics["forced_growth"] = num(rep.forced_growth);
  build_region_map(spec, Grid2D::covering(spec.radius_outer, c.h), coeffs.K).write_csv(ctx.path("region_map.csv"));
}

void nash_moser(Context& ctx) {
  const RunConfig& c = ctx.config;
  const NonlinearProblem p = c.nonlinear_problem();
  p.validate();
  const NashMoserConfig nm = c.nashmoser_config();
  const NashMoserState s = c.halving ? iterate(p, c.epsilon, nm) : iterate_fixed(p, c.epsilon, nm);
  ctx.stage("nash_moser");

  json hist = json::array();
  File f = open_csv(ctx.path("residual_history.csv"),
                    "level,theta,residual_h2,residual_l2,residual_max,w_norm,rho_norm,quadratic_constant,split_constant\n");
  for (const LevelRecord& l : s.history) {
    hist.push_back({{"level", l.level}, {"theta", l.theta}, {"residual_h2", l.residual}, {"residual_l2", l.residual_l2},
                    {"residual_max", l.residual_max}, {"w_norm", l.w_norm}, {"rho_norm", l.rho_norm},
                    {"quadratic_error", l.quadratic_error}, {"quadratic_constant", num(l.quadratic_constant)},
                    {"split_defect", l.split_defect}, {"split_constant", num(l.split_constant)},
                    {"det_identity_defect", l.det_identity_defect}, {"max_shift", l.max_shift}, {"max_b12", l.max_b12},
                    {"max_a_dev", l.max_a_dev}, {"compat_worst", num(l.compat_worst)}, {"glue_worst", num(l.glue_worst)}});
    std::fprintf(f.get(), "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", l.level, l.theta, l.residual,
                 l.residual_l2, l.residual_max, l.w_norm, l.rho_norm, l.quadratic_constant, l.split_constant);
  }
  f.reset();
  const json history{{"epsilon", s.epsilon}, {"halvings", s.halvings}, {"levels", hist}};
  write_json(history, ctx.path("residual_history.json"));
  ctx.diagnostics["residual_history"] = history;
  ctx.diagnostics["unscaled_residual"] = s.unscaled_residual;
  ctx.diagnostics["unscaled_from_F"] = s.unscaled_from_F;
  ctx.diagnostics["notes"] = s.notes;
  s.w.write_csv(ctx.path("w.csv"));
  s.u.write_csv(ctx.path("u_unscaled.csv"));

  const double decay = s.history.size() > 1 ? s.history.back().residual / s.history.front().residual : 1.0;
  ctx.diagnostics["decay"] = num(decay);
  ctx.check("residual decay", decay <= c.decay_bound, decay, c.decay_bound);
}

void verification_suite(Context& ctx) {
  json checks = json::array();
  const std::vector<CheckResult> results = run_verification(ctx.config, [&](const CheckResult& r) {
    ctx.log << "  [" << r.id << "] " << r.name << ": " << (r.pass ? "pass" : "FAIL") << " (" << r.detail << ")\n";
  });
  for (const CheckResult& r : results) {
    json values = json::object();
    for (const auto& [k, v] : r.values) values[k] = num(v);
    checks.push_back({{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"values", values}});
    ctx.assertions.push_back({"check " + std::to_string(r.id) + ": " + r.name, r.pass, 0.0, 0.0, r.detail});
    ctx.timing["check_" + std::to_string(r.id)] = r.seconds;
  }
  ctx.diagnostics["checks"] = checks;
  // the manufactured convergence pair of check 1
  File f = open_csv(ctx.path("convergence.csv"), "h,relative_l2_error\n");
  std::fprintf(f.get(), "%.17g,%.17g\n", 1.0 / 64, results[0].value("rel_l2_h64"));
  std::fprintf(f.get(), "%.17g,%.17g\n", 1.0 / 128, results[0].value("rel_l2_h128"));
}

}  // namespace

int requested_threads() {
  const char* v = std::getenv("MIXTYPE_THREADS");
  if (!v || !*v) return 1;
  int n = 0;
  const std::string_view s(v);
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || p != s.data() + s.size() || n < 1)
    throw Error(ErrorKind::Config, "MIXTYPE_THREADS must be a positive integer, got '" + std::string(s) + "'");
  return n;
}

int run(const RunConfig& config, std::ostream& log) {
  Context ctx(config, log);
  json report;
  report["scenario"] = scenario_name(config.scenario);
  report["version"] = version();
  json deps = json::object();
  for (const auto& [k, v] : dependency_versions()) deps[k] = v;
  report["dependencies"] = deps;
  json echo = json::object();
  for (const auto& [k, v] : config.echo()) echo[k] = v;
  report["config"] = echo;

  int code = 0;
  json error = nullptr;
  const auto start = Clock::now();
  try {
    const int threads = requested_threads();
    report["threads"] = {{"requested", threads}, {"used", 1}};
    std::filesystem::create_directories(ctx.dir);
    log << "mixtype " << version() << ": " << scenario_name(config.scenario) << " -> " << ctx.dir.string() << "\n";
    switch (config.scenario) {
      case Scenario::EllipticOnly: elliptic_only(ctx); break;
      case Scenario::HyperbolicOnly: hyperbolic_only(ctx); break;
      case Scenario::CompositeLinear: composite_linear(ctx); break;
      case Scenario::Counterexample: counterexample(ctx); break;
      case Scenario::NashMoser: nash_moser(ctx); break;
      case Scenario::VerificationSuite: verification_suite(ctx); break;
    }
    for (const Assertion& a : ctx.assertions)
      if (!a.pass) code = 1;
  } catch (const Error& e) {
    code = exit_code(e.kind());
    error = {{"kind", error_name(e.kind())}, {"message", e.what()}};
    log << "  error: " << e.what() << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    code = exit_code(ErrorKind::Config);
    error = {{"kind", error_name(ErrorKind::Config)}, {"message", e.what()}};
    log << "  error: " << e.what() << "\n";
  }

  json asserts = json::array();
  for (const Assertion& a : ctx.assertions) {
    json j{{"name", a.name}, {"pass", a.pass}};
    if (a.bound != 0.0 || a.value != 0.0) {
      j["value"] = num(a.value);
      j["bound"] = num(a.bound);
    }
    if (!a.detail.empty()) j["detail"] = a.detail;
    asserts.push_back(j);
  }
  report["assertions"] = asserts;
  report["diagnostics"] = ctx.diagnostics;
  report["error"] = error;
  report["exit_code"] = code;
  ctx.timing["total"] = std::chrono::duration<double>(Clock::now() - start).count();
  report["files"] = ctx.files;

  std::error_code ec;
  std::filesystem::create_directories(ctx.dir, ec);
  if (!ec) {
    write_json(report, (ctx.dir / "report.json").string());
    write_json(ctx.timing, (ctx.dir / "timing.json").string());
  } else {
    log << "  cannot create " << ctx.dir.string() << ": " << ec.message() << "\n";
    if (code == 0) code = exit_code(ErrorKind::Config);
  }
  log << "exit " << code << "\n";
  return code;
}

std::string help_epilog() {
  std::string s =
      "Scenarios:\n"
      "  elliptic-only, hyperbolic-only, composite-linear, counterexample, nash-moser, verification-suite\n\n"
      "Exit codes:\n"
      "  0  all assertions passed\n"
      "  1  an assertion failed (see report.json)\n"
      "  2  ConfigError, ExpressionError\n"
      "  3  TransversalityViolation, CoverageError, OrientationFailure\n"
      "  4  MaskTooThin, DivisionByDegeneracy\n"
      "  5  SolverDivergence, MaximumPrincipleViolation, ContinuationStall, SingularSystem\n"
      "  6  CharacteristicCorner, IncompatibleData\n"
      "  7  SpaceLikeViolation, CFLViolation, InstabilityDetected\n"
      "  8  GlueDefectExceeded\n"
      "  9  TransformDegenerate, ResidualStagnation\n\n"
      "Environment:\n"
      "  MIXTYPE_THREADS  positive integer; recorded in the report (the solvers are single-threaded)\n\n"
      "Config file (key = value under [section], '#' starts a comment; defaults shown):\n";
  return s + config_schema();
}

}  // namespace mixtype::cli
