#include "mixtype_cli/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <random>

#include "mixtype/errors.hpp"
#include "mixtype_cli/smoothing_probe.hpp"

namespace mixtype::cli {

double CheckResult::value(const std::string& key) const {
  for (const auto& [k, v] : values)
    if (k == key) return v;
  return std::numeric_limits<double>::quiet_NaN();
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

const Curve kAbs = Curve::parse("x", "-x");

CoefficientSet cross() {
  CoefficientSet c;
  c.K = ScalarField::parse("x^2 - y^2");
  return c;
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
  return std::sqrt(e / n);
}

// least-squares slope of log y against log x
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// a sum of six random plane waves
struct RandomSmooth {
  double c[6][4];
  RandomSmooth(std::mt19937& gen, double amplitude) {
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto& row : c)
      for (double& v : row) v = d(gen);
    for (auto& row : c) row[0] *= amplitude / 6;
  }
  double operator()(double x, double y) const {
    double s = 0.0;
    for (const auto& r : c) s += r[0] * std::sin(2 * r[1] * x + 2 * r[2] * y + 3 * r[3]);
    return s;
  }
};

template <class Fn>
GridFunction on_disk(double radius, double h, Fn fn) {
  const Grid2D g = Grid2D::covering(radius, h);
  GridFunction u(g, disk_mask(g, radius));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (u.defined(i, j)) u(i, j) = fn(g.x(i), g.y(j));
  return u;
}

NonlinearProblem tricomi_psi(const char* psi) {
  NonlinearProblem p;
  p.psi = Expr::parse(psi);
  p.psi_lower = 0.5;
  return p;
}

struct Manufactured {
  const char* exact;
  const char* b2;
  const char* c;
};

// the composite sweep; the first entry is the manufactured problem of check 1
constexpr Manufactured kSweep[] = {
    {"(x^2 - y^2)*exp(x*y)", "0", "0"},
    {"(x^2 - y^2)*cos(x + 2*y)", "0", "0"},
    {"(x^2 - y^2)*exp(0.5*x - y)", "0.3*x", "0"},
    {"(x^2 - y^2)*(2 + sin(x*y))", "0", "-0.5"},
};

struct Suite {
  const RunConfig& config;
  std::map<std::pair<int, int>, CompositeRun> runs;  // (sweep index, 1/h)
  std::map<std::pair<int, int>, double> run_seconds;

  const CompositeRun& composite(int k, int inv_h) {
    const auto key = std::pair{k, inv_h};
    if (auto it = runs.find(key); it != runs.end()) return it->second;
    CoefficientSet c = cross();
    c.b2 = ScalarField::parse(kSweep[k].b2);
    c.c = ScalarField::parse(kSweep[k].c);
    const ScalarField u = ScalarField::parse(kSweep[k].exact);
    c.f = manufacture_linear(u, c);
    CompositeOptions o;
    o.h = 1.0 / inv_h;
    o.dirichlet = u;
    const auto t0 = Clock::now();
    CompositeRun r = solve_linear_mixed(cross_domain(), c, o);
    run_seconds[key] = seconds_since(t0);
    return runs.emplace(key, std::move(r)).first->second;
  }

  void manufactured(CheckResult& r) {
    const ScalarField u = ScalarField::parse(kSweep[0].exact);
    const double e64 = rel_error(composite(0, 64).u_global, u);
    const double e128 = rel_error(composite(0, 128).u_global, u);
    const double order = std::log2(e64 / e128);
    const double secs = run_seconds[{0, 128}];
    r.values = {{"rel_l2_h64", e64}, {"rel_l2_h128", e128}, {"order", order}};
    r.pass = e128 <= 1e-2 && order >= 1.5 && secs <= 120.0;
    r.detail = fmt("rel L2 error %.3e at h = 1/128, order %.2f, solve %.1f s", e128, order, secs);
  }

  void zero_propagation(CheckResult& r) {
    CompositeOptions o;
    o.h = 1.0 / 64;
    const CompositeRun run = solve_linear_mixed(cross_domain(), cross(), o);
    const double m = run.u_global.max_abs();
    r.values = {{"max_abs_u", m}, {"nodes", static_cast<double>(mask_count(run.u_global.mask()))}};
    r.pass = m <= 1e-12 && mask_count(run.u_global.mask()) > 0;
    r.detail = fmt("max |u| = %.3e", m);
  }

  void compat_identity(CheckResult& r) {
    double worst = 0.0;
    for (double psi0 : {1.0, -0.37, 3e-5}) {
      char s[32];
      std::snprintf(s, sizeof s, "%.17g", psi0);
      const CauchyTrace t{kAbs, Trace(), Trace::analytic(Expr::parse(s), Expr::parse(s))};
      const CompatReport rep = check_compatibility(t, cross(), 1);
      worst = std::max(worst, std::abs(rep.residuals[0] - 2 * std::abs(psi0)) / std::abs(psi0));
    }
    const CompositeRun& run = composite(0, 64);
    const double psi = std::abs(run.elliptic.psi_corner), scale = std::max(run.compat_up.scale, run.compat_down.scale);
    r.values = {{"identity_rel_defect", worst}, {"psi_corner", psi}, {"scale", scale}};
    r.pass = worst <= 4 * std::numeric_limits<double>::epsilon() && psi <= 1e-6 * scale;
    r.detail = fmt("|r1 - 2|psi(0)|| / |psi(0)| = %.1e; extracted psi(0) = %.2e (scale %.2e)", worst, psi, scale);
  }

  void gates(CheckResult& r) {
    std::string rejected = "accepted";
    CoefficientSet rev;
    rev.K = ScalarField::parse("y^2 - x^2");
    rev.f = ScalarField::constant(1.0);
    CompositeOptions o;
    o.h = 1.0 / 32;
    try {
      (void)solve_linear_mixed(cross_domain(), rev, o);
    } catch (const Error& e) {
      rejected = std::string(error_name(e.kind()));
    }
    const CompositeRun& run = composite(0, 64);

    HyperbolicProblem w;
    w.coeffs.K = ScalarField::constant(-1.0);
    w.trace = CauchyTrace{kAbs, Trace(), Trace()};
    w.grid = Grid2D::covering(1.2, 1.0 / 32);
    std::string spacelike = "accepted";
    try {
      (void)march(w, 0.0);
    } catch (const Error& e) {
      spacelike = std::string(error_name(e.kind()));
    }
    r.values = {{"reversed_rejected", rejected == "OrientationFailure" ? 1.0 : 0.0},
                {"tricomi_orientation_pass", run.orientation.pass ? 1.0 : 0.0},
                {"tricomi_nodes_checked", static_cast<double>(run.orientation.checked)},
                {"characteristic_rejected", spacelike == "SpaceLikeViolation" ? 1.0 : 0.0}};
    r.pass = rejected == "OrientationFailure" && run.orientation.pass && spacelike == "SpaceLikeViolation";
    r.detail = "reversed: " + rejected + "; tricomi_cross orientation " + (run.orientation.pass ? "passes" : "fails") +
               "; a K kappa_x^2 = 1: " + spacelike;
  }

  static HyperbolicProblem wave(double cfl) {
    HyperbolicProblem p;
    p.coeffs.K = ScalarField::constant(-1.0);
    p.trace = CauchyTrace{Curve(), Trace::analytic(Expr::parse("exp(-10*x^2)"), Expr::parse("exp(-10*x^2)")), Trace()};
    p.grid = Grid2D::covering(1.6, 1.0 / 64);
    p.x_lo = -1.5;
    p.x_hi = 1.5;
    p.cfl = cfl;
    return p;
  }

  void energy(CheckResult& r) {
    const MarchResult stable = march(wave(0.8), 0.0);
    const auto [mn, mx] = std::minmax_element(stable.energy.unweighted.begin(), stable.energy.unweighted.end());
    const double spread = *mx / *mn;
    HyperbolicProblem p = wave(1.2);
    p.allow_unstable = true;
    p.dy = 1.2 * p.grid.h;
    const MarchResult unstable = march(p, 0.0);
    r.values = {{"energy_max_over_min", spread}, {"courant_stable", stable.courant},
                {"courant_unstable", unstable.courant}, {"instability_flag", unstable.unstable ? 1.0 : 0.0}};
    r.pass = spread <= 10.0 && unstable.unstable;
    r.detail = fmt("CFL 0.8: max/min E = %.3f; CFL %.2f: instability flag ", spread, unstable.courant) +
               (unstable.unstable ? "set" : "not set");
  }

  void loss_ratios(CheckResult& r) {
    static constexpr const char* exact[] = {"(y^2 - x^2)^2", "(y^2 - x^2)^2*(1 + x)", "(y^2 - x^2)^2*exp(0.5*y)",
                                            "(y^2 - x^2)^2*cos(x)"};
    double worst = 0.0;
    r.pass = true;
    for (int k = 0; k < 4; ++k) {
      double ratio[2];
      for (int l = 0; l < 2; ++l) {
        const ScalarField u = ScalarField::parse(exact[k]);
        HyperbolicProblem p;
        p.coeffs = cross();
        p.coeffs.f = manufacture_linear(u, p.coeffs);
        p.trace = CauchyTrace{kAbs, Trace::from_field(u, kAbs, false), Trace::from_field(u, kAbs, true)};
        p.grid = Grid2D::covering(1.2, l == 0 ? 1.0 / 64 : 1.0 / 128);
        ratio[l] = loss_ratio(march(p, 1e-6).u, p, 1);
        r.values.emplace_back("ratio_" + std::to_string(k) + (l == 0 ? "_h64" : "_h128"), ratio[l]);
      }
      const double v = std::abs(ratio[1] / ratio[0] - 1.0);
      worst = std::max(worst, v);
      r.pass = r.pass && std::isfinite(v) && v < 0.2;
    }
    r.values.emplace_back("worst_variation", worst);
    r.detail = fmt("largest change of ||u||_1 / data between h = 1/64 and 1/128: %.2f%%", 100 * worst);
  }

  void estimate_table(CheckResult& r) {
    double worst = 0.0;
    r.pass = true;
    for (int k = 0; k < 4; ++k) {
      const std::vector<EstimateRow> rows = verify_estimate(composite(k, 64), 2, &composite(k, 128));
      for (const EstimateRow& row : rows) {
        const std::string key = std::to_string(k) + "_s" + std::to_string(row.s);
        r.values.emplace_back("ratio_" + key, row.ratio);
        r.values.emplace_back("drift_" + key, row.drift);
        worst = std::max(worst, row.drift);
        r.pass = r.pass && std::isfinite(row.ratio) && row.ratio > 0.0 && row.drift < 0.2;
      }
    }
    r.values.emplace_back("worst_drift", worst);
    r.detail = fmt("ratios ||u||_s / ||f||_(s+5), s = 0..2, largest drift h = 1/64 -> 1/128: %.2f%%", 100 * worst);
  }

  void gradient(CheckResult& r) {
    const NonlinearProblem p = tricomi_psi("1 + 0.5 * sin(x + u) * p2 + p1^2");
    const double eps = 0.1, h = 1.0 / 32;
    std::mt19937 gen(config.seed);
    const std::vector<double> ts{1e-2, 1e-3, 1e-4, 1e-5};
    double worst = 0.0;
    for (int k = 0; k < 5; ++k) {
      const RandomSmooth fw(gen, 0.5), fr(gen, 0.5);
      const GridFunction w = on_disk(1.0, h, fw), rho = on_disk(1.0, h, fr);
      const GridFunction F0 = evaluate_F(w, eps, p), Lr = apply_linearization(linearize(w, eps, p), rho);
      std::vector<double> errs;
      for (double t : ts) {
        GridFunction q = evaluate_F(w + t * rho, eps, p) - F0;
        q *= 1.0 / t;
        errs.push_back((q - Lr).l2());
      }
      const double s = loglog_slope(ts, errs);
      r.values.emplace_back("slope_" + std::to_string(k), s);
      worst = std::max(worst, std::abs(s - 1.0));
    }
    r.pass = worst <= 0.1;
    r.detail = fmt("log-log slopes over 5 random pairs within %.3f of 1", worst);
  }

  void determinant(CheckResult& r) {
    const NonlinearProblem p = tricomi_psi("1 + p1^2 + u");
    double worst = 0.0;
    for (double h : {1.0 / 16, 1.0 / 64}) {
      const GridFunction w = on_disk(1.0, h, [](double x, double y) { return 0.25 * x * x * y - 0.5 * x * y + 0.125 * y * y * y; });
      for (double eps : {0.1, 0.05}) worst = std::max(worst, linearize(w, eps, p).det_identity_defect);
    }
    r.values = {{"max_defect", worst}};
    r.pass = worst <= 1e-10;
    r.detail = fmt("max |det Phi - (eps F + K psi)| = %.2e", worst);
  }

  void transform(CheckResult& r) {
    const NonlinearProblem p = tricomi_psi("1");
    const GridFunction zero = on_disk(1.2, 1.0 / 32, [](double, double) { return 0.0; });
    const TransformField t0 = build_transform(linearize(zero, 0.1, p));
    double ident = 0.0;
    const Grid2D& g0 = t0.y1.grid();
    for (int j = 0; j < g0.ny; ++j)
      for (int i = 0; i < g0.nx; ++i) ident = std::max(ident, std::abs(t0.y1(i, j) - g0.x(i)));

    std::mt19937 gen(config.seed + 1);
    const RandomSmooth f(gen, 0.6);
    const double h = 1.0 / 32;
    const GridFunction w = on_disk(1.3, h, f);
    std::vector<double> shift;
    double b12 = 0.0;
    for (double eps : {0.1, 0.05, 0.025}) {
      const TransformField t = build_transform(linearize(w, eps, p));
      shift.push_back(t.max_shift);
      b12 = std::max(b12, t.max_b12);
    }
    const double q1 = shift[0] / shift[1], q2 = shift[1] / shift[2];
    r.values = {{"identity_defect", ident}, {"shift_eps_0.1", shift[0]}, {"shift_eps_0.05", shift[1]},
                {"shift_eps_0.025", shift[2]}, {"halving_ratio_1", q1}, {"halving_ratio_2", q2},
                {"max_b12", b12}, {"b12_bound", 5 * h * h}};
    r.pass = ident == 0.0 && std::abs(q1 - 2.0) <= 0.3 && std::abs(q2 - 2.0) <= 0.3 && b12 <= 5 * h * h;
    r.detail = fmt("w = 0: max |y1 - x1| = %.1e; shift ratios %.3f, %.3f", ident, q1, q2) +
               fmt("; max b12 = %.2e <= 5 h^2 = %.2e", b12, 5 * h * h);
  }

  void smoothing(CheckResult& r) {
    const double h = 1.0 / 256;
    std::vector<probe::SmoothingConstants> cs;
    for (double theta : {8.0, 16.0, 32.0}) cs.push_back(probe::smoothing_constants(theta, h));
    auto spread = [&](double probe::SmoothingConstants::*m) {
      double lo = cs[0].*m, hi = lo;
      for (const auto& c : cs) lo = std::min(lo, c.*m), hi = std::max(hi, c.*m);
      return hi / lo;
    };
    for (const auto& c : cs) {
      const std::string t = std::to_string(static_cast<int>(c.theta));
      r.values.emplace_back("jackson_theta" + t, c.jackson);
      r.values.emplace_back("bernstein_theta" + t, c.bernstein);
    }
    const double sj = spread(&probe::SmoothingConstants::jackson), sb = spread(&probe::SmoothingConstants::bernstein);
    r.values.emplace_back("jackson_spread", sj);
    r.values.emplace_back("bernstein_spread", sb);
    r.pass = sj < 2.0 && sb < 2.0;
    r.detail = fmt("max/min over theta = 8, 16, 32: Jackson %.3f, Bernstein %.3f", sj, sb);
  }

  void nash_moser(CheckResult& r) {
    NonlinearProblem p;
    p.psi = Expr::constant(1.0);
    NashMoserConfig c;
    c.h = 1.0 / 64;
    c.max_levels = 3;
    const auto t0 = Clock::now();
    const NashMoserState s = iterate_fixed(p, 0.05, c);
    const double secs = seconds_since(t0);
    for (const LevelRecord& l : s.history) r.values.emplace_back("residual_h2_" + std::to_string(l.level), l.residual);
    const double ratio = s.history.size() == 4 ? s.history[3].residual / s.history[0].residual : 1.0;
    r.values.emplace_back("decay", ratio);
    r.pass = s.history.size() == 4 && ratio <= 0.1 && secs <= 600.0;
    r.detail = fmt("||F(w_3)||_2 / ||F(w_0)||_2 = %.3e in %.1f s", ratio, secs);
  }
};

}  // namespace

std::vector<CheckResult> run_verification(const RunConfig& config,
                                          const std::function<void(const CheckResult&)>& progress) {
  Suite suite{config, {}, {}};
  using Method = void (Suite::*)(CheckResult&);
  const std::pair<const char*, Method> checks[] = {
      {"manufactured composite solve", &Suite::manufactured},
      {"zero propagation", &Suite::zero_propagation},
      {"corner compatibility identity", &Suite::compat_identity},
      {"space-like and orientation gates", &Suite::gates},
      {"energy stability", &Suite::energy},
      {"loss-of-derivatives ratio", &Suite::loss_ratios},
      {"estimate table", &Suite::estimate_table},
      {"linearization gradient check", &Suite::gradient},
      {"determinant identity", &Suite::determinant},
      {"coordinate transform", &Suite::transform},
      {"smoothing inequalities", &Suite::smoothing},
      {"Nash-Moser decay", &Suite::nash_moser},
  };
  std::vector<CheckResult> out;
  int id = 0;
  for (const auto& [name, method] : checks) {
    CheckResult r;
    r.id = ++id;
    r.name = name;
    const auto t0 = Clock::now();
    try {
      (suite.*method)(r);
    } catch (const Error& e) {
      r.pass = false;
      r.detail = e.what();
    }
    r.seconds = seconds_since(t0);
    if (progress) progress(r);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mixtype::cli
