#include "mixtype/composite.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <span>

#include "mixtype/errors.hpp"
#include "mixtype/numerics.hpp"

namespace mixtype {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Jumps of u and u_y across the curve between the hyperbolic solution w
// (on the side given by dir = +1 above, -1 below) and the Cauchy data.
GlueDefect glue_defect(const GridFunction& w, const Curve& kappa, const Trace& phi, const Trace& psi, double radius,
                       int dir) {
  GlueDefect g;
  const Grid2D& grid = w.grid();
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.x(i), yc = kappa(x);
    if (x * x + yc * yc >= radius * radius) continue;
    // first row strictly on the hyperbolic side
    int j = grid.j0 + static_cast<int>(dir > 0 ? std::floor(yc / grid.h) : std::ceil(yc / grid.h));
    while (grid.contains(i, j) && dir * (grid.y(j) - yc) <= 1e-12 * grid.h) j += dir;
    std::array<double, 4> ts{yc, 0, 0, 0}, vs{phi(x), 0, 0, 0};
    bool ok = true;
    for (int k = 1; k <= 3; ++k) {
      const int jj = j + dir * (k - 1);
      if (!w.defined(i, jj)) {
        ok = false;
        break;
      }
      ts[k] = grid.y(jj);
      vs[k] = w(i, jj);
    }
    if (!ok) continue;
    const std::span<const double> t3(ts.data() + 1, 3), v3(vs.data() + 1, 3);
    g.value_jump = std::max(g.value_jump, std::abs(numerics::lagrange_value(t3, v3, yc) - vs[0]));
    g.slope_jump = std::max(g.slope_jump, std::abs(numerics::lagrange_derivative(ts, vs, yc) - psi(x)));
    ++g.columns;
  }
  return g;
}

}  // namespace

double trace_compat_tolerance(const CompositeOptions& opt, int n) {
  return std::max(opt.compat_tol, opt.trace_compat_factor * (opt.h * opt.h + std::pow(opt.h, std::max(0, 5 - n))));
}

CompositeRun solve_linear_mixed(const DomainSpec& spec, const CoefficientSet& coeffs, const CompositeOptions& opt) {
  spec.validate();
  const Grid2D grid = Grid2D::covering(spec.radius_outer, opt.h);
  CompositeRun run{spec, coeffs, opt, build_region_map(spec, grid, coeffs.K), {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  const Curve up = spec.kappa_upper(), low = spec.kappa_lower();

  run.orientation = orientation_check(run.map, coeffs.K);
  if (!run.orientation.pass)
    throw Error(ErrorKind::OrientationFailure, std::to_string(run.orientation.failed) + " of " +
                                                   std::to_string(run.orientation.checked) +
                                                   " band nodes march out of their hyperbolic component");
  run.invariants = check_invariants(coeffs, run.map, up, low);
  if (opt.enforce_invariants)
    for (const InvariantCheck& c : run.invariants)
      if (!c.pass) throw Error(ErrorKind::Config, "coefficient invariant " + c.name + " fails by " + fmt(c.worst));

  EllipticProblem ep{spec, run.map, coeffs, opt.dirichlet};
  ep.delta_schedule = opt.delta_schedule;
  run.elliptic = continue_to_degenerate(ep);
  const EllipticSolution& el = run.elliptic;

  const double y_top = spec.radius_inner + 2 * opt.h;
  HyperbolicProblem hu;
  hu.coeffs = coeffs;
  hu.grid = grid;
  hu.x_lo = -el.trace_x_max;
  hu.x_hi = el.trace_x_max;
  hu.y_top = y_top;
  hu.epsilon_schedule = opt.epsilon_schedule;
  hu.cfl = opt.cfl;
  hu.extension_order = opt.extension_order;
  // the corner conditions are checked below, order by order
  hu.compat_tol = std::numeric_limits<double>::infinity();
  HyperbolicProblem hd = hu;
  hu.trace = CauchyTrace{up, el.phi_upper, el.psi_upper};
  hd.trace = CauchyTrace{low, el.phi_lower, el.psi_lower};

  for (auto [trace, report] : {std::pair{&hu.trace, &run.compat_up}, std::pair{&hd.trace, &run.compat_down}}) {
    *report = check_compatibility(*trace, coeffs, opt.compat_order, opt.compat_tol);
    for (int n = 1; n <= opt.compat_order; ++n) {
      const std::size_t k = static_cast<std::size_t>(n - 1);
      report->tols[k] = n <= opt.compat_gate ? trace_compat_tolerance(opt, n) * report->scale : std::numeric_limits<double>::infinity();
      report->pass[k] = report->residuals[k] <= report->tols[k];
    }
      if (!report->ok()) {
      std::size_t n = 0;
      while (report->pass[n]) ++n;
      throw Error(ErrorKind::IncompatibleData, "extracted traces fail corner condition " + std::to_string(n + 1) +
                                                   ": residual " + fmt(report->residuals[n]) + " > " +
                                                   fmt(report->tols[n]));
    }
  }

  run.up = solve_degenerate(hu);
  run.down = solve_degenerate(reflected_y(hd, -y_top));
  run.down.u = flip_y(run.down.u);
  for (MarchResult& r : run.down.runs) r.u = flip_y(r.u);

  // assembly on the inner disk; the hyperbolic solutions take over right up
  // to the curves, the curves themselves carry g
  run.u_global = GridFunction(grid, disk_mask(grid, spec.radius_inner));
  double scale = 0.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (!run.u_global.defined(i, j)) continue;
      const double x = grid.x(i), y = grid.y(j), tol = 1e-12 * grid.h;
      const double yu = up(x), yl = low(x);
      const GridFunction* src = nullptr;
      if (y > yu + tol)
        src = &run.up.u;
      else if (y < yl - tol)
        src = &run.down.u;
      else if (y > yl + tol && y < yu - tol && el.u.defined(i, j))
        src = &el.u;
      double v = 0.0;
      if (src) {
        if (!src->defined(i, j))
          throw Error(ErrorKind::CoverageError,
                      "no stage covers the node (" + fmt(x) + ", " + fmt(y) + ") of the inner disk");
        v = (*src)(i, j);
      } else {
        v = opt.dirichlet.is_zero() ? 0.0 : opt.dirichlet(x, y);
      }
      run.u_global(i, j) = v;
      scale = std::max(scale, std::abs(v));
    }

  run.glue_up = glue_defect(run.up.u, up, el.phi_upper, el.psi_upper, spec.radius_inner, +1);
  run.glue_down = glue_defect(run.down.u, low, el.phi_lower, el.psi_lower, spec.radius_inner, -1);
  for (GlueDefect* g : {&run.glue_up, &run.glue_down}) {
    g->threshold = opt.glue_factor * opt.h * opt.h * scale;
    g->pass = std::max(g->value_jump, g->slope_jump) <= g->threshold;
    if (!g->pass)
      throw Error(ErrorKind::GlueDefectExceeded, "jump " + fmt(std::max(g->value_jump, g->slope_jump)) +
                                                     " exceeds " + fmt(g->threshold));
  }
  return run;
}

std::vector<EstimateRow> verify_estimate(const CompositeRun& run, int s_max, const CompositeRun* refined,
                                         double max_drift) {
  const auto ratios = [&](const CompositeRun& r) {
    std::vector<EstimateRow> rows;
    for (int s = 0; s <= s_max; ++s) {
      EstimateRow row;
      row.s = s;
      row.norm_u = sobolev_norm(r.u_global, s).value;
      row.norm_f = field_sobolev_norm(r.coeffs.f, r.u_global.grid(), r.u_global.mask(), s + r.coeffs.d + 3);
      row.ratio = row.norm_f > 0.0 ? row.norm_u / row.norm_f : 0.0;
      rows.push_back(row);
    }
    return rows;
  };
  std::vector<EstimateRow> rows = ratios(run);
  if (refined) {
    const std::vector<EstimateRow> fine = ratios(*refined);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      rows[k].drift = rows[k].ratio > 0.0 ? std::abs(fine[k].ratio / rows[k].ratio - 1.0) : fine[k].ratio;
      rows[k].stable = rows[k].drift < max_drift;
    }
  }
  return rows;
}

FailureReport demonstrate_failure_mode(const DomainSpec& spec, const CoefficientSet& coeffs, double h, bool force) {
  FailureReport rep;
  const Grid2D grid = Grid2D::covering(spec.radius_outer, h);
  rep.orientation = orientation_check(build_region_map(spec, grid, coeffs.K), coeffs.K);
  rep.failure_mode = rep.orientation.pass ? "none" : "orientation";
  if (!force) return rep;

  rep.forced = true;
  HyperbolicProblem p;
  p.coeffs = coeffs;
  p.trace = CauchyTrace{spec.kappa_upper(), Trace(), Trace()};
  p.grid = grid;
  p.x_lo = -spec.radius_inner;
  p.x_hi = spec.radius_inner;
  p.y_top = spec.radius_inner;
  p.allow_unstable = true;
  p.check_spacelike = false;
  p.compat_tol = std::numeric_limits<double>::infinity();
  try {
    const MarchResult r = march(p, 0.0);
    rep.forced_outcome = r.unstable ? "instability" : "bounded";
    rep.forced_growth = r.data_scale > 0.0 ? r.max_level_norm / r.data_scale : 0.0;
  } catch (const Error& e) {
    switch (e.kind()) {
      case ErrorKind::CharacteristicCorner: rep.forced_outcome = "characteristic_corner"; break;
      case ErrorKind::IncompatibleData: rep.forced_outcome = "incompatible"; break;
      case ErrorKind::InstabilityDetected: rep.forced_outcome = "instability"; break;
      default: throw;
    }
  }
  return rep;
}

}  // namespace mixtype
