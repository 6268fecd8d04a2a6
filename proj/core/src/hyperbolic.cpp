#include "mixtype/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mixtype/errors.hpp"

namespace mixtype {

namespace {

constexpr double kInstabilityFactor = 1e6;

struct Coeffs {
  double A, b1, b2, c, f, a;
};

struct Sampler {
  const CoefficientSet& cf;
  ScalarField A;
  Coeffs at(double x, double y, double eps) const {
    Coeffs k;
    k.a = cf.a(x, y);
    k.A = A(x, y) - k.a * eps;  // a (K - eps) = -a (K' + eps)
    k.b1 = cf.b1.is_zero() ? 0.0 : cf.b1(x, y);
    k.b2 = cf.b2.is_zero() ? 0.0 : cf.b2(x, y);
    k.c = cf.c.is_zero() ? 0.0 : cf.c(x, y);
    k.f = cf.f.is_zero() ? 0.0 : cf.f(x, y);
    return k;
  }
};

}  // namespace

MarchResult march(const HyperbolicProblem& p, double epsilon) {
  if (!(epsilon >= 0.0)) throw Error(ErrorKind::Config, "epsilon must be nonnegative");
  if (!(p.cfl > 0.0)) throw Error(ErrorKind::Config, "cfl must be positive");
  if (p.cfl > 1.0 && !p.allow_unstable)
    throw Error(ErrorKind::CFLViolation, "cfl " + std::to_string(p.cfl) + " > 1 without allow_unstable");
  const Grid2D& g = p.grid;
  const double h = g.h;
  const Curve& kap = p.trace.kappa;
  if (p.check_spacelike) {
    const SpacelikeReport sl = spacelike_check(kap, p.coeffs.a, -p.coeffs.K, p.coeffs.eta0, p.x_lo, p.x_hi);
    if (!sl.pass)
      throw Error(ErrorKind::SpaceLikeViolation, "a K' kappa'^2 = " + std::to_string(sl.sup) + " at x = " +
                                                     std::to_string(sl.at_x) + " exceeds " + std::to_string(sl.eta0));
  }

  std::vector<int> cols;
  std::vector<double> xs;
  for (int i = 0; i < g.nx; ++i)
    if (g.x(i) >= p.x_lo - 1e-12 && g.x(i) <= p.x_hi + 1e-12) {
      cols.push_back(i);
      xs.push_back(g.x(i));
    }
  if (cols.size() < 3) throw Error(ErrorKind::Config, "marching box holds fewer than three columns");
  const std::size_t nc = cols.size();
  const CauchyExtension ext = build_extension(p.trace, p.coeffs, p.extension_order, xs, 0.0, p.compat_tol);
  const Sampler S{p.coeffs, p.coeffs.A()};

  double y_low = std::numeric_limits<double>::infinity();
  for (double yc : ext.curve_y) y_low = std::min(y_low, yc);
  const double y_base = std::floor(y_low / h - 1e-9) * h;
  if (!(p.y_top > y_base)) throw Error(ErrorKind::Config, "y_top lies below the initial curve");

  // wave speed over the box, sampled on grid rows
  double speed2 = 0.0, sup_b2 = 0.0, sup_c = 0.0, sup_f = 0.0;
  for (std::size_t c = 0; c < nc; ++c)
    for (double y = y_base; y <= p.y_top + h; y += h) {
      if (y < ext.curve_y[c]) continue;
      const Coeffs k = S.at(xs[c], y, epsilon);
      speed2 = std::max(speed2, -k.A);
      sup_b2 = std::max(sup_b2, std::abs(k.b2));
      sup_c = std::max(sup_c, std::abs(k.c));
      sup_f = std::max(sup_f, std::abs(k.f));
    }
  const double speed = std::sqrt(speed2);
  MarchResult r;
  if (p.dy > 0.0) {
    r.dy = p.dy;
  } else {
    const int sub = std::max(1, static_cast<int>(std::ceil(speed / p.cfl - 1e-12)));
    r.dy = h / sub;
  }
  r.courant = r.dy * speed / h;
  if (r.courant > 1.0 + 1e-12 && !p.allow_unstable)
    throw Error(ErrorKind::CFLViolation, "Courant number " + std::to_string(r.courant) + " > 1");
  const double dy = r.dy;
  const int L = static_cast<int>(std::ceil((p.y_top - y_base) / dy - 1e-9)) + 2;
  r.levels = L;

  // level values; active = strictly above the curve
  std::vector<std::vector<double>> U(static_cast<std::size_t>(L), std::vector<double>(nc, 0.0));
  std::vector<std::vector<std::uint8_t>> act(static_cast<std::size_t>(L), std::vector<std::uint8_t>(nc, 0));
  auto yl = [&](int n) { return y_base + n * dy; };

  EnergyLedger& E = r.energy;
  E.mu = p.mu > 0.0 ? p.mu : 5.0 * (1.0 + sup_b2 + sup_c);
  E.d = p.coeffs.d;

  double scale = 0.0;
  for (int n = 0; n < L; ++n)
    for (std::size_t c = 0; c < nc; ++c)
      if (yl(n) > ext.curve_y[c] + 1e-12 * h) act[static_cast<std::size_t>(n)][c] = 1;
  // data scale from the extension on the first active level of each column
  for (std::size_t c = 0; c < nc; ++c)
    for (int n = 0; n < L; ++n)
      if (act[static_cast<std::size_t>(n)][c]) {
        scale = std::max(scale, std::abs(ext(c, yl(n))));
        break;
      }
  scale = std::max(scale, sup_f * (p.y_top - y_base) * (p.y_top - y_base));
  r.data_scale = scale;
  const double limit = kInstabilityFactor * std::max(scale, std::numeric_limits<double>::min());

  const double hh = h * h;
  int last = L - 1;
  for (int n = 0; n < L; ++n) {
    const auto nn = static_cast<std::size_t>(n);
    double level_max = 0.0;
    for (std::size_t c = 0; c < nc; ++c) {
      if (!act[nn][c]) continue;
      const bool full = n >= 2 && c > 0 && c + 1 < nc && act[nn - 1][c - 1] && act[nn - 1][c] && act[nn - 1][c + 1] &&
                        act[nn - 2][c];
      double v;
      if (!full) {
        v = ext(c, yl(n));
      } else {
        const std::vector<double>& u1 = U[nn - 1];
        const std::vector<double>& u0 = U[nn - 2];
        const Coeffs k = S.at(xs[c], yl(n - 1), epsilon);
        const double uxx = ((u1[c - 1] + u1[c + 1]) - 2.0 * u1[c]) / hh;
        const double ux = (u1[c + 1] - u1[c - 1]) / (2.0 * h);
        const double rhs = k.f - k.A * uxx - k.b1 * ux - k.c * u1[c];
        const double half = 0.5 * dy * k.b2;
        v = (2.0 * u1[c] - (1.0 - half) * u0[c] + dy * dy * rhs) / (1.0 + half);
      }
      U[nn][c] = v;
      level_max = std::max(level_max, std::abs(v));
    }
    r.max_level_norm = std::max(r.max_level_norm, level_max);
    if (!(level_max <= limit)) {
      if (!p.allow_unstable)
        throw Error(ErrorKind::InstabilityDetected, "level max " + std::to_string(level_max) + " at y = " +
                                                        std::to_string(yl(n)) + " exceeds 1e6 x data scale");
      r.unstable = true;
      last = n - 1;
      break;
    }
  }

  // energy on levels with a centered y difference
  for (int n = 1; n < last; ++n) {
    const auto nn = static_cast<std::size_t>(n);
    const double y = yl(n);
    if (y > p.y_top + 1e-12) break;
    double w = 0.0, uw = 0.0;
    bool any = false;
    for (std::size_t c = 1; c + 1 < nc; ++c) {
      if (!(act[nn][c] && act[nn - 1][c] && act[nn + 1][c] && act[nn][c - 1] && act[nn][c + 1])) continue;
      any = true;
      const Coeffs k = S.at(xs[c], y, epsilon);
      const double kp = std::max(-k.A / k.a, 0.0) + epsilon;
      const double u = U[nn][c];
      const double uy = (U[nn + 1][c] - U[nn - 1][c]) / (2.0 * dy);
      const double ux = (U[nn][c + 1] - U[nn][c - 1]) / (2.0 * h);
      const double e = (u * u + uy * uy) / kp + k.a * ux * ux;
      uw += h * e;
      w += h * std::exp(-E.mu * y) * e;
    }
    if (!any) continue;
    E.y.push_back(y);
    E.weighted.push_back(w);
    E.unweighted.push_back(uw);
  }

  // grid rows: linear interpolation between the bracketing levels
  GridFunction out(g, Mask(g.size(), 0));
  for (std::size_t c = 0; c < nc; ++c) {
    const int i = cols[c];
    for (int j = 0; j < g.ny; ++j) {
      const double y = g.y(j);
      if (y <= ext.curve_y[c] || y > p.y_top + 1e-12) continue;
      const double s = (y - y_base) / dy;
      int n = static_cast<int>(std::floor(s + 1e-9));
      const double th = std::max(0.0, s - n);
      if (n + (th > 1e-9 ? 1 : 0) > last) continue;
      const auto nn = static_cast<std::size_t>(n);
      double v;
      if (th <= 1e-9) v = U[nn][c];
      else if (act[nn][c]) v = (1.0 - th) * U[nn][c] + th * U[nn + 1][c];
      else v = U[nn + 1][c] + (ext(c, y) - ext(c, yl(n + 1)));
      out.define(i, j, v);
    }
  }
  r.u = std::move(out);
  return r;
}

DegenerateSolution solve_degenerate(const HyperbolicProblem& p) {
  if (p.epsilon_schedule.size() < 3) throw Error(ErrorKind::Config, "epsilon schedule needs at least three entries");
  for (std::size_t k = 1; k < p.epsilon_schedule.size(); ++k)
    if (!(p.epsilon_schedule[k] < p.epsilon_schedule[k - 1]) || !(p.epsilon_schedule[k] > 0.0))
      throw Error(ErrorKind::Config, "epsilon schedule must be positive and decreasing");
  DegenerateSolution s;
  for (double e : p.epsilon_schedule) {
    s.runs.push_back(march(p, e));
    s.epsilons.push_back(e);
    if (s.runs.size() > 1) s.gaps.push_back((s.runs.back().u - s.runs[s.runs.size() - 2].u).l2());
  }
  const double scale = std::max(1.0, s.runs.back().u.max_abs());
  for (std::size_t k = 1; k < s.gaps.size(); ++k) {
    if (s.gaps[k] <= 1e-13 * scale) continue;
    if (!(s.gaps[k] < s.gaps[k - 1]))
      throw Error(ErrorKind::ContinuationStall, "epsilon gap grew from " + std::to_string(s.gaps[k - 1]) + " to " +
                                                    std::to_string(s.gaps[k]));
  }
  s.u = s.runs.back().u;
  s.energy = s.runs.back().energy;
  return s;
}

double loss_ratio(const GridFunction& u, const HyperbolicProblem& p, int m) {
  const int d = p.coeffs.d;
  const double nu = sobolev_norm(u, m).value;
  const double h = u.grid().h;
  double den = trace_sobolev_norm(p.trace.phi, p.x_lo, p.x_hi, h, m + d + 1) +
               trace_sobolev_norm(p.trace.psi, p.x_lo, p.x_hi, h, m + d);
  if (!p.coeffs.f.is_zero()) den += field_sobolev_norm(p.coeffs.f, u.grid(), u.mask(), m + d);
  if (den == 0.0) return nu == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return nu / den;
}

HyperbolicProblem reflected_y(const HyperbolicProblem& p, double y_bottom) {
  if (p.grid.ny != 2 * p.grid.j0 + 1) throw Error(ErrorKind::Config, "reflection needs a grid symmetric in y");
  HyperbolicProblem q = p;
  CoefficientSet& c = q.coeffs;
  c.K = p.coeffs.K.reflected_y();
  c.a = p.coeffs.a.reflected_y();
  c.b1 = p.coeffs.b1.reflected_y();
  c.b2 = -p.coeffs.b2.reflected_y();
  c.c = p.coeffs.c.reflected_y();
  c.f = p.coeffs.f.reflected_y();
  q.trace = CauchyTrace{p.trace.kappa.negated(), p.trace.phi, p.trace.psi.negated()};
  q.y_top = -y_bottom;
  return q;
}

GridFunction flip_y(const GridFunction& u) {
  const Grid2D& g = u.grid();
  if (g.ny != 2 * g.j0 + 1) throw Error(ErrorKind::Config, "flip needs a grid symmetric in y");
  GridFunction r(g, Mask(g.size(), 0));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (u.defined(i, j)) r.define(i, g.ny - 1 - j, u(i, j));
  return r;
}

}  // namespace mixtype
