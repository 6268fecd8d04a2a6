#include "mixtype/nashmoser.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>

#include "mixtype/errors.hpp"

namespace mixtype {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Differences {
  GridFunction w10, w01, w20, w02, w11;
  Mask mask;
};

Differences differences(const GridFunction& w) {
  Differences d{diff(w, 1, 0), diff(w, 0, 1), diff(w, 2, 0), diff(w, 0, 2), diff(w, 1, 1), {}};
  d.mask = mask_and(mask_and(d.w10.mask(), d.w01.mask()),
                    mask_and(mask_and(d.w20.mask(), d.w02.mask()), d.w11.mask()));
  d.mask = mask_and(d.mask, w.mask());
  return d;
}

// psi and K at the scaled arguments of node (i, j)
struct Pointwise {
  double K, psi, psi_u, psi_p1, psi_p2;
};

class ScaledPsi {
 public:
  ScaledPsi(const NonlinearProblem& p, double eps, bool partials)
      : p_(p), e_(eps), partials_(partials) {
    if (partials) {
      du_ = p.psi.derivative(Var::U);
      dp1_ = p.psi.derivative(Var::P1);
      dp2_ = p.psi.derivative(Var::P2);
    }
  }

  Pointwise at(double x1, double x2, double w, double w1, double w2) const {
    const double e2 = e_ * e_, e3 = e2 * e_, e4 = e2 * e2, e5 = e4 * e_;
    const double v[kVarCount] = {e2 * x1, e2 * x2, 0.5 * e4 * x1 * x1 + e5 * w, e2 * x1 + e3 * w1, e3 * w2};
    const std::span<const double> args(v, kVarCount);
    Pointwise q{p_.K(e2 * x1, e2 * x2), p_.psi.evaluate<double>(args), 0.0, 0.0, 0.0};
    if (partials_) {
      q.psi_u = du_.evaluate<double>(args);
      q.psi_p1 = dp1_.evaluate<double>(args);
      q.psi_p2 = dp2_.evaluate<double>(args);
    }
    return q;
  }

 private:
  const NonlinearProblem& p_;
  double e_;
  bool partials_;
  Expr du_, dp1_, dp2_;
};

template <class Fn>
double max_over(const GridFunction& u, const Mask& region, Fn value) {
  double m = 0.0;
  const Grid2D& g = u.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (u.defined(i, j) && region[g.index(i, j)]) m = std::max(m, std::abs(value(i, j)));
  return m;
}

double max_abs_on(const GridFunction& u, const Mask& region) {
  return max_over(u, region, [&](int i, int j) { return u(i, j); });
}

// centred first difference of a full row, second-order one-sided at the ends
void row_derivative(const std::vector<double>& y, double h, std::vector<double>& out) {
  const std::size_t n = y.size();
  out.resize(n);
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (y[i + 1] - y[i - 1]) / (2 * h);
  out[0] = (-3 * y[0] + 4 * y[1] - y[2]) / (2 * h);
  out[n - 1] = (3 * y[n - 1] - 4 * y[n - 2] + y[n - 3]) / (2 * h);
}

// a grid field read at T^{-1}(y); coordinates are clamped to the grid
ScalarField pulled(GridFunction field, std::shared_ptr<const TransformField> t, std::string label) {
  auto f = std::make_shared<const GridFunction>(std::move(field));
  const double h = f->grid().h;
  return ScalarField::function(
      [f, t](double y1, double y2) {
        const Grid2D& g = f->grid();
        const double x2 = std::clamp(y2, g.y(0), g.y(g.ny - 1));
        const double x1 = std::clamp(t->inverse_x1(y1, x2), g.x(0), g.x(g.nx - 1));
        const std::optional<double> v = interpolate(*f, x1, x2);
        if (!v) throw Error(ErrorKind::CoverageError, "coefficient field undefined at (" + fmt(x1) + ", " + fmt(x2) + ")");
        return *v;
      },
      h, std::move(label));
}

// the scaled curve x2 = gamma(eps^2 x1) / eps^2 seen in the y coordinates
Curve transformed_curve(const Curve& gamma, double eps, std::shared_ptr<const TransformField> t, double reach) {
  const double e2 = eps * eps;
  return Curve::function(
      [gamma, e2, t, reach](double y1) {
        const auto gs = [&](double s) { return gamma(e2 * s) / e2; };
        const auto g = [&](double s) { return t->forward(s, gs(s)) - y1; };
        const double a = y1 - reach, b = y1 + reach;
        boost::uintmax_t it = 200;
        const auto r = boost::math::tools::toms748_solve(g, a, b, boost::math::tools::eps_tolerance<double>(52), it);
        return gs(0.5 * (r.first + r.second));
      },
      0.05, "transformed curve");
}

}  // namespace

void NonlinearProblem::validate(double range) const {
  if (!(psi_lower > 0.0)) throw Error(ErrorKind::Config, "psi_lower must be positive");
  const int n = 4;
  double lo = std::numeric_limits<double>::infinity();
  double v[kVarCount];
  for (int q = 0; q < 9 * 9 * 9 * 9 * 9; ++q) {
    int r = q;
    for (int k = 0; k < kVarCount; ++k) {
      v[k] = range * ((r % (2 * n + 1)) - n) / n;
      r /= 2 * n + 1;
    }
    lo = std::min(lo, psi.evaluate<double>(std::span<const double>(v, kVarCount)));
  }
  if (!(lo >= psi_lower))
    throw Error(ErrorKind::Config, "psi drops to " + fmt(lo) + " below its lower bound " + fmt(psi_lower));
}

GridFunction evaluate_F(const GridFunction& w, double eps, const NonlinearProblem& problem) {
  const Differences d = differences(w);
  const ScaledPsi sp(problem, eps, false);
  const Grid2D& g = w.grid();
  GridFunction F(g, d.mask);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!F.defined(i, j)) continue;
      const Pointwise q = sp.at(g.x(i), g.y(j), w(i, j), d.w10(i, j), d.w01(i, j));
      F(i, j) = (1.0 + eps * d.w20(i, j)) * d.w02(i, j) - eps * d.w11(i, j) * d.w11(i, j) - q.K * q.psi / eps;
    }
  return F;
}

LinearizationState linearize(const GridFunction& w, double eps, const NonlinearProblem& problem) {
  const Differences d = differences(w);
  const ScaledPsi sp(problem, eps, true);
  const Grid2D& g = w.grid();
  LinearizationState s;
  s.eps = eps;
  for (GridFunction* f : {&s.Phi11, &s.Phi12, &s.Phi22, &s.a1, &s.a2, &s.a0, &s.F, &s.K, &s.psi, &s.psi_u, &s.psi_p1,
                          &s.psi_p2})
    *f = GridFunction(g, d.mask);
  const double e2 = eps * eps, e4 = e2 * e2;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!s.F.defined(i, j)) continue;
      const Pointwise q = sp.at(g.x(i), g.y(j), w(i, j), d.w10(i, j), d.w01(i, j));
      const double w11 = d.w20(i, j), w12 = d.w11(i, j), w22 = d.w02(i, j);
      s.Phi11(i, j) = eps * w22;
      s.Phi12(i, j) = -eps * w12;
      s.Phi22(i, j) = 1.0 + eps * w11;
      s.a1(i, j) = -e2 * q.K * q.psi_p1;
      s.a2(i, j) = -e2 * q.K * q.psi_p2;
      s.a0(i, j) = -e4 * q.K * q.psi_u;
      s.F(i, j) = (1.0 + eps * w11) * w22 - eps * w12 * w12 - q.K * q.psi / eps;
      s.K(i, j) = q.K;
      s.psi(i, j) = q.psi;
      s.psi_u(i, j) = q.psi_u;
      s.psi_p1(i, j) = q.psi_p1;
      s.psi_p2(i, j) = q.psi_p2;
      const double det = s.Phi11(i, j) * s.Phi22(i, j) - s.Phi12(i, j) * s.Phi12(i, j);
      s.det_identity_defect = std::max(s.det_identity_defect, std::abs(det - (eps * s.F(i, j) + q.K * q.psi)));
    }
  return s;
}

GridFunction apply_linearization(const LinearizationState& s, const GridFunction& rho) {
  const Differences d = differences(rho);
  const Grid2D& g = rho.grid();
  GridFunction out(g, mask_and(d.mask, s.F.mask()));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!out.defined(i, j)) continue;
      out(i, j) = s.Phi11(i, j) * d.w20(i, j) + 2 * s.Phi12(i, j) * d.w11(i, j) + s.Phi22(i, j) * d.w02(i, j) +
                  s.a1(i, j) * d.w10(i, j) + s.a2(i, j) * d.w01(i, j) + s.a0(i, j) * rho(i, j);
    }
  return out;
}

double TransformField::inverse_x1(double y, double x2) const {
  const Grid2D& g = y1.grid();
  const double fy = std::clamp(x2 / g.h + g.j0, 0.0, static_cast<double>(g.ny - 1));
  const int j = std::min(static_cast<int>(fy), g.ny - 2);
  const double t = fy - j;
  const auto row = [&](int i) { return (1.0 - t) * y1(i, j) + t * y1(i, j + 1); };
  if (y <= row(0)) return g.x(0) + (y - row(0));
  if (y >= row(g.nx - 1)) return g.x(g.nx - 1) + (y - row(g.nx - 1));
  int lo = 0, hi = g.nx - 1;  // row(lo) < y <= row(hi)
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (row(mid) < y ? lo : hi) = mid;
  }
  const double r0 = row(lo), r1 = row(hi);
  if (y == r1) return g.x(hi);
  return g.x(lo) + g.h * (y - r0) / (r1 - r0);
}

double TransformField::forward(double x1, double x2) const {
  const Grid2D& g = y1.grid();
  const double cx = std::clamp(x1, g.x(0), g.x(g.nx - 1)), cy = std::clamp(x2, g.y(0), g.y(g.ny - 1));
  return *interpolate(y1, cx, cy) + (x1 - cx);
}

TransformField build_transform(const LinearizationState& s) {
  const Grid2D& g = s.Phi22.grid();
  const double h = g.h;
  std::vector<double> c(g.size(), 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!s.Phi22.defined(i, j)) continue;
      const double p22 = s.Phi22(i, j);
      if (!(p22 >= 0.5))
        throw Error(ErrorKind::TransformDegenerate, "Phi22 = " + fmt(p22) + " below 1/2 at (" + fmt(g.x(i)) + ", " +
                                                        fmt(g.y(j)) + ")");
      c[g.index(i, j)] = s.Phi12(i, j) / p22;
    }

  TransformField t;
  t.y1 = GridFunction(g);
  const auto nx = static_cast<std::size_t>(g.nx);
  std::vector<double> y(nx), stage(nx), d(nx), acc(nx), cm(nx);
  for (int i = 0; i < g.nx; ++i) t.y1(i, g.j0) = g.x(i);
  // d y1 / d x2 = -c d1 y1, one RK4 step of signed length dir * h per row
  for (int dir : {+1, -1}) {
    for (std::size_t i = 0; i < nx; ++i) y[i] = t.y1(static_cast<int>(i), g.j0);
    for (int j = g.j0; g.contains(0, j + dir); j += dir) {
      const double dt = dir * h;
      const double* c0 = &c[g.index(0, j)];
      const double* c1 = &c[g.index(0, j + dir)];
      for (std::size_t i = 0; i < nx; ++i) cm[i] = 0.5 * (c0[i] + c1[i]);
      const auto rate = [&](const std::vector<double>& v, const double* cc, double weight) {
        row_derivative(v, h, d);
        for (std::size_t i = 0; i < nx; ++i) {
          const double k = -cc[i] * d[i];
          acc[i] += weight * k;
          stage[i] = k;
        }
      };
      std::fill(acc.begin(), acc.end(), 0.0);
      std::vector<double> v = y;
      rate(v, c0, 1.0);
      for (std::size_t i = 0; i < nx; ++i) v[i] = y[i] + 0.5 * dt * stage[i];
      rate(v, cm.data(), 2.0);
      for (std::size_t i = 0; i < nx; ++i) v[i] = y[i] + 0.5 * dt * stage[i];
      rate(v, cm.data(), 2.0);
      for (std::size_t i = 0; i < nx; ++i) v[i] = y[i] + dt * stage[i];
      rate(v, c1, 1.0);
      for (std::size_t i = 0; i < nx; ++i) {
        y[i] += dt * acc[i] / 6.0;
        t.y1(static_cast<int>(i), j + dir) = y[i];
      }
    }
  }

  const GridFunction y10 = diff(t.y1, 1, 0), y01 = diff(t.y1, 0, 1), y20 = diff(t.y1, 2, 0), y11 = diff(t.y1, 1, 1),
                     y02 = diff(t.y1, 0, 2);
  const Mask m = mask_and(s.F.mask(), mask_and(y20.mask(), mask_and(y11.mask(), y02.mask())));
  for (GridFunction* f : {&t.b11, &t.b12, &t.b22, &t.b1, &t.b2}) *f = GridFunction(g, m);
  const Mask unit = disk_mask(g, 1.0);
  t.min_jacobian = std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      t.min_jacobian = std::min(t.min_jacobian, y10(i, j));
      if (unit[g.index(i, j)]) t.max_shift = std::max(t.max_shift, std::abs(t.y1(i, j) - g.x(i)));
      if (!t.b11.defined(i, j)) continue;
      const double p11 = s.Phi11(i, j), p12 = s.Phi12(i, j), p22 = s.Phi22(i, j);
      const double a = y10(i, j), b = y01(i, j);
      t.b11(i, j) = p11 * a * a + 2 * p12 * a * b + p22 * b * b;
      t.b12(i, j) = p12 * a + p22 * b;
      t.b22(i, j) = p22;
      t.b1(i, j) = p11 * y20(i, j) + 2 * p12 * y11(i, j) + p22 * y02(i, j) + s.a1(i, j) * a + s.a2(i, j) * b;
      t.b2(i, j) = s.a2(i, j);
      if (unit[g.index(i, j)]) t.max_b12 = std::max(t.max_b12, std::abs(t.b12(i, j)));
    }
  if (!(t.min_jacobian > 0.5))
    throw Error(ErrorKind::TransformDegenerate, "d1 y1 drops to " + fmt(t.min_jacobian) + "; the coordinates fold");
  return t;
}

CanonicalOperator canonical_operator(const LinearizationState& s, const TransformField& t,
                                     const NonlinearProblem& problem) {
  const Grid2D& g = s.F.grid();
  const double eps = s.eps, e2 = eps * eps, e4 = e2 * e2;
  const GridFunction y10 = diff(t.y1, 1, 0), y01 = diff(t.y1, 0, 1);
  GridFunction q(g, s.F.mask()), r(g, s.F.mask());  // psi d1y1 / Phi22 and eps F d1y1 / Phi22
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (q.defined(i, j)) {
        q(i, j) = s.psi(i, j) * y10(i, j) / s.Phi22(i, j);
        r(i, j) = eps * s.F(i, j) * y10(i, j) / s.Phi22(i, j);
      }
  const GridFunction qx = diff(q, 1, 0), rx = diff(r, 1, 0);
  const ScalarField Kx = problem.K.dx();

  CanonicalOperator op;
  const Mask m = mask_and(qx.mask(), t.b1.mask());
  for (GridFunction* f : {&op.a11, &op.a22, &op.b1, &op.b1t, &op.b2, &op.c, &op.dK}) *f = GridFunction(g, m);
  const Mask unit = disk_mask(g, 1.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!op.a11.defined(i, j)) continue;
      const double a = y10(i, j), b = y01(i, j), K = s.K(i, j);
      op.a22(i, j) = s.Phi22(i, j);
      op.a11(i, j) = s.psi(i, j) * a * a / s.Phi22(i, j);
      op.b1t(i, j) = op.a11(i, j);
      op.b1(i, j) = qx(i, j) - e2 * (s.psi_p1(i, j) * a + s.psi_p2(i, j) * b);
      op.b2(i, j) = s.a2(i, j);
      op.c(i, j) = -e4 * s.psi_u(i, j);
      // d/dx1 K(eps^2 x) = eps^2 K_x, and d/dx1 = d1y1 d/dy1 since y2 = x2
      op.dK(i, j) = e2 * Kx(e2 * g.x(i), e2 * g.y(j)) / a;
      if (!unit[g.index(i, j)]) continue;
      const double levy = op.b1(i, j) * K + op.b1t(i, j) * op.dK(i, j);
      if (rx.defined(i, j)) op.split_residual = std::max(op.split_residual, std::abs(t.b1(i, j) - levy - rx(i, j)));
      op.max_a_dev = std::max({op.max_a_dev, std::abs(op.a11(i, j) - 1.0), std::abs(op.a22(i, j) - 1.0)});
    }
  return op;
}

GridFunction apply_canonical(const CanonicalOperator& op, const LinearizationState& s, const TransformField& t,
                             const GridFunction& rho_y) {
  const GridFunction r20 = diff(rho_y, 2, 0), r02 = diff(rho_y, 0, 2), r10 = diff(rho_y, 1, 0),
                     r01 = diff(rho_y, 0, 1);
  const Grid2D& g = op.a11.grid();
  Mask m = op.a11.mask();
  std::vector<double> v(g.size(), 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const std::size_t n = g.index(i, j);
      if (!m[n]) continue;
      const double y1 = t.y1(i, j), y2 = g.y(j);
      const auto v20 = interpolate(r20, y1, y2), v02 = interpolate(r02, y1, y2), v10 = interpolate(r10, y1, y2),
                 v01 = interpolate(r01, y1, y2), v00 = interpolate(rho_y, y1, y2);
      if (!v20 || !v02 || !v10 || !v01 || !v00) {
        m[n] = 0;
        continue;
      }
      const double K = s.K(i, j);
      v[n] = op.a22(i, j) * *v02 + op.a11(i, j) * K * *v20 + (op.b1(i, j) * K + op.b1t(i, j) * op.dK(i, j)) * *v10 +
             op.b2(i, j) * *v01 + op.c(i, j) * K * *v00;
    }
  GridFunction out(g, std::move(m));
  out.values() = std::move(v);
  return out;
}

NashMoserState iterate_fixed(const NonlinearProblem& problem, double eps, const NashMoserConfig& cfg) {
  if (!(eps > 0.0)) throw Error(ErrorKind::Config, "epsilon must be positive");
  if (!(cfg.theta0 > 0.0) || !(cfg.theta_growth > 1.0))
    throw Error(ErrorKind::Config, "need theta0 > 0 and theta growth > 1");
  if (cfg.max_levels < 0 || cfg.s0 < 0 || cfg.s1 < 0) throw Error(ErrorKind::Config, "negative level count or norm order");
  if (!(cfg.work_radius >= 1.0) || !(cfg.taper > 0.0))
    throw Error(ErrorKind::Config, "work radius must reach the unit disk and the taper must be positive");
  problem.validate();
  problem.spec.validate();

  const double h = cfg.h, Rw = cfg.work_radius;
  const double Rc = Rw + std::max(0.1, 4 * h);
  const Grid2D grid = Grid2D::covering(2 * Rc, h);
  const Grid2D box = Grid2D::box(Rw + cfg.taper + 4 * h, Rw + cfg.taper + 4 * h, h);
  const Mask work = disk_mask(grid, Rw), unit = disk_mask(grid, 1.0), half = disk_mask(grid, 0.5);
  const double e2 = eps * eps;

  double kscale = 0.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (unit[grid.index(i, j)]) kscale = std::max(kscale, std::abs(problem.K(e2 * grid.x(i), e2 * grid.y(j))));
  if (!(kscale > 0.0)) throw Error(ErrorKind::Config, "K vanishes on the scaled unit disk");

  NashMoserState st;
  st.epsilon = eps;
  GridFunction w(grid, work, 0.0);
  const auto extend = [&](const GridFunction& u, const Grid2D& onto) {
    return extend_from_disk(u, Rw, onto, cfg.taper, cfg.reflection);
  };
  const auto on_unit = [&](const GridFunction& u) { return u.restricted(unit); };

  LinearizationState prev;
  GridFunction prev_step;
  int rising = 0;
  for (int level = 0;; ++level) {
    const auto t0 = std::chrono::steady_clock::now();
    LevelRecord rec;
    rec.level = level;
    rec.theta = cfg.theta0 * std::pow(cfg.theta_growth, level);
    const LinearizationState lin = linearize(extend(w, grid), eps, problem);
    const GridFunction F = on_unit(lin.F);
    rec.residual = sobolev_norm(F, cfg.s0).value;
    rec.residual_l2 = F.l2();
    rec.residual_max = F.max_abs();
    rec.w_norm = sobolev_norm(on_unit(w), cfg.s1).value;
    rec.det_identity_defect = lin.det_identity_defect;
    if (level > 0) {
      LevelRecord& last = st.history.back();
      last.quadratic_error = on_unit(lin.F - prev.F - apply_linearization(prev, prev_step)).l2();
      last.quadratic_constant = last.rho_norm > 0.0 ? last.quadratic_error / (last.rho_norm * last.rho_norm) : 0.0;
      rising = rec.residual >= st.history.back().residual ? rising + 1 : 0;
    }
    st.level = level;
    st.residual = F;
    st.theta = rec.theta;
    const bool done = level == cfg.max_levels || rec.residual == 0.0 ||
                      (level > 0 && rec.residual <= cfg.target * st.history.front().residual);
    if (done || rising >= cfg.stagnation_levels) {
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      st.history.push_back(rec);
      if (!done)
        throw Error(ErrorKind::ResidualStagnation, "residual did not decrease for " +
                                                       std::to_string(cfg.stagnation_levels) + " levels (eps " +
                                                       fmt(eps) + ")");
      break;
    }

    // the split linear operator, divided by a22, in the y coordinates
    const auto T = std::make_shared<const TransformField>(build_transform(lin));
    const CanonicalOperator op = canonical_operator(lin, *T, problem);
    rec.max_shift = T->max_shift;
    rec.max_b12 = T->max_b12;
    rec.max_a_dev = op.max_a_dev;
    GridFunction ac = op.a11, b1c = op.a11, b2c = op.a11, cc = op.a11, fc = op.a11;
    for (std::size_t n = 0; n < grid.size(); ++n) {
      if (!op.a11.mask()[n]) continue;
      const double a22 = op.a22.values()[n], K = lin.K.values()[n];
      ac.values()[n] = kscale * op.a11.values()[n] / a22;
      b1c.values()[n] = (op.b1.values()[n] * K + op.b1t.values()[n] * op.dK.values()[n]) / a22;
      b2c.values()[n] = op.b2.values()[n] / a22;
      cc.values()[n] = op.c.values()[n] * K / a22;
      fc.values()[n] = -lin.F.values()[n] / a22;
    }
    CoefficientSet coeffs;
    // K itself is evaluated at T^{-1}(y), so its zero set is exactly the image of the curves
    coeffs.K = ScalarField::function(
        [K = problem.K, T, e2, kscale](double y1, double y2) { return K(e2 * T->inverse_x1(y1, y2), e2 * y2) / kscale; },
        h, "K o T^-1");
    coeffs.a = pulled(std::move(ac), T, "a11/a22");
    coeffs.b1 = pulled(std::move(b1c), T, "b1");
    coeffs.b2 = pulled(std::move(b2c), T, "b2");
    coeffs.c = pulled(std::move(cc), T, "c");
    coeffs.f = pulled(std::move(fc), T, "-F/a22");
    DomainSpec ys = problem.spec;
    ys.radius_inner = Rc;
    ys.radius_outer = 2 * Rc;
    double reach = 1.0;
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) reach = std::max(reach, 2 * std::abs(T->y1(i, j) - grid.x(i)) + 1.0);
    ys.gamma1 = transformed_curve(problem.spec.gamma1, eps, T, reach);
    ys.gamma2 = transformed_curve(problem.spec.gamma2, eps, T, reach);
    CompositeOptions lo = cfg.linear;
    lo.h = h;
    lo.enforce_invariants = false;
    const CompositeRun run = solve_linear_mixed(ys, coeffs, lo);
    if (!(run.u_global.grid() == grid)) throw Error(ErrorKind::Config, "composite grid differs from the iteration grid");
    for (const CompatReport* c : {&run.compat_up, &run.compat_down})
      for (std::size_t k = 0; k < c->residuals.size() && static_cast<int>(k) < 3; ++k)
        if (c->scale > 0.0)
          rec.compat_worst = std::max(rec.compat_worst, c->residuals[k] / (trace_compat_tolerance(lo, static_cast<int>(k) + 1) * c->scale));
    for (const GlueDefect* gd : {&run.glue_up, &run.glue_down})
      if (gd->threshold > 0.0)
        rec.glue_worst = std::max(rec.glue_worst, std::max(gd->value_jump, gd->slope_jump) / gd->threshold);

    // pull back to the x nodes of the working disk
    GridFunction rho(grid, work);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i) {
        if (!rho.defined(i, j)) continue;
        const std::optional<double> v = interpolate(run.u_global, T->y1(i, j), grid.y(j));
        if (!v) throw Error(ErrorKind::CoverageError, "correction undefined at T(" + fmt(grid.x(i)) + ", " +
                                                          fmt(grid.y(j)) + ")");
        rho(i, j) = *v;
      }

    const GridFunction Fp = apply_linearization(lin, extend(rho, grid)), Lr = apply_canonical(op, lin, *T, run.u_global);
    rec.split_defect = on_unit(Fp - Lr).l2();
    const GridFunction Fx = diff(lin.F, 1, 0), Fy = diff(lin.F, 0, 1);
    const double Fc = max_abs_on(lin.F, unit) + std::max(max_abs_on(Fx, unit), max_abs_on(Fy, unit));
    const double rho_h2 = sobolev_norm(on_unit(rho), 2).value;
    rec.split_constant = Fc * rho_h2 > 0.0 ? rec.split_defect / (Fc * rho_h2) : 0.0;

    // smooth and update
    const GridFunction sm = smoothing_apply(extend(rho, box), rec.theta);
    GridFunction step(grid, work);
    for (int j = 0; j < grid.ny; ++j)
      for (int i = 0; i < grid.nx; ++i)
        if (step.defined(i, j)) step(i, j) = sm(i - grid.i0 + box.i0, j - grid.j0 + box.j0);
    rec.rho_norm = sobolev_norm(on_unit(step), 2).value;
    w += step;
    prev = lin;
    prev_step = extend(step, grid);
    st.rho = step;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    st.history.push_back(rec);
  }
  st.w = w;

  // unscaled solution on the x~ nodes
  Grid2D gt = grid;
  gt.h = e2 * h;
  st.u = GridFunction(gt, work);
  const double e4 = e2 * e2, e5 = e4 * eps;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (st.u.defined(i, j)) st.u(i, j) = 0.5 * e4 * grid.x(i) * grid.x(i) + e5 * w(i, j);
  const GridFunction uxx = diff(st.u, 2, 0), uyy = diff(st.u, 0, 2), uxy = diff(st.u, 1, 1), ux = diff(st.u, 1, 0),
                     uy = diff(st.u, 0, 1);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (!half[grid.index(i, j)] || !uxx.defined(i, j) || !uyy.defined(i, j) || !uxy.defined(i, j)) continue;
      const double xt = gt.x(i), yt = gt.y(j);
      const double v[kVarCount] = {xt, yt, st.u(i, j), ux(i, j), uy(i, j)};
      const double psi = problem.psi.evaluate<double>(std::span<const double>(v, kVarCount));
      const double r = uxx(i, j) * uyy(i, j) - uxy(i, j) * uxy(i, j) - problem.K(xt, yt) * psi;
      st.unscaled_residual = std::max(st.unscaled_residual, std::abs(r));
    }
  st.unscaled_from_F = eps * max_abs_on(st.residual, half);
  return st;
}

NashMoserState iterate(const NonlinearProblem& problem, double eps, const NashMoserConfig& config) {
  std::vector<std::string> notes;
  for (int k = 0;; ++k) {
    try {
      NashMoserState st = iterate_fixed(problem, eps, config);
      st.halvings = k;
      st.notes = std::move(notes);
      return st;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::ResidualStagnation || k >= config.max_halvings) throw;
      notes.push_back(std::string(e.what()) + "; halving eps");
      eps *= 0.5;
    }
  }
}

}  // namespace mixtype
