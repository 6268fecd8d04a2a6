#include "mixtype/elliptic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "mixtype/errors.hpp"
#include "mixtype/numerics.hpp"

namespace mixtype {

namespace {

// Smallest arm length kept in a Shortley-Weller stencil, in cells. Closer
// crossings turn the node into a Dirichlet node.
constexpr double kMinArm = 1e-6;

struct Layout {
  std::vector<int> idx;  // unknown number per node, -1 otherwise
  std::vector<std::pair<int, int>> nodes;
};

struct Geometry {
  const Grid2D& g;
  Curve up, lo;
  const RegionMap& map;
  const ScalarField& K;

  bool in_wedge(double x, double y) const { return y < up(x) && y > lo(x); }

  bool unknown(int i, int j) const {
    if (!g.contains(i, j) || map.at(i, j) == Region::Exterior) return false;
    const double x = g.x(i), y = g.y(j);
    return in_wedge(x, y) && K(x, y) > 0.0;
  }
};

Layout make_layout(const Geometry& geo) {
  Layout L;
  L.idx.assign(geo.g.size(), -1);
  for (int j = 0; j < geo.g.ny; ++j)
    for (int i = 0; i < geo.g.nx; ++i)
      if (geo.unknown(i, j)) {
        L.idx[geo.g.index(i, j)] = static_cast<int>(L.nodes.size());
        L.nodes.emplace_back(i, j);
      }
  return L;
}

// Fraction t in (0, 1] of the step from (x, y) towards (x + dx, y + dy) at
// which the boundary of the wedge is met, and the boundary point.
struct Arm {
  double t = 1.0;
  double bx = 0.0, by = 0.0;
  bool boundary = false;  // ends on a curve (true) or on a node (false)
};

Arm find_arm(const Geometry& geo, double x, double y, double dx, double dy) {
  Arm a;
  const double xn = x + dx, yn = y + dy;
  a.bx = xn;
  a.by = yn;
  if (geo.in_wedge(xn, yn)) return a;
  const bool above = yn >= geo.up(xn);
  const Curve& c = above ? geo.up : geo.lo;
  auto q = [&](double t) { return c(x + t * dx) - (y + t * dy); };
  double t;
  if (q(1.0) == 0.0) {
    t = 1.0;
  } else if (dx == 0.0) {
    t = (c(x) - y) / dy;
  } else {
    boost::uintmax_t it = 100;
    const auto r = boost::math::tools::toms748_solve(q, 0.0, 1.0, boost::math::tools::eps_tolerance<double>(52), it);
    t = 0.5 * (r.first + r.second);
  }
  a.t = std::clamp(t, 0.0, 1.0);
  a.bx = x + a.t * dx;
  a.by = c(a.bx);
  a.boundary = true;
  return a;
}

}  // namespace

GridFunction solve_regularized(const EllipticProblem& p, double delta, LinearSolveStats* stats) {
  if (!(delta > 0.0)) throw Error(ErrorKind::Config, "delta must be positive");
  const Grid2D& g = p.map.grid();
  const CoefficientSet& cf = p.coeffs;
  const Geometry geo{g, p.spec.kappa_upper(), p.spec.kappa_lower(), p.map, cf.K};
  const Layout L = make_layout(geo);
  const auto n = static_cast<Eigen::Index>(L.nodes.size());
  const double h = g.h;

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  Eigen::VectorXd rhs(n);
  const bool zero_g = p.dirichlet.is_zero();

  for (Eigen::Index r = 0; r < n; ++r) {
    const auto [i, j] = L.nodes[static_cast<std::size_t>(r)];
    const double x = g.x(i), y = g.y(j);
    double b = cf.f(x, y);
    double diag = cf.c.is_zero() ? 0.0 : cf.c(x, y);
    const double axx = cf.a(x, y) * (cf.K(x, y) + delta);
    const double bx = cf.b1.is_zero() ? 0.0 : cf.b1(x, y);
    const double by = cf.b2.is_zero() ? 0.0 : cf.b2(x, y);

    bool dirichlet_node = false;
    struct Side {
      double arm;
      int col;
      double value;
    };
    auto side = [&](int di, int dj) {
      const int u = i + di, v = j + dj;
      Side s{h, -1, 0.0};
      if (g.contains(u, v) && L.idx[g.index(u, v)] >= 0) {
        s.col = L.idx[g.index(u, v)];
        return s;
      }
      const Arm a = find_arm(geo, x, y, di * h, dj * h);
      if (a.t < kMinArm) dirichlet_node = true;
      s.arm = std::max(a.t, kMinArm) * h;
      s.value = zero_g ? 0.0 : p.dirichlet(a.bx, a.by);
      return s;
    };
    const Side xm = side(-1, 0), xp = side(1, 0), ym = side(0, -1), yp = side(0, 1);
    if (dirichlet_node) {
      trip.emplace_back(r, r, 1.0);
      rhs(r) = zero_g ? 0.0 : p.dirichlet(x, y);
      continue;
    }
    // second and first derivative weights on a nonuniform three-point stencil
    auto add_axis = [&](const Side& m, const Side& pl, double c2, double c1) {
      const double hm = m.arm, hp = pl.arm, s = hm + hp;
      const double wm = c2 * 2.0 / (hm * s) - c1 * hp * hp / (hm * hp * s);
      const double wp = c2 * 2.0 / (hp * s) + c1 * hm * hm / (hm * hp * s);
      diag += -c2 * 2.0 / (hm * hp) + c1 * (hp * hp - hm * hm) / (hm * hp * s);
      if (m.col >= 0) trip.emplace_back(r, m.col, wm);
      else b -= wm * m.value;
      if (pl.col >= 0) trip.emplace_back(r, pl.col, wp);
      else b -= wp * pl.value;
    };
    add_axis(xm, xp, axx, bx);
    add_axis(ym, yp, 1.0, by);
    trip.emplace_back(r, r, diag);
    rhs(r) = b;
  }

  Eigen::SparseMatrix<double, Eigen::RowMajor> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  Eigen::VectorXd sol(n);
  LinearSolveStats st;
  st.unknowns = static_cast<std::size_t>(n);
  const double bnorm = rhs.norm();
  if (n == 0 || bnorm == 0.0) {
    sol.setZero();
    st.method = "trivial";
  } else {
    bool done = false;
    if (static_cast<std::size_t>(n) > p.direct_threshold) {
      Eigen::BiCGSTAB<Eigen::SparseMatrix<double, Eigen::RowMajor>, Eigen::IncompleteLUT<double>> it;
      it.preconditioner().setDroptol(1e-5);
      it.preconditioner().setFillfactor(20);
      it.setTolerance(p.solver_tol * 0.1);
      it.setMaxIterations(p.max_iterations);
      it.compute(A);
      if (it.info() == Eigen::Success) {
        sol = it.solve(rhs);
        st.iterations = static_cast<int>(it.iterations());
        st.method = "bicgstab+ilut";
        done = it.info() == Eigen::Success && (A * sol - rhs).norm() <= p.solver_tol * bnorm;
      }
    }
    if (!done) {
      Eigen::SparseMatrix<double> Ac(A);
      Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
      lu.compute(Ac);
      if (lu.info() != Eigen::Success) throw Error(ErrorKind::SolverDivergence, "sparse LU factorization failed: " + lu.lastErrorMessage());
      sol = lu.solve(rhs);
      st.method = "sparse_lu";
    }
    st.relative_residual = (A * sol - rhs).norm() / bnorm;
    if (!(st.relative_residual <= p.solver_tol))
      throw Error(ErrorKind::SolverDivergence, "relative residual " + std::to_string(st.relative_residual));
  }
  if (stats) *stats = st;

  Mask m(g.size(), 0);
  GridFunction u(g, m);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto [i, j] = L.nodes[static_cast<std::size_t>(r)];
    u.define(i, j, sol(r));
  }
  if (p.check_max_principle) {
    // with c <= 0, f <= 0 and g = 0 the solution stays nonnegative
    const double tol = 1e-8 * std::max(1.0, u.max_abs());
    for (std::size_t q = 0; q < g.size(); ++q)
      if (u.mask()[q] && u.values()[q] < -tol)
        throw Error(ErrorKind::MaximumPrincipleViolation, "u = " + std::to_string(u.values()[q]));
  }
  return u;
}

namespace {

// u_y on a curve from the elliptic side, one column at a time: one-sided
// differences through the curve point and kPsiNodes interior nodes. Columns
// too short for that (within about 2h of the corner) are skipped: there the
// stencil would have to span the whole column and its error is O(x^2), not
// O(h^2), which biases the corner jets.
constexpr int kPsiNodes = 4;

std::vector<std::pair<double, double>> extract_psi(const EllipticProblem& p, const GridFunction& u, bool upper,
                                                   double x_max) {
  const Grid2D& g = u.grid();
  const Curve up = p.spec.kappa_upper(), lo = p.spec.kappa_lower();
  const Curve& c = upper ? up : lo;
  const Curve& other = upper ? lo : up;
  const int dir = upper ? -1 : 1;  // towards the interior
  const auto gval = [&](double x, double y) { return p.dirichlet.is_zero() ? 0.0 : p.dirichlet(x, y); };
  std::vector<std::pair<double, double>> out;
  std::vector<double> ts, vs;
  for (int i = 0; i < g.nx; ++i) {
    const double x = g.x(i);
    if (x == 0.0 || std::abs(x) > x_max) continue;
    const double yc = c(x), yo = other(x);  // the last node must stay short of the opposite curve
    // first node strictly inside
    int j = upper ? static_cast<int>(std::ceil(yc / g.h - 1e-12)) - 1 + g.j0 : static_cast<int>(std::floor(yc / g.h + 1e-12)) + 1 + g.j0;
    if (std::abs(g.y(j) - yc) < 1e-6 * g.h) j += dir;  // a Dirichlet node, not interior
    if (!u.defined(i, j)) continue;
    ts.assign({yc});
    vs.assign({gval(x, yc)});
    for (int k = 0; k < kPsiNodes && u.defined(i, j + k * dir); ++k) {
      const double y = g.y(j + k * dir);
      if (std::abs(y - ts.back()) < 1e-12) break;
      ts.push_back(y);
      vs.push_back(u(i, j + k * dir));
    }
    if (static_cast<int>(ts.size()) <= kPsiNodes || dir * (yo - ts.back()) <= 0.0) continue;
    out.emplace_back(x, numerics::lagrange_derivative(ts, vs, yc));
  }
  return out;
}

}  // namespace

EllipticSolution continue_to_degenerate(const EllipticProblem& p) {
  if (p.delta_schedule.size() < 3) throw Error(ErrorKind::Config, "delta schedule needs at least three entries");
  for (std::size_t k = 1; k < p.delta_schedule.size(); ++k)
    if (!(p.delta_schedule[k] < p.delta_schedule[k - 1]) || !(p.delta_schedule[k] > 0.0))
      throw Error(ErrorKind::Config, "delta schedule must be positive and decreasing");
  EllipticSolution s;
  GridFunction prev;
  for (double d : p.delta_schedule) {
    LinearSolveStats st;
    GridFunction u = solve_regularized(p, d, &st);
    s.deltas.push_back(d);
    s.solves.push_back(st);
    s.linf.push_back(u.max_abs());
    if (!prev.values().empty()) s.gaps.push_back((u - prev).l2());
    prev = std::move(u);
  }
  s.u = prev;
  // Gaps must shrink along the schedule; vanishing gaps are fine.
  const double scale = std::max(1.0, s.linf.back());
  for (std::size_t k = 1; k < s.gaps.size(); ++k) {
    if (s.gaps[k] <= 1e-13 * scale) continue;
    if (!(s.gaps[k] < s.gaps[k - 1]))
      throw Error(ErrorKind::ContinuationStall, "continuation gap grew from " + std::to_string(s.gaps[k - 1]) + " to " +
                                                    std::to_string(s.gaps[k]));
  }

  const Curve up = p.spec.kappa_upper(), lo = p.spec.kappa_lower();
  const Grid2D& g = s.u.grid();
  s.phi_upper = Trace::from_field(p.dirichlet, up, false);
  s.phi_lower = Trace::from_field(p.dirichlet, lo, false);

  // u_y(0): both curves carry u = g, so u_x + kappa'(0+-) u_y = d/dx g(x, kappa(x)) at 0+-.
  {
    const double kp = up.slope(0.0, Side::Right), km = up.slope(0.0, Side::Left);
    const double dp = s.phi_upper.jet(0.0, Side::Right, 1)[1], dm = s.phi_upper.jet(0.0, Side::Left, 1)[1];
    s.psi_corner = (dp - dm) / (kp - km);
  }
  // Sample the traces where the curve stays clear of the outer boundary.
  const double reach = p.spec.radius_outer - p.map.fillet_radius() - 3 * g.h;
  double xmax = 0.0;
  for (int i = g.i0; i < g.nx; ++i) {
    const double x = g.x(i);
    if (x * x + up(x) * up(x) <= reach * reach && x * x + lo(x) * lo(x) <= reach * reach &&
        x * x + up(-x) * up(-x) <= reach * reach && x * x + lo(-x) * lo(-x) <= reach * reach)
      xmax = x;
  }
  s.trace_x_max = xmax;
  for (int pass = 0; pass < 2; ++pass) {
    auto pts = extract_psi(p, s.u, pass == 0, xmax);
    pts.emplace_back(0.0, s.psi_corner);
    std::sort(pts.begin(), pts.end());
    std::vector<double> xs, vs;
    for (auto& [x, v] : pts) {
      xs.push_back(x);
      vs.push_back(v);
    }
    Trace t = xs.size() >= 4 ? Trace::sampled(xs, vs) : Trace();
    (pass == 0 ? s.psi_upper : s.psi_lower) = t;
  }
  return s;
}

double estimate_ratio(const EllipticSolution& sol, const ScalarField& f, int m) {
  const double nf = field_sobolev_norm(f, sol.u.grid(), sol.u.mask(), m + 1);
  const double nu = sobolev_norm(sol.u, m).value;
  if (nf == 0.0) return nu == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return nu / nf;
}

namespace {

Jet scaled(const Jet& j, double kappa, double factor, int order) {
  Jet r(order);
  for (int n = 0; n <= order; ++n)
    for (int l = 0; l <= n; ++l) r.coeff(n - l, l) = (n <= j.order() ? j.coeff(n - l, l) : 0.0) * std::pow(kappa, -(n - l)) * factor;
  return r;
}

}  // namespace

TaylorCorrection taylor_correction(const OriginJets& jets, int m, double kappa) {
  if (m < 2) throw Error(ErrorKind::Config, "taylor_correction needs m >= 2");
  if (!(kappa > 0.0)) throw Error(ErrorKind::Config, "opening slope must be positive");
  // Work in xs = kappa x where the wedge is |y| < |xs|.
  const Jet a = scaled(jets.a, kappa, kappa * kappa, m);
  const Jet b1 = scaled(jets.b1, kappa, kappa, m);
  const Jet b2 = scaled(jets.b2, kappa, 1.0, m);
  const Jet c = scaled(jets.c, kappa, 1.0, m);
  const Jet f = scaled(jets.f, kappa, 1.0, m);
  const double a0 = a.value();

  TaylorCorrection out;
  out.opening = a0;
  Jet P(m);  // sum of the Q_k found so far
  auto L0 = [&](const Jet& q) { return partial_y(partial_y(q)) + a0 * partial_x(partial_x(q)); };
  auto rest = [&](const Jet& q) {
    Jet qxx = partial_x(partial_x(q));
    Jet r = (a - a0) * qxx + b1 * partial_x(q) + b2 * partial_y(q) + c * q;
    return r;
  };
  for (int k = 2; k <= m; ++k) {
    const int nk = k - 1;
    const Jet ft = f - rest(P);
    Eigen::MatrixXd M(nk, nk);
    Eigen::VectorXd rhs(nk);
    for (int r = 0; r < nk; ++r) rhs(r) = ft.coeff(k - 2 - r, r);
    for (int i = 0; i < nk; ++i) {
      Jet B(m);  // (xs^2 - y^2) xs^(k-2-i) y^i
      B.coeff(k - i, i) += 1.0;
      B.coeff(k - 2 - i, i + 2) -= 1.0;
      const Jet LB = L0(B);
      for (int r = 0; r < nk; ++r) M(r, i) = LB.coeff(k - 2 - r, r);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    const auto sv = svd.singularValues();
    if (sv(nk - 1) <= 1e-12 * sv(0))
      throw Error(ErrorKind::SingularSystem, "correction system of degree " + std::to_string(k) + " is singular");
    const Eigen::VectorXd sol = M.colPivHouseholderQr().solve(rhs);
    out.max_residual = std::max(out.max_residual, (M * sol - rhs).lpNorm<Eigen::Infinity>());
    std::vector<double> ck(static_cast<std::size_t>(nk));
    for (int i = 0; i < nk; ++i) {
      ck[static_cast<std::size_t>(i)] = sol(i);
      P.coeff(k - i, i) += sol(i);
      P.coeff(k - 2 - i, i + 2) -= sol(i);
    }
    out.c.push_back(std::move(ck));
  }
  return out;
}

}  // namespace mixtype
