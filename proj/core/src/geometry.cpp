#include "mixtype/geometry.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <memory>

#include "mixtype/errors.hpp"

namespace mixtype {

Grid2D Grid2D::covering(double radius, double h, int margin) {
  if (!(h > 0.0) || !(radius > 0.0)) throw Error(ErrorKind::Config, "grid spacing and radius must be positive");
  Grid2D g;
  g.h = h;
  const int half = static_cast<int>(std::ceil(radius / h - 1e-9)) + margin;
  g.i0 = g.j0 = half;
  g.nx = g.ny = 2 * half + 1;
  return g;
}

Grid2D Grid2D::box(double half_x, double half_y, double h) {
  Grid2D g;
  g.h = h;
  g.i0 = static_cast<int>(std::ceil(half_x / h - 1e-9));
  g.j0 = static_cast<int>(std::ceil(half_y / h - 1e-9));
  g.nx = 2 * g.i0 + 1;
  g.ny = 2 * g.j0 + 1;
  return g;
}

double Grid2D::reach() const {
  const int lo = std::min(std::min(i0, j0), std::min(nx - 1 - i0, ny - 1 - j0));
  return lo * h;
}

Curve DomainSpec::kappa_upper() const { return Curve::piecewise(gamma2, gamma1); }

Curve DomainSpec::kappa_lower() const { return Curve::piecewise(gamma1, gamma2); }

void DomainSpec::validate() const {
  if (!(radius_inner > 0.0) || !(radius_outer > radius_inner))
    throw Error(ErrorKind::Config, "need 0 < radius_inner < radius_outer");
  if (std::abs(gamma1(0.0)) > 1e-12 || std::abs(gamma2(0.0)) > 1e-12)
    throw Error(ErrorKind::TransversalityViolation, "degeneracy curves must pass through the origin");
  for (Side s : {Side::Left, Side::Right}) {
    const double gap = std::abs(gamma1.slope(0.0, s) - gamma2.slope(0.0, s));
    if (gap < transversality_tol)
      throw Error(ErrorKind::TransversalityViolation,
                  std::string("curves tangent at the origin from the ") + (s == Side::Left ? "left" : "right"));
  }
  const Curve up = kappa_upper(), lo = kappa_lower();
  const int n = 200;
  for (int k = 1; k <= n; ++k) {
    for (double sgn : {-1.0, 1.0}) {
      const double x = sgn * radius_outer * k / n;
      if (!(up(x) > 0.0) || !(lo(x) < 0.0))
        throw Error(ErrorKind::TransversalityViolation, "curves must separate above and below the x-axis away from 0");
    }
  }
}

DomainSpec cross_domain(double radius_inner, double radius_outer) {
  DomainSpec d;
  d.radius_inner = radius_inner;
  d.radius_outer = radius_outer;
  d.gamma1 = Curve::analytic(Expr::parse("-x"));
  d.gamma2 = Curve::analytic(Expr::parse("x"));
  return d;
}

const char* region_name(Region r) {
  switch (r) {
    case Region::EllipticPlus: return "elliptic";
    case Region::HyperbolicUp: return "hyperbolic_up";
    case Region::HyperbolicDown: return "hyperbolic_down";
    case Region::Degenerate: return "degenerate";
    case Region::Exterior: return "exterior";
  }
  return "?";
}

RegionMap::RegionMap(Grid2D grid, std::vector<Region> labels, double fillet_radius, int fillet_nodes)
    : grid_(grid), labels_(std::move(labels)), fillet_radius_(fillet_radius), fillet_nodes_(fillet_nodes) {}

std::size_t RegionMap::count(Region r) const {
  std::size_t n = 0;
  for (Region l : labels_) n += l == r;
  return n;
}

namespace {

// Flood-fills 4-connected components of nodes accepted by `in`; returns the
// component id per node (-1 outside) and the number of components.
template <class Pred>
std::vector<int> label_components(const Grid2D& g, Pred in, int& count) {
  std::vector<int> comp(g.size(), -1);
  count = 0;
  std::deque<std::pair<int, int>> queue;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!in(i, j) || comp[g.index(i, j)] >= 0) continue;
      comp[g.index(i, j)] = count;
      queue.emplace_back(i, j);
      while (!queue.empty()) {
        auto [a, b] = queue.front();
        queue.pop_front();
        const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int q = 0; q < 4; ++q) {
          const int u = a + di[q], v = b + dj[q];
          if (!g.contains(u, v) || !in(u, v) || comp[g.index(u, v)] >= 0) continue;
          comp[g.index(u, v)] = count;
          queue.emplace_back(u, v);
        }
      }
      ++count;
    }
  }
  return comp;
}

}  // namespace

int RegionMap::components(Region r) const {
  int n = 0;
  label_components(grid_, [&](int i, int j) { return at(i, j) == r; }, n);
  return n;
}

void RegionMap::write_csv(const std::string& path) const {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw Error(ErrorKind::Config, "cannot write " + path);
  std::fputs("x,y,label\n", f.get());
  for (int j = 0; j < grid_.ny; ++j)
    for (int i = 0; i < grid_.nx; ++i)
      std::fprintf(f.get(), "%.17g,%.17g,%s\n", grid_.x(i), grid_.y(j), region_name(at(i, j)));
}

RegionMap build_region_map(const DomainSpec& spec, const Grid2D& grid, const ScalarField& K) {
  spec.validate();
  if (grid.reach() + 1e-12 < spec.radius_outer)
    throw Error(ErrorKind::CoverageError, "grid does not cover radius_outer");

  const std::size_t n = grid.size();
  std::vector<double> k(n);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) k[grid.index(i, j)] = K(grid.x(i), grid.y(j));

  std::vector<Region> lab(n, Region::Exterior);
  const double R = spec.radius_outer;
  for (int j = 0; j < grid.ny; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i), y = grid.y(j);
      if (x * x + y * y > R * R * (1.0 + 1e-12)) continue;
      const double kv = k[grid.index(i, j)];
      bool degenerate = kv == 0.0;
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int q = 0; q < 4 && !degenerate; ++q) {
        const int u = i + di[q], v = j + dj[q];
        if (grid.contains(u, v) && kv * k[grid.index(u, v)] < 0.0) degenerate = true;
      }
      if (degenerate) lab[grid.index(i, j)] = Region::Degenerate;
      else lab[grid.index(i, j)] = kv > 0.0 ? Region::EllipticPlus : Region::HyperbolicUp;
    }
  }

  // Hyperbolic components: above or below the x-axis on average.
  int ncomp = 0;
  const auto comp = label_components(grid, [&](int i, int j) { return lab[grid.index(i, j)] == Region::HyperbolicUp; }, ncomp);
  std::vector<double> ysum(static_cast<std::size_t>(ncomp), 0.0);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (comp[grid.index(i, j)] >= 0) ysum[static_cast<std::size_t>(comp[grid.index(i, j)])] += grid.y(j);
  for (std::size_t q = 0; q < n; ++q)
    if (comp[q] >= 0 && ysum[static_cast<std::size_t>(comp[q])] < 0.0) lab[q] = Region::HyperbolicDown;

  // Round the corners of the elliptic region where the curves meet the outer
  // circle: nodes between the corner and a tangent fillet arc become exterior.
  const double rho = spec.fillet_cells * grid.h;
  int cut = 0;
  if (rho > 0.0) {
    const Curve up = spec.kappa_upper(), lo = spec.kappa_lower();
    for (int c = 0; c < 2; ++c) {
      const Curve& kap = c == 0 ? up : lo;
      for (double sgn : {-1.0, 1.0}) {
        auto g = [&](double x) { return x * x + kap(x) * kap(x) - R * R; };
        double a = 0.0, b = sgn * R;
        if (g(b) < 0.0) continue;  // curve stays inside the disk
        if (a > b) std::swap(a, b);
        boost::uintmax_t iters = 100;
        const auto root = boost::math::tools::toms748_solve(g, a, b, boost::math::tools::eps_tolerance<double>(50), iters);
        const double xp = 0.5 * (root.first + root.second), yp = kap(xp);
        const double slope = kap.slope(xp, sgn > 0 ? Side::Right : Side::Left);
        const double tn = std::hypot(1.0, slope);
        const double tx = 1.0 / tn, ty = slope / tn;
        // normal pointing into the elliptic side
        double nxv = slope / tn, nyv = -1.0 / tn;
        if (c == 1) nxv = -nxv, nyv = -nyv;
        const double qx = xp + rho * nxv, qy = yp + rho * nyv;
        const double bq = qx * tx + qy * ty;
        const double cq = qx * qx + qy * qy - (R - rho) * (R - rho);
        const double disc = bq * bq - cq;
        if (disc < 0.0) continue;
        const double s1 = -bq - std::sqrt(disc), s2 = -bq + std::sqrt(disc);
        const double s = std::abs(s1) < std::abs(s2) ? s1 : s2;
        const double cx = qx + s * tx, cy = qy + s * ty;
        const double reach = std::hypot(cx - xp, cy - yp);
        for (int j = 0; j < grid.ny; ++j) {
          for (int i = 0; i < grid.nx; ++i) {
            Region& l = lab[grid.index(i, j)];
            if (l != Region::EllipticPlus) continue;
            const double x = grid.x(i), y = grid.y(j);
            if (std::hypot(x - cx, y - cy) > rho && std::hypot(x - xp, y - yp) < reach) {
              l = Region::Exterior;
              ++cut;
            }
          }
        }
      }
    }
  }
  return RegionMap(grid, std::move(lab), rho, cut);
}

SpacelikeReport spacelike_check(const Curve& kappa, const ScalarField& a, const ScalarField& Kh, double eta0,
                                double x_lo, double x_hi, int samples) {
  SpacelikeReport r;
  r.eta0 = eta0;
  r.sup = -std::numeric_limits<double>::infinity();
  auto visit = [&](double x, Side side) {
    const double s = kappa.slope(x, side);
    const double y = kappa(x);
    const double v = a(x, y) * Kh(x, y) * s * s;
    if (v > r.sup) {
      r.sup = v;
      r.at_x = x;
    }
  };
  for (int q = 0; q < samples; ++q) {
    const double x = x_lo + (x_hi - x_lo) * q / std::max(samples - 1, 1);
    if (x == 0.0) continue;
    visit(x, x < 0.0 ? Side::Left : Side::Right);
  }
  if (x_lo <= 0.0 && x_hi >= 0.0) {
    visit(0.0, Side::Left);
    visit(0.0, Side::Right);
  }
  r.pass = eta0 < 1.0 && r.sup <= eta0;
  return r;
}

OrientationReport orientation_check(const RegionMap& map, const ScalarField& K) {
  OrientationReport r;
  const Grid2D& g = map.grid();
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      const Region l = map.at(i, j);
      if (l != Region::HyperbolicUp && l != Region::HyperbolicDown) continue;
      bool on_band = false;
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int q = 0; q < 4; ++q) {
        const int u = i + di[q], v = j + dj[q];
        if (g.contains(u, v) && map.at(u, v) == Region::Degenerate) on_band = true;
      }
      if (!on_band) continue;
      ++r.checked;
      // entering the component means K keeps decreasing along the march
      const double step = l == Region::HyperbolicUp ? g.h : -g.h;
      const double x = g.x(i), y = g.y(j);
      if (K(x, y + step) - K(x, y - step) > 0.0) ++r.failed;
    }
  }
  r.pass = r.failed == 0;
  return r;
}

}  // namespace mixtype
