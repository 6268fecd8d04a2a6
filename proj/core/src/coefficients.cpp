#include "mixtype/coefficients.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "mixtype/errors.hpp"

namespace mixtype {

namespace {

template <class Fn>
InvariantCheck scan(std::string name, const RegionMap& map, Fn violation) {
  InvariantCheck r;
  r.name = std::move(name);
  r.worst = -std::numeric_limits<double>::infinity();
  const Grid2D& g = map.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      double v;
      if (!violation(i, j, g.x(i), g.y(j), v)) continue;
      ++r.nodes;
      r.worst = std::max(r.worst, v);
    }
  if (r.nodes == 0) r.worst = 0.0;
  r.pass = r.worst <= 0.0;
  return r;
}

}  // namespace

InvariantCheck check_a_bounds(const CoefficientSet& c, const RegionMap& map) {
  return scan("a_bounds", map, [&](int i, int j, double x, double y, double& v) {
    if (map.at(i, j) == Region::Exterior) return false;
    const double a = c.a(x, y);
    v = std::max(c.lambda_lo - a, a - c.Lambda_hi);
    return true;
  });
}

InvariantCheck levy_check(const CoefficientSet& c, const RegionMap& map) {
  const ScalarField Kx = c.K.dx();
  const bool zero = c.b1.is_zero();
  return scan("levy", map, [&](int i, int j, double x, double y, double& v) {
    if (map.at(i, j) == Region::Exterior) return false;
    v = zero ? 0.0 : std::abs(c.b1(x, y)) - c.C_b * (std::sqrt(std::abs(c.K(x, y))) + std::abs(Kx(x, y)));
    return true;
  });
}

InvariantCheck degeneracy_check(const CoefficientSet& c, const RegionMap& map, const Curve& kappa_up,
                                const Curve& kappa_down) {
  const ScalarField Kx = c.K.dx(), Ky = c.K.dy();
  return scan("degeneracy", map, [&](int i, int j, double x, double y, double& v) {
    const Region r = map.at(i, j);
    if (r != Region::HyperbolicUp && r != Region::HyperbolicDown) return false;
    const double kx = Kx(x, y), ky = Ky(x, y), k = c.K(x, y);
    const double dist = std::abs(y - (r == Region::HyperbolicUp ? kappa_up(x) : kappa_down(x)));
    v = std::max(kx * kx - c.C_K * c.C_K * std::abs(ky), std::pow(dist, c.d) - c.C_K * std::abs(k));
    return true;
  });
}

InvariantCheck c_sign_check(const CoefficientSet& c, const RegionMap& map) {
  return scan("c_sign", map, [&](int i, int j, double x, double y, double& v) {
    if (map.at(i, j) != Region::EllipticPlus) return false;
    v = c.c(x, y) - c.eps_c;
    return true;
  });
}

std::vector<InvariantCheck> check_invariants(const CoefficientSet& c, const RegionMap& map, const Curve& kappa_up,
                                             const Curve& kappa_down) {
  return {check_a_bounds(c, map), levy_check(c, map), degeneracy_check(c, map, kappa_up, kappa_down),
          c_sign_check(c, map)};
}

ScalarField manufacture_linear(const ScalarField& u, const CoefficientSet& c) {
  if (u.is_zero()) return ScalarField();
  const ScalarField ux = u.dx(), uy = u.dy();
  ScalarField f = uy.dy() + c.A() * ux.dx();
  if (!c.b1.is_zero()) f = f + c.b1 * ux;
  if (!c.b2.is_zero()) f = f + c.b2 * uy;
  if (!c.c.is_zero()) f = f + c.c * u;
  return f;
}

ScalarField manufacture_monge_ampere(const ScalarField& u, const ScalarField& K, double R) {
  const ScalarField ux = u.dx(), uy = u.dy();
  const ScalarField uxx = ux.dx(), uyy = uy.dy(), uxy = ux.dy();
  const ScalarField det = uxx * uyy - uxy * uxy;
  // Sample the zero set of K on horizontal and vertical segments.
  const int n = 64;
  const double step = 2.0 * R / n;
  double scale = 0.0, worst = 0.0;
  auto check_root = [&](auto g, double a, double b, auto point) {
    if (g(a) * g(b) > 0.0) return;
    boost::uintmax_t it = 80;
    const auto rt = boost::math::tools::toms748_solve(g, a, b, boost::math::tools::eps_tolerance<double>(50), it);
    const auto [x, y] = point(0.5 * (rt.first + rt.second));
    worst = std::max(worst, std::abs(det(x, y)));
  };
  for (int p = 0; p <= n; ++p) {
    const double s = -R + p * step;
    for (int q = 0; q < n; ++q) {
      const double a = -R + q * step, b = a + step;
      scale = std::max(scale, std::abs(det(a, s)));
      if (K(a, s) == 0.0 || K(s, a) == 0.0) {
        worst = std::max({worst, K(a, s) == 0.0 ? std::abs(det(a, s)) : 0.0, K(s, a) == 0.0 ? std::abs(det(s, a)) : 0.0});
        continue;
      }
      check_root([&](double t) { return K(t, s); }, a, b, [&](double t) { return std::pair{t, s}; });
      check_root([&](double t) { return K(s, t); }, a, b, [&](double t) { return std::pair{s, t}; });
    }
  }
  if (worst > 1e-8 * std::max(scale, 1.0))
    throw Error(ErrorKind::DivisionByDegeneracy,
                "det D^2 u does not vanish where K does (|det| = " + std::to_string(worst) + ")");
  if (u.expr() && K.expr()) {
    const Expr e = *det.expr() / *K.expr();
    return ScalarField(e);
  }
  return ScalarField::function([det, K](double x, double y) { return det(x, y) / K(x, y); }, 1e-3, "det/K");
}

}  // namespace mixtype
