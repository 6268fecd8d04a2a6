#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "mixtype/compat.hpp"
#include "mixtype/errors.hpp"

using namespace mixtype;

namespace {

const Curve kAbs = Curve::parse("x", "-x");

CoefficientSet tricomi(ScalarField u = ScalarField()) {
  CoefficientSet c;
  c.K = ScalarField::parse("x^2 - y^2");
  c.f = manufacture_linear(u, c);
  return c;
}

// Taylor coefficients of a polynomial sum c_ab x^a y^b re-expanded at (x0, y0).
using Poly = std::map<std::pair<int, int>, double>;
double shifted_coeff(const Poly& p, double x0, double y0, int k, int l) {
  auto binom = [](int n, int r) { return std::tgamma(n + 1.0) / (std::tgamma(r + 1.0) * std::tgamma(n - r + 1.0)); };
  double s = 0.0;
  for (const auto& [ab, c] : p) {
    const auto [a, b] = ab;
    if (a < k || b < l) continue;
    s += c * binom(a, k) * std::pow(x0, a - k) * binom(b, l) * std::pow(y0, b - l);
  }
  return s;
}

}  // namespace

TEST_CASE("first condition at a corner") {
  CauchyTrace t{kAbs, Trace(), Trace()};
  CompatReport r = check_compatibility(t, tricomi(), 1);
  CHECK(r.residuals[0] == 0.0);
  CHECK(r.ok());

  for (double psi0 : {1.0, -0.37, 3e-5}) {
    const std::string s = std::to_string(psi0);
    t.psi = Trace::analytic(Expr::parse(s), Expr::parse(s));
    r = check_compatibility(t, tricomi(), 1);
    CHECK(r.residuals[0] == 2.0 * std::abs(psi0));
    CHECK_FALSE(r.ok());
  }
}

TEST_CASE("traces of a smooth solution are compatible") {
  const ScalarField u = ScalarField::parse("(x^2 - y^2)^2");
  const CauchyTrace t{kAbs, Trace::from_field(u, kAbs, false), Trace::from_field(u, kAbs, true)};
  const CompatReport r = check_compatibility(t, tricomi(u), 4);
  REQUIRE(r.residuals.size() == 4);
  for (double v : r.residuals) CHECK(v <= 1e-8);
  CHECK(r.ok());
  // closed-form corner derivatives: x^4 - 2 x^2 y^2 + y^4
  CHECK(r.corner_jet.coeff(4, 0) == doctest::Approx(1.0));
  CHECK(r.corner_jet.coeff(2, 2) == doctest::Approx(-2.0));
  CHECK(r.corner_jet.coeff(0, 4) == doctest::Approx(1.0));
  CHECK(std::abs(r.corner_jet.coeff(3, 1)) < 1e-12);
}

TEST_CASE("corner determinant follows (1 + A kappa'^2)^(n-1)") {
  CoefficientSet c;
  c.K = ScalarField::constant(-0.25);
  const ScalarField u = ScalarField::parse("exp(x)*cos(y) + x*y^2");
  c.f = manufacture_linear(u, c);
  const CauchyTrace t{kAbs, Trace::from_field(u, kAbs, false), Trace::from_field(u, kAbs, true)};
  const CompatReport r = check_compatibility(t, c, 5);
  for (int n = 1; n <= 5; ++n) CHECK(r.determinant_trail[n - 1] == doctest::Approx(std::pow(0.75, n - 1)));
  for (double v : r.residuals) CHECK(v <= 1e-8 * r.scale);
}

TEST_CASE("characteristic corner is rejected") {
  CoefficientSet c;
  c.K = ScalarField::constant(-1.0);
  try {
    (void)check_compatibility(CauchyTrace{kAbs, Trace(), Trace()}, c, 2);
    FAIL("characteristic corner accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CharacteristicCorner);
  }
}

TEST_CASE("reflection leaves residual magnitudes unchanged") {
  CoefficientSet c;
  c.K = ScalarField::parse("x^2 - y^2 + x*y");
  c.b1 = ScalarField::parse("0.3*x + y");
  c.b2 = ScalarField::parse("1 + x");
  c.c = ScalarField::parse("-x*y");
  c.f = ScalarField::parse("sin(x) + y^2");
  const Curve kap = Curve::parse("x + x^2", "-2*x");
  const CauchyTrace t{kap, Trace::analytic(Expr::parse("x^2 + x^3"), Expr::parse("-x")),
                      Trace::analytic(Expr::parse("0.5 + x"), Expr::parse("0.5 - 2*x^2"))};
  CoefficientSet cr;  // x -> -x, with b1 changing sign
  cr.K = ScalarField::parse("x^2 - y^2 - x*y");
  cr.b1 = ScalarField::parse("0.3*x - y");
  cr.b2 = ScalarField::parse("1 - x");
  cr.c = ScalarField::parse("x*y");
  cr.f = ScalarField::parse("-sin(x) + y^2");
  const CompatReport a = check_compatibility(t, c, 5);
  const CompatReport b = check_compatibility(t.reflected_x(), cr, 5);
  for (int n = 0; n < 5; ++n) CHECK(b.residuals[n] == doctest::Approx(a.residuals[n]).epsilon(1e-12));
  CHECK_FALSE(a.ok());
}

TEST_CASE("smooth initial curve: only jet mismatches count") {
  const Curve line = Curve::parse("0.5*x", "0.5*x");
  CauchyTrace t{line, Trace::analytic(Expr::parse("x"), Expr::parse("x")), Trace::analytic(Expr::parse("2"), Expr::parse("2"))};
  CHECK(check_compatibility(t, tricomi(), 1).residuals[0] == 0.0);
  t.phi = Trace::analytic(Expr::parse("x"), Expr::parse("0.25*x"));
  CHECK(check_compatibility(t, tricomi(), 1).residuals[0] == doctest::Approx(0.75));
}

TEST_CASE("resolved jets reproduce a solution at smooth points") {
  const ScalarField u = ScalarField::parse("(x^2 - y^2)^2");
  const CauchyTrace t{kAbs, Trace::from_field(u, kAbs, false), Trace::from_field(u, kAbs, true)};
  const Poly p{{{4, 0}, 1.0}, {{2, 2}, -2.0}, {{0, 4}, 1.0}};
  for (double x0 : {0.3, -0.7}) {
    const Jet U = resolve_jet(t, tricomi(u), x0, x0 > 0 ? Side::Right : Side::Left, 4);
    const double y0 = std::abs(x0);
    for (int n = 0; n <= 4; ++n)
      for (int l = 0; l <= n; ++l)
        CHECK(U.coeff(n - l, l) == doctest::Approx(shifted_coeff(p, x0, y0, n - l, l)).scale(1.0).epsilon(1e-10));
  }
}

TEST_CASE("resolved jets satisfy the equation to order m - 2") {
  CoefficientSet c;
  c.K = ScalarField::parse("x^2 - y^2");
  c.b1 = ScalarField::parse("x");
  c.b2 = ScalarField::parse("cos(y)");
  c.c = ScalarField::parse("-1 - x^2");
  c.f = ScalarField::parse("exp(x - y)");
  const CauchyTrace t{kAbs, Trace::analytic(Expr::parse("sin(x)"), Expr::parse("x^2")),
                      Trace::analytic(Expr::parse("1 + x"), Expr::parse("1 - x"))};
  const int m = 5;
  const Jet U = resolve_jet(t, c, 0.4, Side::Right, m);
  const Jet A = c.A().jet(0.4, 0.4, m - 2), b1 = c.b1.jet(0.4, 0.4, m - 2), b2 = c.b2.jet(0.4, 0.4, m - 2);
  const Jet cc = c.c.jet(0.4, 0.4, m - 2), f = c.f.jet(0.4, 0.4, m - 2);
  const Jet R = partial_y(partial_y(U)) + A * partial_x(partial_x(U)) + b1 * partial_x(U) + b2 * partial_y(U) + cc * U - f;
  for (int n = 0; n <= m - 2; ++n)
    for (int l = 0; l <= n; ++l) CHECK(std::abs(R.coeff(n - l, l)) < 1e-10);
  // and the data: u = phi, u_y = psi along the curve
  Series kap = kAbs.jet(0.4, Side::Right, m);
  kap[0] = 0.0;
  const Series along = U.along(kap);
  CHECK(along[0] == doctest::Approx(std::sin(0.4)));
  CHECK(along[3] == doctest::Approx(-std::cos(0.4) / 6));
}

TEST_CASE("extension of Cauchy data") {
  const Grid2D g = Grid2D::covering(1.0, 1.0 / 128);
  Mask up(g.size(), 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) up[g.index(i, j)] = g.y(j) >= std::abs(g.x(i)) && g.y(j) <= 1.0;

  const GridFunction zero = extend_cauchy_data(CauchyTrace{kAbs, Trace(), Trace()}, tricomi(), 3, g, up);
  CHECK(zero.max_abs() == 0.0);
  CHECK(mask_count(zero.mask()) == mask_count(up));

  // error of the cubic expansion of (x^2 - y^2)^2 in t is exactly t^4
  const ScalarField u = ScalarField::parse("(x^2 - y^2)^2");
  const CauchyTrace t{kAbs, Trace::from_field(u, kAbs, false), Trace::from_field(u, kAbs, true)};
  const GridFunction v = extend_cauchy_data(t, tricomi(u), 3, g, up);
  std::vector<double> band_err(3, 0.0);
  const double bands[3] = {0.2, 0.1, 0.05};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!v.defined(i, j)) continue;
      const double x = g.x(i), y = g.y(j), tt = y - std::abs(x);
      for (int b = 0; b < 3; ++b)
        if (std::abs(tt - bands[b]) < 0.5 * g.h) band_err[b] = std::max(band_err[b], std::abs(v(i, j) - u(x, y)));
    }
  for (int b = 0; b + 1 < 3; ++b) CHECK(std::log2(band_err[b] / band_err[b + 1]) >= 3.5);

  // incompatible data cannot be extended
  const CauchyTrace bad{kAbs, Trace(), Trace::analytic(Expr::parse("1"), Expr::parse("1"))};
  try {
    (void)extend_cauchy_data(bad, tricomi(), 3, g, up);
    FAIL("incompatible data extended");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::IncompatibleData);
  }
}

TEST_CASE("cutoff keeps the extension bounded away from the curve") {
  const Grid2D g = Grid2D::covering(1.0, 1.0 / 64);
  Mask up(g.size(), 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) up[g.index(i, j)] = g.y(j) >= std::abs(g.x(i));
  const ScalarField u = ScalarField::parse("(x^2 - y^2)^2");
  const CauchyTrace t{kAbs, Trace::from_field(u, kAbs, false), Trace::from_field(u, kAbs, true)};
  const GridFunction v = extend_cauchy_data(t, tricomi(u), 3, g, up, 0.1);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (v.defined(i, j) && g.y(j) - std::abs(g.x(i)) >= 0.2) CHECK(v(i, j) == doctest::Approx(0.0).scale(1.0));
}
