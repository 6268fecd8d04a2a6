#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mixtype/coefficients.hpp"
#include "mixtype/errors.hpp"
#include "mixtype/grid_function.hpp"

using namespace mixtype;

namespace {

Mask square_mask(const Grid2D& g, double x0, double x1, double y0, double y1) {
  Mask m(g.size(), 0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i), y = g.y(j);
      m[g.index(i, j)] = x >= x0 - 1e-12 && x <= x1 + 1e-12 && y >= y0 - 1e-12 && y <= y1 + 1e-12;
    }
  return m;
}

double max_err(const GridFunction& d, const ScalarField& exact) {
  double e = 0.0;
  const Grid2D& g = d.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (d.defined(i, j)) e = std::max(e, std::abs(d(i, j) - exact(g.x(i), g.y(j))));
  return e;
}

}  // namespace

TEST_CASE("difference operators are exact on low-degree polynomials") {
  const Grid2D g = Grid2D::covering(1.0, 1.0 / 16);
  const Mask disk = disk_mask(g, 0.9);
  const GridFunction x2 = GridFunction::sample(g, ScalarField::parse("x^2"), disk);
  const GridFunction d20 = diff(x2, 2, 0);
  CHECK(max_err(d20, ScalarField::constant(2.0)) < 1e-9);
  CHECK(mask_count(d20.mask()) == mask_count(disk));
  const GridFunction d11 = diff(GridFunction::sample(g, ScalarField::parse("x*y"), disk), 1, 1);
  CHECK(max_err(d11, ScalarField::constant(1.0)) < 1e-9);
}

TEST_CASE("mixed third derivative is second-order accurate") {
  const ScalarField u = ScalarField::parse("sin(x)*exp(y)");
  const ScalarField exact = ScalarField::parse("-sin(x)*exp(y)");
  double prev = 0.0;
  for (double h : {1.0 / 64, 1.0 / 128}) {
    const Grid2D g = Grid2D::covering(1.0, h);
    const GridFunction d = diff(GridFunction::sample(g, u, disk_mask(g, 1.0)), 2, 1);
    const int i = g.i0 + static_cast<int>(std::lround(0.3 / h)), j = g.j0 + static_cast<int>(std::lround(0.2 / h));
    const double e = std::abs(d(i, j) - exact(g.x(i), g.y(j)));
    CHECK(e < 5.0 * h * h);
    if (prev > 0.0) CHECK(prev / e > 3.0);
    prev = e;
  }
}

TEST_CASE("difference operators commute up to O(h^2)") {
  const ScalarField u = ScalarField::parse("cos(2*x + y)*exp(x*y)");
  double prev = 0.0;
  for (double h : {1.0 / 32, 1.0 / 64}) {
    const Grid2D g = Grid2D::covering(1.0, h);
    const GridFunction f = GridFunction::sample(g, u, disk_mask(g, 1.0));
    const GridFunction a = diff(diff(f, 1, 0), 0, 1);
    const GridFunction b = diff(f, 1, 1);
    const double e = (a - b).max_abs();
    CHECK(e < 50 * h * h);
    if (prev > 0.0) CHECK(prev / e > 3.0);
    prev = e;
  }
}

TEST_CASE("thin masks are rejected") {
  const Grid2D g = Grid2D::covering(1.0, 1.0 / 16);
  Mask line(g.size(), 0);
  for (int i = 0; i < g.nx; ++i) line[g.index(i, g.j0)] = 1;
  const GridFunction f(g, line, 1.0);
  CHECK_NOTHROW(diff(f, 2, 0));
  try {
    (void)diff(f, 0, 1);
    FAIL("one-node-wide mask accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MaskTooThin);
  }
}

TEST_CASE("discrete Sobolev norms") {
  const Grid2D g = Grid2D::covering(1.0, 1.0 / 128);
  const Mask unit = square_mask(g, 0.0, 1.0, 0.0, 1.0);
  CHECK(sobolev_norm(GridFunction(g, unit, 0.0), 3).value == 0.0);
  CHECK(sobolev_norm(GridFunction(g, unit, 1.0), 0).value == doctest::Approx(1.0).epsilon(2 * g.h));
  // closed-form integrals: |u|^2 = 1/4, |u_x|^2 = |u_y|^2 = pi^2/4
  const GridFunction s = GridFunction::sample(g, ScalarField::parse("sin(pi*x)*sin(pi*y)"), unit);
  const double oracle = std::sqrt(0.25 + M_PI * M_PI / 2);
  CHECK(sobolev_norm(s, 1).value == doctest::Approx(oracle).epsilon(0.02));
}

TEST_CASE("Sobolev norm properties on random smooth fields") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const Grid2D g = Grid2D::covering(1.0, 1.0 / 32);
  const Mask disk = disk_mask(g, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double p = coef(rng), q = coef(rng), r = coef(rng);
    const ScalarField fu = ScalarField::parse("sin(x)*cos(y)") * ScalarField::constant(p) + ScalarField::constant(q);
    const ScalarField fv = ScalarField::parse("x^3*y") * ScalarField::constant(r);
    const GridFunction u = GridFunction::sample(g, fu, disk), v = GridFunction::sample(g, fv, disk);
    for (int s = 0; s <= 3; ++s) {
      const double nuv = sobolev_norm(u + v, s).value;
      CHECK(nuv <= sobolev_norm(u, s).value + sobolev_norm(v, s).value + 1e-12);
      if (s > 0) CHECK(sobolev_norm(u, s).value >= sobolev_norm(u, s - 1).value);
    }
    // pointwise-jet norm of the field agrees with the difference norm
    CHECK(field_sobolev_norm(fu, g, disk, 2) == doctest::Approx(sobolev_norm(u, 2).value).epsilon(0.02));
  }
}

TEST_CASE("manufactured right-hand sides") {
  CoefficientSet c;
  c.K = ScalarField::parse("x^2 - y^2");
  CHECK(manufacture_linear(ScalarField(), c).is_zero());
  const ScalarField f = manufacture_linear(ScalarField::parse("x^2 - y^2"), c);
  for (double x : {-0.5, 0.25})
    for (double y : {0.1, 0.7}) CHECK(f(x, y) == doctest::Approx(-2 + 2 * (x * x - y * y)));

  // symbolic f cross-checked against difference quotients of u
  const ScalarField u = ScalarField::parse("(x^2 - y^2)*exp(x + y)");
  const ScalarField fu = manufacture_linear(u, c);
  const Grid2D g = Grid2D::covering(0.5, 1.0 / 256);
  const Mask disk = disk_mask(g, 0.5);
  const GridFunction ug = GridFunction::sample(g, u, disk);
  const GridFunction Kg = GridFunction::sample(g, c.K, disk);
  GridFunction Kuxx = diff(ug, 2, 0);
  for (std::size_t q = 0; q < g.size(); ++q) Kuxx.values()[q] *= Kg.values()[q];
  const GridFunction lhs = diff(ug, 0, 2) + Kuxx;
  CHECK(max_err(lhs, fu) < 1e-3);
}

TEST_CASE("Levy condition checker") {
  const DomainSpec spec = cross_domain();
  const Grid2D g = Grid2D::covering(2.0, 1.0 / 16);
  const ScalarField K = ScalarField::parse("x^2 - y^2");
  const RegionMap map = build_region_map(spec, g, K);
  CoefficientSet c;
  c.K = K;
  c.C_b = 1.0;
  for (const char* b1 : {"1", "x", "0.5*y", "x^2 - y^2"}) {
    c.b1 = ScalarField::parse(b1);
    bool holds = true;  // oracle: the sampled inequality, evaluated directly
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        if (map.at(i, j) == Region::Exterior) continue;
        const double x = g.x(i), y = g.y(j);
        if (std::abs(c.b1(x, y)) > std::sqrt(std::abs(x * x - y * y)) + std::abs(2 * x)) holds = false;
      }
    CHECK(levy_check(c, map).pass == holds);
  }
  c.b1 = ScalarField::constant(1.0);
  CHECK_FALSE(levy_check(c, map).pass);
  c.b1 = ScalarField::parse("x");
  CHECK(levy_check(c, map).pass);
}

TEST_CASE("coefficient invariants for the cross preset") {
  const DomainSpec spec = cross_domain();
  const Grid2D g = Grid2D::covering(2.0, 1.0 / 16);
  CoefficientSet c;
  c.K = ScalarField::parse("x^2 - y^2");
  const RegionMap map = build_region_map(spec, g, c.K);
  for (const auto& chk : check_invariants(c, map, spec.kappa_upper(), spec.kappa_lower())) CHECK_MESSAGE(chk.pass, chk.name);
  c.c = ScalarField::constant(0.5);
  CHECK_FALSE(c_sign_check(c, map).pass);
}

TEST_CASE("Monge-Ampere manufacture") {
  const ScalarField K = ScalarField::parse("x^2 - y^2");
  // det D^2 (x^2 - y^2)^2 = -48 (x^2 - y^2)^2
  const ScalarField psi = manufacture_monge_ampere(ScalarField::parse("(x^2 - y^2)^2"), K, 1.0);
  CHECK(psi(0.7, 0.2) == doctest::Approx(-48 * (0.49 - 0.04)));
  try {
    (void)manufacture_monge_ampere(ScalarField::parse("x^2 + y^2"), K, 1.0);
    FAIL("unbounded quotient accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DivisionByDegeneracy);
  }
}
