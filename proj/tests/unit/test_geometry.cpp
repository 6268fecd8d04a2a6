#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mixtype/errors.hpp"
#include "mixtype/geometry.hpp"

using namespace mixtype;

namespace {

int node(const Grid2D& g, double v) { return static_cast<int>(std::lround(v / g.h)); }

bool is_elliptic(Region r) { return r == Region::EllipticPlus; }
bool is_hyperbolic(Region r) { return r == Region::HyperbolicUp || r == Region::HyperbolicDown; }

}  // namespace

TEST_CASE("grid puts the origin on a node and covers the outer radius") {
  const Grid2D g = Grid2D::covering(2.0, 1.0 / 64);
  CHECK(g.x(g.i0) == 0.0);
  CHECK(g.y(g.j0) == 0.0);
  CHECK(g.reach() >= 2.0);
}

TEST_CASE("cross preset labels") {
  const DomainSpec spec = cross_domain();
  const Grid2D g = Grid2D::covering(spec.radius_outer, 1.0 / 64);
  const RegionMap m = build_region_map(spec, g, ScalarField::parse("x^2 - y^2"));
  CHECK(m.at(g.i0 + node(g, 0.5), g.j0 + node(g, 0.1)) == Region::EllipticPlus);
  CHECK(m.at(g.i0 + node(g, 0.1), g.j0 + node(g, 0.5)) == Region::HyperbolicUp);
  CHECK(m.at(g.i0 + node(g, 0.1), g.j0 - node(g, 0.5)) == Region::HyperbolicDown);
  CHECK(m.at(g.i0, g.j0) == Region::Degenerate);
  CHECK(m.components(Region::EllipticPlus) == 2);
  CHECK(m.components(Region::HyperbolicUp) == 1);
  CHECK(m.components(Region::HyperbolicDown) == 1);

  // oracle: nodes within h of the diagonals, counted directly
  std::size_t near_diag = 0, total = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double x = g.x(i), y = g.y(j);
      if (x * x + y * y > 4.0) continue;
      ++total;
      if (std::abs(std::abs(x) - std::abs(y)) <= g.h * (1 + 1e-12)) ++near_diag;
    }
  CHECK(m.count(Region::Degenerate) <= 4 * near_diag);
  CHECK(m.count(Region::Degenerate) > 0);
  CHECK(total > 0);
  CHECK(m.fillet_radius() == doctest::Approx(4 * g.h));
}

TEST_CASE("labels agree with the sign of K off the band") {
  const DomainSpec spec = cross_domain();
  const Grid2D g = Grid2D::covering(spec.radius_outer, 1.0 / 32);
  const ScalarField K = ScalarField::parse("(x^2 - y^2)*(1 + x^2/4)");
  const RegionMap m = build_region_map(spec, g, K);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const Region r = m.at(i, j);
      const double k = K(g.x(i), g.y(j));
      if (is_elliptic(r)) CHECK(k > 0.0);
      if (is_hyperbolic(r)) CHECK(k < 0.0);
    }
}

TEST_CASE("labels are stable under refinement away from the band") {
  const DomainSpec spec = cross_domain();
  const ScalarField K = ScalarField::parse("x^2 - y^2");
  const Grid2D g1 = Grid2D::covering(2.0, 1.0 / 16, 2);
  const Grid2D g2 = Grid2D::covering(2.0, 1.0 / 32, 4);
  const RegionMap m1 = build_region_map(spec, g1, K);
  const RegionMap m2 = build_region_map(spec, g2, K);
  int compared = 0;
  for (int j = 0; j < g1.ny; ++j)
    for (int i = 0; i < g1.nx; ++i) {
      const Region a = m1.at(i, j);
      const Region b = m2.at(g2.i0 + 2 * (i - g1.i0), g2.j0 + 2 * (j - g1.j0));
      if (a == Region::Degenerate || b == Region::Degenerate || a == Region::Exterior || b == Region::Exterior) continue;
      CHECK(a == b);
      ++compared;
    }
  CHECK(compared > 100);
}

TEST_CASE("negating K swaps elliptic and hyperbolic labels") {
  const DomainSpec spec = cross_domain();
  spec.validate();
  const Grid2D g = Grid2D::covering(2.0, 1.0 / 32);
  DomainSpec no_fillet = spec;
  no_fillet.fillet_cells = 0.0;
  const RegionMap a = build_region_map(no_fillet, g, ScalarField::parse("x^2 - y^2"));
  const RegionMap b = build_region_map(no_fillet, g, ScalarField::parse("y^2 - x^2"));
  for (std::size_t q = 0; q < g.size(); ++q) {
    const Region ra = a.labels()[q], rb = b.labels()[q];
    CHECK(is_elliptic(ra) == is_hyperbolic(rb));
    CHECK(is_hyperbolic(ra) == is_elliptic(rb));
    CHECK((ra == Region::Degenerate) == (rb == Region::Degenerate));
  }
}

TEST_CASE("malformed domains are rejected") {
  DomainSpec tangent = cross_domain();
  tangent.gamma1 = Curve::parse("-x^2", "-x^2");
  tangent.gamma2 = Curve::parse("x^2", "x^2");
  CHECK_THROWS_AS(tangent.validate(), Error);
  try {
    tangent.validate();
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TransversalityViolation);
  }
  const Grid2D small = Grid2D::covering(1.0, 1.0 / 16, 0);
  try {
    (void)build_region_map(cross_domain(), small, ScalarField::parse("x^2 - y^2"));
    FAIL("coverage not checked");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::CoverageError);
  }
}

TEST_CASE("space-like check") {
  const Curve vee = Curve::parse("x", "-x");
  const Curve half = Curve::parse("x/2", "-x/2");
  const ScalarField one = ScalarField::constant(1.0);
  const auto on_zero_set = spacelike_check(vee, one, ScalarField::parse("y^2 - x^2"), 0.9, -1, 1);
  CHECK(on_zero_set.sup == doctest::Approx(0.0));
  CHECK(on_zero_set.pass);
  const auto characteristic = spacelike_check(vee, one, one, 0.9, -1, 1);
  CHECK(characteristic.sup == doctest::Approx(1.0));
  CHECK_FALSE(characteristic.pass);
  const auto ok = spacelike_check(half, one, one, 0.5, -1, 1);
  CHECK(ok.sup == doctest::Approx(0.25));
  CHECK(ok.pass);
}

TEST_CASE("orientation check") {
  const DomainSpec spec = cross_domain();
  const Grid2D g = Grid2D::covering(2.0, 1.0 / 32);
  const auto check = [&](const DomainSpec& d, const char* K) {
    const ScalarField k = ScalarField::parse(K);
    return orientation_check(build_region_map(d, g, k), k);
  };
  CHECK(check(spec, "x^2 - y^2").pass);
  const auto reversed = check(spec, "y^2 - x^2");
  CHECK_FALSE(reversed.pass);
  CHECK(reversed.failed > 0);
  const auto elliptic_only = check(spec, "1");
  CHECK(elliptic_only.pass);
  CHECK(elliptic_only.checked == 0);

  // steep curves y = +-3x: the band is a staircase, the march still enters
  DomainSpec steep = spec;
  steep.gamma1 = Curve::analytic(Expr::parse("-3*x"));
  steep.gamma2 = Curve::analytic(Expr::parse("3*x"));
  CHECK(check(steep, "9*x^2 - y^2").pass);
  CHECK_FALSE(check(steep, "y^2 - 9*x^2").pass);
}
