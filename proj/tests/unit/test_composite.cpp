#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mixtype/composite.hpp"
#include "mixtype/errors.hpp"

using namespace mixtype;

namespace {

CoefficientSet cross() {
  CoefficientSet c;
  c.K = ScalarField::parse("x^2 - y^2");
  return c;
}

CompositeRun manufactured(const std::string& exact, double h, CoefficientSet c = cross()) {
  const ScalarField u = ScalarField::parse(exact);
  c.f = manufacture_linear(u, c);
  CompositeOptions o;
  o.h = h;
  o.dirichlet = u;
  return solve_linear_mixed(cross_domain(), c, o);
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

// max |a(i, j) - b(map(i, j))| / max |a|
template <class Map>
double mismatch(const GridFunction& a, const GridFunction& b, Map map) {
  double m = 0.0;
  const Grid2D& g = a.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!a.defined(i, j)) continue;
      const auto [ii, jj] = map(i, j);
      REQUIRE(b.defined(ii, jj));
      m = std::max(m, std::abs(a(i, j) - b(ii, jj)));
    }
  return m / a.max_abs();
}

}  // namespace

TEST_CASE("zero data stays zero through the pipeline") {
  CoefficientSet c = cross();
  CompositeOptions o;
  o.h = 1.0 / 32;
  const CompositeRun r = solve_linear_mixed(cross_domain(), c, o);
  CHECK(r.u_global.max_abs() <= 1e-12);
  CHECK(mask_count(r.u_global.mask()) > 0);
  CHECK(r.elliptic.psi_corner == 0.0);
  for (const EstimateRow& row : verify_estimate(r, 2)) CHECK(row.ratio == 0.0);
}

TEST_CASE("manufactured composite solution converges") {
  const ScalarField u = ScalarField::parse("(x^2 - y^2)*exp(x*y)");
  std::vector<double> errs;
  for (double h : {1.0 / 32, 1.0 / 64}) {
    const CompositeRun r = manufactured("(x^2 - y^2)*exp(x*y)", h);
    errs.push_back(rel_error(r.u_global, u));
    CHECK(r.glue_up.pass);
    CHECK(r.glue_down.pass);
    CHECK(r.glue_up.columns > 0);
  }
  CHECK(errs[1] <= 1e-3);
  CHECK(std::log2(errs[0] / errs[1]) >= 1.5);
}

TEST_CASE("zero Dirichlet data: curves carry zero and grad u(0) = 0") {
  CoefficientSet c = cross();
  c.f = ScalarField::parse("1 + x*y");
  CompositeOptions o;
  o.h = 1.0 / 32;
  const CompositeRun r = solve_linear_mixed(cross_domain(), c, o);
  CHECK(r.u_global.max_abs() > 0.0);
  CHECK(r.elliptic.psi_corner == 0.0);
  CHECK(r.compat_up.residuals[0] <= 1e-15);
  const Grid2D& g = r.u_global.grid();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (r.u_global.defined(i, j) && std::abs(std::abs(g.x(i)) - std::abs(g.y(j))) < 1e-14) CHECK(r.u_global(i, j) == 0.0);
}

TEST_CASE("corner residuals of extracted traces vanish with h") {
  std::vector<std::vector<double>> res;
  for (double h : {1.0 / 32, 1.0 / 64}) {
    const CompositeRun r = manufactured("(x^2 - y^2)*exp(x*y)", h);
    res.push_back(r.compat_up.residuals);
    CHECK(r.compat_up.ok());
    CHECK(r.compat_down.ok());
  }
  REQUIRE(res[0].size() == 4);
  CHECK(res[0][0] <= 1e-14);
  for (std::size_t n = 1; n < 3; ++n) CHECK(res[0][n] / res[1][n] >= 3.0);
  // the ungated last order still shrinks
  CHECK(res[1][3] < res[0][3]);
}

TEST_CASE("glue defect shrinks faster than h^2") {
  std::vector<double> d;
  for (double h : {1.0 / 32, 1.0 / 64}) {
    const CompositeRun r = manufactured("(x^2 - y^2)*exp(x*y)", h);
    d.push_back(std::max(r.glue_up.value_jump, r.glue_up.slope_jump));
  }
  CHECK(d[0] / d[1] >= 4.0);
}

TEST_CASE("the pipeline is linear in f") {
  CoefficientSet c = cross();
  CompositeOptions o;
  o.h = 1.0 / 32;
  const ScalarField f1 = ScalarField::parse("cos(x)*y"), f2 = ScalarField::parse("exp(x - y)");
  const CompositeRun r1 = solve_linear_mixed(cross_domain(), c.with_f(f1), o);
  const CompositeRun r2 = solve_linear_mixed(cross_domain(), c.with_f(f2), o);
  const CompositeRun r12 = solve_linear_mixed(cross_domain(), c.with_f(f1 + f2), o);
  const GridFunction sum = r1.u_global + r2.u_global;
  CHECK(mismatch(r12.u_global, sum, [](int i, int j) { return std::pair{i, j}; }) <= 1e-9);
}

TEST_CASE("reflections of the plane map solutions to solutions") {
  CoefficientSet c = cross();
  c.b2 = ScalarField::parse("0.3*x");
  CompositeOptions o;
  o.h = 1.0 / 32;
  const ScalarField f = ScalarField::parse("exp(0.5*x + 0.3*y)");
  const CompositeRun r = solve_linear_mixed(cross_domain(), c.with_f(f), o);
  const Grid2D& g = r.u_global.grid();

  // x -> -x: b2(-x, y), f(-x, y)
  CoefficientSet cx = c;
  cx.b2 = c.b2.reflected_x();
  const CompositeRun rx = solve_linear_mixed(cross_domain(), cx.with_f(f.reflected_x()), o);
  CHECK(mismatch(r.u_global, rx.u_global, [&](int i, int j) { return std::pair{2 * g.i0 - i, j}; }) <= 1e-9);

  // y -> -y: b2 changes sign
  CoefficientSet cy = c;
  cy.b2 = -1.0 * c.b2.reflected_y();
  const CompositeRun ry = solve_linear_mixed(cross_domain(), cy.with_f(f.reflected_y()), o);
  CHECK(mismatch(r.u_global, ry.u_global, [&](int i, int j) { return std::pair{i, 2 * g.j0 - j}; }) <= 1e-9);
}

TEST_CASE("reversed type: orientation fails, forced march blows up") {
  CoefficientSet rev;
  rev.K = ScalarField::parse("y^2 - x^2");
  rev.f = ScalarField::constant(1.0);
  const FailureReport rep = demonstrate_failure_mode(cross_domain(), rev, 1.0 / 32, true);
  CHECK(rep.failure_mode == "orientation");
  CHECK_FALSE(rep.orientation.pass);
  CHECK(rep.forced_outcome == "instability");
  CHECK(rep.forced_growth > 1e6);

  const FailureReport ctl = demonstrate_failure_mode(cross_domain(), cross(), 1.0 / 32, false);
  CHECK(ctl.failure_mode == "none");
  CHECK(ctl.orientation.pass);

  try {
    CompositeOptions o;
    o.h = 1.0 / 32;
    (void)solve_linear_mixed(cross_domain(), rev, o);
    FAIL("reversed type accepted");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OrientationFailure);
  }
}

TEST_CASE("coefficient invariants are enforced") {
  CoefficientSet c = cross();
  c.b1 = ScalarField::constant(1.0);  // breaks the Levy bound at the curves
  CompositeOptions o;
  o.h = 1.0 / 32;
  CHECK_THROWS_AS(solve_linear_mixed(cross_domain(), c, o), Error);
  o.enforce_invariants = false;
  const CompositeRun r = solve_linear_mixed(cross_domain(), c, o);
  bool levy_failed = false;
  for (const InvariantCheck& ic : r.invariants) levy_failed = levy_failed || !ic.pass;
  CHECK(levy_failed);
}

TEST_CASE("estimate ratios are refinement-stable") {
  const CompositeRun a = manufactured("(x^2 - y^2)*cos(x + 2*y)", 1.0 / 32);
  const CompositeRun b = manufactured("(x^2 - y^2)*cos(x + 2*y)", 1.0 / 64);
  const std::vector<EstimateRow> rows = verify_estimate(a, 2, &b);
  REQUIRE(rows.size() == 3);
  for (const EstimateRow& row : rows) {
    CHECK(std::isfinite(row.ratio));
    CHECK(row.ratio > 0.0);
    CHECK(row.stable);
  }
}
