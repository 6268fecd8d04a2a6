#include <benchmark/benchmark.h>

#include "mixtype/composite.hpp"
#include "mixtype/nashmoser.hpp"
#include "mixtype/smoothing.hpp"

using namespace mixtype;

namespace {

CoefficientSet manufactured_cross() {
  CoefficientSet c;
  c.K = ScalarField::parse("x^2 - y^2");
  c.f = manufacture_linear(ScalarField::parse("(x^2 - y^2)*exp(x*y)"), c);
  return c;
}

void BM_CompositeSolve(benchmark::State& state) {
  const CoefficientSet c = manufactured_cross();
  CompositeOptions o;
  o.h = 1.0 / static_cast<double>(state.range(0));
  o.dirichlet = ScalarField::parse("(x^2 - y^2)*exp(x*y)");
  for (auto _ : state) benchmark::DoNotOptimize(solve_linear_mixed(cross_domain(), c, o).u_global.max_abs());
}
BENCHMARK(BM_CompositeSolve)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DegenerateMarch(benchmark::State& state) {
  const ScalarField u = ScalarField::parse("(y^2 - x^2)^2*(1 + x)");
  const Curve kappa = Curve::parse("x", "-x");
  HyperbolicProblem p;
  p.coeffs.K = ScalarField::parse("x^2 - y^2");
  p.coeffs.f = manufacture_linear(u, p.coeffs);
  p.trace = CauchyTrace{kappa, Trace::from_field(u, kappa, false), Trace::from_field(u, kappa, true)};
  p.grid = Grid2D::covering(1.2, 1.0 / static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(march(p, 1e-6).u.max_abs());
}
BENCHMARK(BM_DegenerateMarch)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Smoothing(benchmark::State& state) {
  const Grid2D g = Grid2D::box(1.0, 1.0, 1.0 / static_cast<double>(state.range(0)));
  GridFunction u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) u(i, j) = std::sin(3 * g.x(i)) * std::cos(5 * g.y(j)) + g.x(i) * g.y(j);
  for (auto _ : state) benchmark::DoNotOptimize(smoothing_apply(u, 16.0).max_abs());
}
BENCHMARK(BM_Smoothing)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_NashMoserLevel(benchmark::State& state) {
  NonlinearProblem p;
  p.psi = Expr::constant(1.0);
  NashMoserConfig c;
  c.h = 1.0 / 32;
  c.max_levels = 1;
  for (auto _ : state) benchmark::DoNotOptimize(iterate_fixed(p, 0.05, c).history.back().residual);
}
BENCHMARK(BM_NashMoserLevel)->Unit(benchmark::kMillisecond)->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
