#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mixtype/errors.hpp"
#include "mixtype/numerics.hpp"
#include "mixtype/smoothing.hpp"
#include "mixtype_cli/smoothing_probe.hpp"

using namespace mixtype;

TEST_CASE("constants pass through") {
  const Grid2D g = Grid2D::box(1.0, 0.75, 1.0 / 32);
  const GridFunction u(g, 2.5);
  const GridFunction s = smoothing_apply(u, 3.0);
  CHECK((s - u).max_abs() < 1e-13);
}

TEST_CASE("a mode below the cutoff is kept") {
  const Grid2D g = Grid2D::box(1.0, 1.0, 1.0 / 32);
  GridFunction u(g);
  const int k = 5, l = 3;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      u(i, j) = std::cos(std::numbers::pi * k * i / (g.nx - 1)) * std::cos(std::numbers::pi * l * j / (g.ny - 1));
  const double xi = mode_frequency(g, k, l);
  CHECK(xi == doctest::Approx(std::hypot(k, l) / 4.0));
  CHECK((smoothing_apply(u, 1.01 * xi) - u).max_abs() <= 1e-12);
  // above 2 theta it is gone
  CHECK(smoothing_apply(u, 0.49 * xi).max_abs() <= 1e-12);
}

TEST_CASE("cutoff profile") {
  CHECK(numerics::smooth_step(-0.5) == 1.0);
  CHECK(numerics::smooth_step(1.5) == 0.0);
  double prev = 1.0;
  for (int q = 1; q < 20; ++q) {
    const double v = numerics::smooth_step(q / 20.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(numerics::smooth_step(0.5) == doctest::Approx(0.5));
}

TEST_CASE("smoothing is linear and symmetric") {
  const Grid2D g = Grid2D::box(1.0, 1.0, 1.0 / 32);
  GridFunction u(g), v(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      u(i, j) = std::sin(7 * g.x(i)) * g.y(j) + std::abs(g.x(i));
      v(i, j) = std::exp(g.x(i) * g.y(j));
    }
  const double th = 3.0;
  const GridFunction su = smoothing_apply(u, th), sv = smoothing_apply(v, th);
  GridFunction w = u;
  w += v;
  CHECK((smoothing_apply(w, th) - su - sv).max_abs() < 1e-12);
  // mirror x -> -x commutes with S
  GridFunction m(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) m(i, j) = u(g.nx - 1 - i, j);
  const GridFunction sm = smoothing_apply(m, th);
  double d = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) d = std::max(d, std::abs(sm(i, j) - su(g.nx - 1 - i, j)));
  CHECK(d < 1e-12);
}

TEST_CASE("partial masks are rejected") {
  const Grid2D g = Grid2D::box(1.0, 1.0, 1.0 / 16);
  const GridFunction u(g, disk_mask(g, 0.5), 1.0);
  CHECK_THROWS_AS(smoothing_apply(u, 2.0), Error);
}

TEST_CASE("smoothing constants are stable across theta") {
  const double h = 1.0 / 256;
  const probe::SmoothingConstants c8 = probe::smoothing_constants(8, h), c16 = probe::smoothing_constants(16, h),
                                   c32 = probe::smoothing_constants(32, h);
  for (auto pick : {&probe::SmoothingConstants::jackson, &probe::SmoothingConstants::bernstein}) {
    const double lo = std::min({c8.*pick, c16.*pick, c32.*pick}), hi = std::max({c8.*pick, c16.*pick, c32.*pick});
    CHECK(lo > 0.0);
    CHECK(hi < 2 * lo);
  }
  // the bump is smoother than any power: its own ratio falls
  CHECK(c32.bump_jackson < c8.bump_jackson);
}

TEST_CASE("extension from a disk") {
  const Grid2D g = Grid2D::covering(1.6, 1.0 / 32);
  GridFunction u(g, disk_mask(g, 1.0), 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (u.defined(i, j)) u(i, j) = 1.0 + g.x(i) * g.x(i) + g.y(j) * g.y(j);
  const Grid2D box = Grid2D::box(1.6, 1.6, 1.0 / 32);
  for (Reflection kind : {Reflection::Even, Reflection::Smooth}) {
    const GridFunction e = extend_from_disk(u, 1.0, box, 0.25, kind);
    CHECK(std::count(e.mask().begin(), e.mask().end(), 0) == 0);
    // defined nodes are kept
    CHECK(e(box.i0, box.j0) == 1.0);
    CHECK(e(box.i0 + 16, box.j0) == doctest::Approx(1.25));
    // faded out past radius + taper
    CHECK(e(0, 0) == 0.0);
  }
  // the smooth reflection continues a quadratic in r exactly
  const GridFunction e = extend_from_disk(u, 1.0, box, 1e9, Reflection::Smooth);
  const int i = box.i0 + 36;  // r = 1.125
  CHECK(e(i, box.j0) == doctest::Approx(1.0 + 1.125 * 1.125).epsilon(1e-3));
}
