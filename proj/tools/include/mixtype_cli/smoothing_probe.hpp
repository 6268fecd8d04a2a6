#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mixtype/smoothing.hpp"

namespace mixtype::probe {

// Constants of ||(I - S)u||_0 <= C theta^-2 ||u||_2 and ||S u||_2 <= C theta ||u||_1,
// each the largest ratio over a family: cosine modes across the cutoff band
// [theta, 2 theta] and beyond, and a compactly supported bump.
struct SmoothingConstants {
  double theta = 0.0;
  double jackson = 0.0;
  double bernstein = 0.0;
  double bump_jackson = 0.0;
};

inline std::vector<GridFunction> smoothing_family(const Grid2D& g, double theta) {
  std::vector<GridFunction> out;
  const double L = (g.nx - 1) * g.h;
  for (double c : {0.5, 1.0, 1.25, 1.5, 1.75, 2.0, 2.5}) {
    const int k = static_cast<int>(std::lround(2 * L * c * theta));
    if (k >= g.nx - 1) continue;
    for (int diagonal : {0, 1}) {
      GridFunction u(g);
      const int kx = diagonal ? static_cast<int>(std::lround(k / std::numbers::sqrt2)) : k, ky = diagonal ? kx : 0;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
          u(i, j) = std::cos(std::numbers::pi * kx * i / (g.nx - 1)) * std::cos(std::numbers::pi * ky * j / (g.ny - 1));
      out.push_back(std::move(u));
    }
  }
  return out;
}

inline GridFunction bump(const Grid2D& g, double radius = 0.8) {
  GridFunction u(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double r2 = (g.x(i) * g.x(i) + g.y(j) * g.y(j)) / (radius * radius);
      u(i, j) = r2 < 1.0 ? std::exp(-1.0 / (1.0 - r2)) : 0.0;
    }
  return u;
}

inline SmoothingConstants smoothing_constants(double theta, double h) {
  const Grid2D g = Grid2D::box(1.0, 1.0, h);
  SmoothingConstants c;
  c.theta = theta;
  auto measure = [&](const GridFunction& u, bool is_bump) {
    const GridFunction s = smoothing_apply(u, theta);
    const double j = theta * theta * sobolev_norm(u - s, 0).value / sobolev_norm(u, 2).value;
    const double b = sobolev_norm(s, 2).value / (theta * sobolev_norm(u, 1).value);
    c.jackson = std::max(c.jackson, j);
    c.bernstein = std::max(c.bernstein, b);
    if (is_bump) c.bump_jackson = j;
  };
  for (const GridFunction& u : smoothing_family(g, theta)) measure(u, false);
  measure(bump(g), true);
  return c;
}

}  // namespace mixtype::probe
