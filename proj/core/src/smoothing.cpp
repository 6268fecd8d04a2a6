#include "mixtype/smoothing.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>

#include "mixtype/errors.hpp"
#include "mixtype/numerics.hpp"

namespace mixtype {

namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

}  // namespace

double mode_frequency(const Grid2D& grid, int k, int l) {
  // cos(pi k (x - x_0) / L) makes k / (2L) cycles per unit length
  const double fx = 0.5 * k / ((grid.nx - 1) * grid.h), fy = 0.5 * l / ((grid.ny - 1) * grid.h);
  return std::hypot(fx, fy);
}

GridFunction smoothing_apply(const GridFunction& u, double theta) {
  const Grid2D& g = u.grid();
  if (!(theta > 0.0)) throw Error(ErrorKind::Config, "smoothing cutoff must be positive");
  if (g.nx < 2 || g.ny < 2) throw Error(ErrorKind::MaskTooThin, "smoothing needs at least two nodes per direction");
  if (mask_count(u.mask()) != g.size())
    throw Error(ErrorKind::MaskTooThin, "smoothing needs u on the full box; extend it first");

  GridFunction out = u;
  std::vector<double>& buf = out.values();
  // FFTW_ESTIMATE keeps the plan, and so the rounding, independent of timing
  const Plan plan(fftw_plan_r2r_2d(g.ny, g.nx, buf.data(), buf.data(), FFTW_REDFT00, FFTW_REDFT00, FFTW_ESTIMATE));
  if (!plan) throw Error(ErrorKind::Config, "FFTW could not plan the cosine transform");
  fftw_execute(plan.get());
  const double norm = 4.0 * (g.nx - 1) * (g.ny - 1);
  for (int l = 0; l < g.ny; ++l)
    for (int k = 0; k < g.nx; ++k)
      buf[g.index(k, l)] *= numerics::smooth_step(mode_frequency(g, k, l) / theta - 1.0) / norm;
  fftw_execute(plan.get());
  return out;
}

GridFunction extend_from_disk(const GridFunction& u, double radius, const Grid2D& grid, double taper,
                              Reflection kind) {
  const Grid2D& src = u.grid();
  if (std::abs(src.h - grid.h) > 1e-14 * grid.h) throw Error(ErrorKind::Config, "extension grids differ in spacing");
  // u at radius rr along the ray through (x, y) / r; nodes near a ragged rim
  // may reflect onto undefined cells, so the radius moves inwards until found
  const auto along = [&](double x, double y, double r, double rr) {
    rr = std::max(rr, 0.0);
    for (;; rr -= 0.5 * grid.h) {
      const double s = r > 0.0 ? std::max(rr, 0.0) / r : 0.0;
      if (const std::optional<double> v = interpolate(u, s * x, s * y)) return *v;
      if (rr <= 0.0) throw Error(ErrorKind::MaskTooThin, "nothing to reflect from the disk");
    }
  };
  GridFunction out(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const int si = i - grid.i0 + src.i0, sj = j - grid.j0 + src.j0;
      if (u.defined(si, sj)) {
        out(i, j) = u(si, sj);
        continue;
      }
      const double x = grid.x(i), y = grid.y(j), r = std::hypot(x, y);
      const double fade = std::isinf(taper) ? 1.0 : numerics::smooth_step((r - radius) / taper);
      if (fade == 0.0) continue;
      const double t = std::max(r - radius, 0.0);
      double v;
      if (kind == Reflection::Even || 3 * t > radius)
        v = along(x, y, r, radius - t);
      else
        v = 6 * along(x, y, r, radius - t) - 8 * along(x, y, r, radius - 2 * t) + 3 * along(x, y, r, radius - 3 * t);
      out(i, j) = fade * v;
    }
  return out;
}

}  // namespace mixtype
