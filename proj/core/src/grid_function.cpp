#include "mixtype/grid_function.hpp"

#include <cmath>
#include <cstdio>
#include <memory>

#include "mixtype/errors.hpp"
#include "mixtype/numerics.hpp"

namespace mixtype {

Mask mask_of(const RegionMap& map, std::initializer_list<Region> regions) {
  Mask m(map.labels().size(), 0);
  for (std::size_t q = 0; q < m.size(); ++q)
    for (Region r : regions)
      if (map.labels()[q] == r) m[q] = 1;
  return m;
}

Mask disk_mask(const Grid2D& grid, double radius) {
  Mask m(grid.size(), 0);
  const double r2 = radius * radius * (1.0 + 1e-12);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const double x = grid.x(i), y = grid.y(j);
      m[grid.index(i, j)] = x * x + y * y <= r2;
    }
  return m;
}

Mask mask_and(const Mask& a, const Mask& b) {
  Mask m(a.size());
  for (std::size_t q = 0; q < a.size(); ++q) m[q] = a[q] && b[q];
  return m;
}

Mask mask_or(const Mask& a, const Mask& b) {
  Mask m(a.size());
  for (std::size_t q = 0; q < a.size(); ++q) m[q] = a[q] || b[q];
  return m;
}

std::size_t mask_count(const Mask& m) {
  std::size_t n = 0;
  for (auto v : m) n += v != 0;
  return n;
}

GridFunction::GridFunction(const Grid2D& grid, double value)
    : grid_(grid), v_(grid.size(), value), mask_(grid.size(), 1) {}

GridFunction::GridFunction(const Grid2D& grid, Mask mask, double value)
    : grid_(grid), v_(grid.size(), 0.0), mask_(std::move(mask)) {
  for (std::size_t q = 0; q < v_.size(); ++q)
    if (mask_[q]) v_[q] = value;
}

GridFunction GridFunction::sample(const Grid2D& grid, const ScalarField& f, Mask mask) {
  GridFunction g(grid, std::move(mask));
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (g.mask_[grid.index(i, j)]) g(i, j) = f(grid.x(i), grid.y(j));
  return g;
}

void GridFunction::define(int i, int j, double value) {
  const std::size_t q = grid_.index(i, j);
  mask_[q] = 1;
  v_[q] = value;
}

GridFunction GridFunction::restricted(const Mask& m) const {
  GridFunction g = *this;
  for (std::size_t q = 0; q < v_.size(); ++q)
    if (!m[q]) {
      g.mask_[q] = 0;
      g.v_[q] = 0.0;
    }
  return g;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (std::size_t q = 0; q < v_.size(); ++q)
    if (mask_[q]) m = std::max(m, std::abs(v_[q]));
  return m;
}

double GridFunction::l2() const {
  double s = 0.0;
  for (std::size_t q = 0; q < v_.size(); ++q)
    if (mask_[q]) s += v_[q] * v_[q];
  return std::sqrt(s) * grid_.h;
}

void GridFunction::require_same_grid(const GridFunction& o) const {
  if (!(grid_ == o.grid_)) throw std::invalid_argument("GridFunction: grids differ");
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require_same_grid(o);
  for (std::size_t q = 0; q < v_.size(); ++q) {
    mask_[q] = mask_[q] && o.mask_[q];
    v_[q] = mask_[q] ? v_[q] + o.v_[q] : 0.0;
  }
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require_same_grid(o);
  for (std::size_t q = 0; q < v_.size(); ++q) {
    mask_[q] = mask_[q] && o.mask_[q];
    v_[q] = mask_[q] ? v_[q] - o.v_[q] : 0.0;
  }
  return *this;
}

GridFunction& GridFunction::operator*=(double s) {
  for (double& v : v_) v *= s;
  return *this;
}

void GridFunction::write_csv(const std::string& path) const {
  std::unique_ptr<std::FILE, int (*)(std::FILE*)> f(std::fopen(path.c_str(), "w"), &std::fclose);
  if (!f) throw Error(ErrorKind::Config, "cannot write " + path);
  std::fputs("x,y,value\n", f.get());
  for (int j = 0; j < grid_.ny; ++j)
    for (int i = 0; i < grid_.nx; ++i)
      if (defined(i, j)) std::fprintf(f.get(), "%.17g,%.17g,%.17g\n", grid_.x(i), grid_.y(j), (*this)(i, j));
}

namespace {

// One-dimensional k-th difference along x (axis 0) or y (axis 1).
GridFunction diff_axis(const GridFunction& u, int k, int axis) {
  if (k == 0) return u;
  const Grid2D& g = u.grid();
  GridFunction out(g, Mask(g.size(), 0));
  const double scale = std::pow(g.h, -k);
  const int pc = (k + 1) / 2;
  const int nw = k + 2;
  const int lines = axis == 0 ? g.ny : g.nx;
  const int len = axis == 0 ? g.nx : g.ny;
  auto at = [&](int line, int p) { return axis == 0 ? u(p, line) : u(line, p); };
  auto def = [&](int line, int p) { return axis == 0 ? u.defined(p, line) : u.defined(line, p); };
  for (int line = 0; line < lines; ++line) {
    int p = 0;
    while (p < len) {
      if (!def(line, p)) {
        ++p;
        continue;
      }
      int b = p;
      while (b + 1 < len && def(line, b + 1)) ++b;
      const int a = p;
      for (int q = a; q <= b; ++q) {
        const std::vector<double>* w = nullptr;
        int first = 0;
        if (q - a >= pc && b - q >= pc) {
          w = &numerics::fd_weights_int(k, -pc, 2 * pc + 1);
          first = q - pc;
        } else if (b - a + 1 >= nw) {
          first = std::clamp(q - nw / 2, a, b - nw + 1);
          w = &numerics::fd_weights_int(k, first - q, nw);
        } else {
          continue;
        }
        double acc = 0.0;
        for (std::size_t t = 0; t < w->size(); ++t) acc += (*w)[t] * at(line, first + static_cast<int>(t));
        if (axis == 0) out.define(q, line, acc * scale);
        else out.define(line, q, acc * scale);
      }
      p = b + 1;
    }
  }
  return out;
}

}  // namespace

std::optional<double> interpolate(const GridFunction& u, double x, double y) {
  const Grid2D& g = u.grid();
  // coordinates within rounding of a grid line land on it
  const auto snap = [](double f) {
    const double r = std::round(f);
    return std::abs(f - r) < 1e-9 ? r : f;
  };
  const double fx = snap(x / g.h + g.i0), fy = snap(y / g.h + g.j0);
  const int i = static_cast<int>(std::floor(fx)), j = static_cast<int>(std::floor(fy));
  const double tx = fx - i, ty = fy - j;
  double sum = 0.0, wsum = 0.0;
  for (int dj = 0; dj <= 1; ++dj)
    for (int di = 0; di <= 1; ++di) {
      const double w = (di ? tx : 1.0 - tx) * (dj ? ty : 1.0 - ty);
      if (w <= 0.0 || !u.defined(i + di, j + dj)) continue;
      sum += w * u(i + di, j + dj);
      wsum += w;
    }
  if (wsum <= 0.0) return std::nullopt;
  return sum / wsum;
}

GridFunction diff(const GridFunction& u, int i, int j) {
  if (i < 0 || j < 0) throw std::invalid_argument("diff: negative order");
  GridFunction r = diff_axis(diff_axis(u, i, 0), j, 1);
  if (mask_count(r.mask()) == 0 && mask_count(u.mask()) > 0)
    throw Error(ErrorKind::MaskTooThin, "no node has a complete stencil for derivative (" + std::to_string(i) + "," +
                                            std::to_string(j) + ")");
  return r;
}

NormReport sobolev_norm(const GridFunction& u, int s, std::string region) {
  NormReport r;
  r.order = s;
  r.region = std::move(region);
  const double h2 = u.grid().h * u.grid().h;
  double sum = 0.0;
  for (int i = 0; i <= s; ++i) {
    GridFunction dx = diff(u, i, 0);
    for (int j = 0; i + j <= s; ++j) {
      const GridFunction d = j == 0 ? dx : diff(dx, 0, j);
      for (std::size_t q = 0; q < d.values().size(); ++q)
        if (d.mask()[q]) sum += d.values()[q] * d.values()[q];
    }
  }
  r.value = std::sqrt(h2 * sum);
  return r;
}

double field_sobolev_norm(const ScalarField& f, const Grid2D& grid, const Mask& mask, int s) {
  if (f.is_zero()) return 0.0;
  double sum = 0.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      if (!mask[grid.index(i, j)]) continue;
      const Jet jt = f.jet(grid.x(i), grid.y(j), s);
      for (int n = 0; n <= s; ++n)
        for (int l = 0; l <= n; ++l) {
          const double d = jt.derivative(n - l, l);
          sum += d * d;
        }
    }
  return std::sqrt(sum) * grid.h;
}

double trace_sobolev_norm(const Trace& t, double x_lo, double x_hi, double h, int s) {
  if (t.is_zero()) return 0.0;
  const int n = static_cast<int>(std::floor((x_hi - x_lo) / h + 1e-9));
  double sum = 0.0;
  for (int q = 0; q <= n; ++q) {
    const double x = x_lo + q * h;
    const Series js = t.jet(x, x < 0.0 ? Side::Left : Side::Right, s);
    for (int k = 0; k <= s; ++k) {
      const double d = js.derivative(k);
      sum += d * d;
    }
  }
  return std::sqrt(sum * h);
}

}  // namespace mixtype
