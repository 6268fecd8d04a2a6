#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "mixtype/field.hpp"
#include "mixtype/geometry.hpp"

namespace mixtype {

using Mask = std::vector<std::uint8_t>;

Mask mask_of(const RegionMap& map, std::initializer_list<Region> regions);
Mask disk_mask(const Grid2D& grid, double radius);
Mask mask_and(const Mask& a, const Mask& b);
Mask mask_or(const Mask& a, const Mask& b);
std::size_t mask_count(const Mask& m);

/// Scalar samples on a grid, defined where the mask is set (zero elsewhere).
class GridFunction {
 public:
  GridFunction() = default;
  explicit GridFunction(const Grid2D& grid, double value = 0.0);
  GridFunction(const Grid2D& grid, Mask mask, double value = 0.0);
  static GridFunction sample(const Grid2D& grid, const ScalarField& f, Mask mask);

  const Grid2D& grid() const { return grid_; }
  const Mask& mask() const { return mask_; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  bool defined(int i, int j) const { return grid_.contains(i, j) && mask_[grid_.index(i, j)] != 0; }
  double operator()(int i, int j) const { return v_[grid_.index(i, j)]; }
  double& operator()(int i, int j) { return v_[grid_.index(i, j)]; }
  void define(int i, int j, double value);

  /// Same values with the mask intersected with `m`.
  GridFunction restricted(const Mask& m) const;
  double max_abs() const;
  /// Discrete L2 norm: sqrt(h^2 sum v^2) over the mask.
  double l2() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(double s);
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(GridFunction a, double s) { return a *= s; }
  friend GridFunction operator*(double s, GridFunction a) { return a *= s; }

  /// CSV with columns x,y,value for the defined nodes, row-major.
  void write_csv(const std::string& path) const;

 private:
  void require_same_grid(const GridFunction& o) const;

  Grid2D grid_;
  std::vector<double> v_;
  Mask mask_;
};

/// Bilinear interpolation at (x, y) over the defined corners of the
/// enclosing cell, weights renormalised; nullopt when none is defined.
std::optional<double> interpolate(const GridFunction& u, double x, double y);

/// D_x^i D_y^j u. Central differences in the interior, shifted one-sided
/// windows near mask edges; nodes whose mask run is shorter than the stencil
/// drop out of the result mask. Throws MaskTooThin if no node survives.
GridFunction diff(const GridFunction& u, int i, int j);

struct NormReport {
  int order = 0;
  double value = 0.0;
  std::string region;
};

/// sqrt( sum_{|alpha| <= s} h^2 sum_nodes (D^alpha u)^2 ) over the mask of u.
NormReport sobolev_norm(const GridFunction& u, int s, std::string region = "mask");

/// The same norm for a field with exact jets (or finite-difference jets),
/// using pointwise derivatives instead of difference quotients.
double field_sobolev_norm(const ScalarField& f, const Grid2D& grid, const Mask& mask, int s);

/// H^s norm of one-dimensional data on [x_lo, x_hi] sampled with spacing h.
double trace_sobolev_norm(const Trace& t, double x_lo, double x_hi, double h, int s);

}  // namespace mixtype
