#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixtype/field.hpp"

namespace mixtype {

/// Uniform square-cell grid. Node (i0, j0) sits exactly at the origin.
struct Grid2D {
  double h = 1.0 / 64;
  int nx = 0, ny = 0;
  int i0 = 0, j0 = 0;

  /// Smallest symmetric grid whose nodes reach `radius` plus `margin` cells.
  static Grid2D covering(double radius, double h, int margin = 2);
  /// Box [-hx, hx] x [-hy, hy] rounded outwards to whole cells.
  static Grid2D box(double half_x, double half_y, double h);

  double x(int i) const { return (i - i0) * h; }
  double y(int j) const { return (j - j0) * h; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i); }
  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  bool contains(int i, int j) const { return i >= 0 && j >= 0 && i < nx && j < ny; }
  /// Radius reached in every direction from the origin.
  double reach() const;
  bool operator==(const Grid2D& o) const = default;
};

/// The two degeneracy curves through the origin and the two balls.
struct DomainSpec {
  double radius_inner = 1.0;
  double radius_outer = 2.0;
  Curve gamma1;  // decreasing through 0
  Curve gamma2;  // increasing through 0
  int jet_order = 8;
  double fillet_cells = 4.0;
  double transversality_tol = 1e-6;

  /// Upper curve max(gamma1, gamma2) and lower curve min(gamma1, gamma2).
  Curve kappa_upper() const;
  Curve kappa_lower() const;
  /// Throws TransversalityViolation or Config on a malformed spec.
  void validate() const;
};

/// Default curves y = -x and y = x (zero set of x^2 - y^2).
DomainSpec cross_domain(double radius_inner = 1.0, double radius_outer = 2.0);

enum class Region : std::uint8_t { EllipticPlus, HyperbolicUp, HyperbolicDown, Degenerate, Exterior };

const char* region_name(Region r);

class RegionMap {
 public:
  RegionMap(Grid2D grid, std::vector<Region> labels, double fillet_radius, int fillet_nodes);

  const Grid2D& grid() const { return grid_; }
  Region at(int i, int j) const { return labels_[grid_.index(i, j)]; }
  const std::vector<Region>& labels() const { return labels_; }
  std::size_t count(Region r) const;
  double fillet_radius() const { return fillet_radius_; }
  int fillet_nodes() const { return fillet_nodes_; }
  /// Number of 4-connected components of the given label.
  int components(Region r) const;
  void write_csv(const std::string& path) const;

 private:
  Grid2D grid_;
  std::vector<Region> labels_;
  double fillet_radius_ = 0.0;
  int fillet_nodes_ = 0;
};

/// Labels every node of the grid; K must be continuous on the grid box.
RegionMap build_region_map(const DomainSpec& spec, const Grid2D& grid, const ScalarField& K);

struct SpacelikeReport {
  double sup = 0.0;
  double at_x = 0.0;
  double eta0 = 0.0;
  bool pass = true;
};

/// sup of a * Kh * kappa_x^2 along the curve, where Kh > 0 is the hyperbolic
/// coefficient of u_yy - a Kh u_xx. Both sides are sampled up to x = 0.
SpacelikeReport spacelike_check(const Curve& kappa, const ScalarField& a, const ScalarField& Kh, double eta0,
                                double x_lo, double x_hi, int samples = 801);

struct OrientationReport {
  bool pass = true;
  int checked = 0;
  int failed = 0;
};

/// Marching +y (HyperbolicUp) or -y (HyperbolicDown) must enter the component
/// from every node next to the degeneracy band: K decreases along the march
/// (centred difference at the node).
OrientationReport orientation_check(const RegionMap& map, const ScalarField& K);

}  // namespace mixtype
