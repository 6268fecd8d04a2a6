#pragma once

#include <vector>

#include "mixtype/coefficients.hpp"
#include "mixtype/field.hpp"
#include "mixtype/grid_function.hpp"

namespace mixtype {

/// Cauchy data u = phi, u_y = psi on the initial curve y = kappa(x).
struct CauchyTrace {
  Curve kappa;
  Trace phi, psi;

  CauchyTrace reflected_x() const { return {kappa.reflected_x(), phi.reflected_x(), psi.reflected_x()}; }
};

struct CompatReport {
  int order = 0;
  std::vector<double> residuals;  // r_1..r_m
  std::vector<bool> pass;
  double tol = 0.0;    // absolute: rel_tol * scale
  std::vector<double> tols;  // per order; all equal to tol unless re-graded
  double scale = 0.0;  // largest data derivative at the corner
  std::vector<double> determinant_trail;  // smaller |det| of the two sides, per order
  Jet right, left;  // resolved jets of u at the corner from each side
  Jet corner_jet;   // their mean; meaningful when all orders pass
  bool ok() const;
};

/// Data-determined Taylor jet of u at (x0, kappa(x0)) to the given order,
/// using only the branch of the curve and data on `side`. Order n resolves
/// d_x^n u and d_x^(n-1) d_y u from the data; the PDE gives the rest.
/// `dets`, when given, receives the determinant of each order's 2x2 system.
Jet resolve_jet(const CauchyTrace& trace, const CoefficientSet& coeffs, double x0, Side side, int order,
                std::vector<double>* dets = nullptr);

/// Conditions C_1..C_m at the corner x = 0. Throws CharacteristicCorner
/// when 1 + A kappa'^2 nearly vanishes on either side.
CompatReport check_compatibility(const CauchyTrace& trace, const CoefficientSet& coeffs, int m,
                                 double rel_tol = 1e-6);

/// Column-wise form of the extension: jets of u at (x, kappa(x)) for each
/// abscissa, evaluated at any height.
struct CauchyExtension {
  std::vector<double> xs, curve_y;
  std::vector<Jet> jets;
  int order = 0;
  double cutoff = 0.0;
  CompatReport corner;

  double operator()(std::size_t column, double y) const;
};

/// Checks the corner conditions to order + 1 (when 0 lies in [min xs, max xs])
/// and resolves the jets; throws IncompatibleData on failure.
CauchyExtension build_extension(const CauchyTrace& trace, const CoefficientSet& coeffs, int order,
                                std::vector<double> xs, double cutoff = 0.0, double rel_tol = 1e-6);

/// Truncated Taylor sum v = sum_{k <= order} d_y^k u (x, kappa(x)) t^k / k!,
/// t = y - kappa(x), on the masked nodes. With cutoff > 0 the terms k >= 1
/// are multiplied by a smooth cutoff that is 1 for |t| <= cutoff and 0 beyond
/// 2 cutoff. Throws IncompatibleData unless the corner conditions hold to
/// order + 1.
GridFunction extend_cauchy_data(const CauchyTrace& trace, const CoefficientSet& coeffs, int order, const Grid2D& grid,
                                const Mask& region, double cutoff = 0.0, double rel_tol = 1e-6);

}  // namespace mixtype
