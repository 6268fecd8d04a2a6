#pragma once

#include <span>
#include <vector>

namespace mixtype::numerics {

/// Finite-difference weights for the k-th derivative at 0 on the given
/// (distinct) offsets, in units of the offsets (Fornberg's recursion).
std::vector<double> fd_weights(int k, std::span<const double> offsets);

/// Integer-offset variant cached for the common stencils.
const std::vector<double>& fd_weights_int(int k, int first_offset, int count);

/// Least-squares polynomial fit of the given degree in (x - x0);
/// returns Taylor coefficients c_0..c_degree.
std::vector<double> polyfit(std::span<const double> xs, std::span<const double> ys, double x0, int degree);

/// Derivative at t0 of the interpolant through values at distinct abscissae.
double lagrange_derivative(std::span<const double> ts, std::span<const double> vs, double t0);

/// Lagrange interpolation through the given nodes.
double lagrange_value(std::span<const double> ts, std::span<const double> vs, double t);

/// C-infinity step: 1 for s <= 0, 0 for s >= 1, exp-bump blend between.
double smooth_step(double s);

}  // namespace mixtype::numerics
