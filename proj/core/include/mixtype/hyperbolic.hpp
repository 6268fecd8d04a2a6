#pragma once

#include <vector>

#include "mixtype/coefficients.hpp"
#include "mixtype/compat.hpp"
#include "mixtype/grid_function.hpp"

namespace mixtype {

/// Cauchy problem for u_yy + a K u_xx + b1 u_x + b2 u_y + c u = f above the
/// initial curve y = kappa(x), with K <= 0 there. Marched upwards in y inside
/// the box x_lo <= x <= x_hi, y <= y_top.
struct HyperbolicProblem {
  CoefficientSet coeffs;
  CauchyTrace trace;
  Grid2D grid;  // output grid
  double x_lo = -1.0, x_hi = 1.0;
  double y_top = 1.0;
  std::vector<double> epsilon_schedule{1e-2, 1e-3, 1e-4};
  double cfl = 0.8;
  /// Level spacing. 0 picks the largest h / n within the CFL bound, so
  /// levels land on grid rows.
  double dy = 0.0;
  bool allow_unstable = false;
  int extension_order = 3;  // d + 1
  double compat_tol = 1e-6;
  double mu = 0.0;  // energy weight; 0 selects 5 (1 + sup|b2| + sup|c|)
  bool check_spacelike = true;
};

struct EnergyLedger {
  double mu = 0.0;
  int d = 2;
  std::vector<double> y;
  /// sum_x h e^{-mu y} (u^2 + u_y^2) / (K' + eps) + a u_x^2, K' = -K
  std::vector<double> weighted;
  /// the same density without the exponential weight
  std::vector<double> unweighted;
};

struct MarchResult {
  GridFunction u;
  EnergyLedger energy;
  double dy = 0.0;
  double courant = 0.0;  // dy sqrt(sup a (K' + eps)) / h
  int levels = 0;
  double data_scale = 0.0;
  bool unstable = false;  // only set with allow_unstable
  double max_level_norm = 0.0;
};

/// One explicit leapfrog march at regularization eps. Nodes whose stencil is
/// not fully above the curve take the extension of the Cauchy data.
MarchResult march(const HyperbolicProblem& p, double epsilon);

struct DegenerateSolution {
  GridFunction u;
  EnergyLedger energy;
  std::vector<double> epsilons;
  std::vector<double> gaps;  // L2 differences of consecutive iterates
  std::vector<MarchResult> runs;
};

/// Marches every eps of the schedule and checks that the iterates settle.
DegenerateSolution solve_degenerate(const HyperbolicProblem& p);

/// ||u||_{H^m} / (||phi||_{H^{m+d+1}} + ||psi||_{H^{m+d}} + ||f||_{H^{m+d}}).
double loss_ratio(const GridFunction& u, const HyperbolicProblem& p, int m);

/// The problem below the curve y = -kappa(x) seen through y -> -y, so that a
/// downward component can be marched upwards. Needs a grid symmetric in y.
HyperbolicProblem reflected_y(const HyperbolicProblem& p, double y_bottom);

/// u(x, -y) on a grid symmetric in y.
GridFunction flip_y(const GridFunction& u);

}  // namespace mixtype
