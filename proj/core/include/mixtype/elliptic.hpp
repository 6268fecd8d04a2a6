#pragma once

#include <string>
#include <vector>

#include "mixtype/coefficients.hpp"
#include "mixtype/geometry.hpp"
#include "mixtype/grid_function.hpp"

namespace mixtype {

/// Dirichlet problem for u_yy + a (K + delta) u_xx + b1 u_x + b2 u_y + c u = f
/// in the elliptic wedges between the two degeneracy curves.
struct EllipticProblem {
  DomainSpec spec;
  RegionMap map;
  CoefficientSet coeffs;
  ScalarField dirichlet;  // g on the curves and the outer arc
  std::vector<double> delta_schedule{1e-2, 1e-3, 1e-4, 1e-5};
  double solver_tol = 1e-10;
  int max_iterations = 3000;
  /// Unknown counts at or below this go straight to the sparse direct solver.
  std::size_t direct_threshold = 400000;
  bool check_max_principle = false;
};

struct LinearSolveStats {
  std::string method;
  int iterations = 0;
  double relative_residual = 0.0;
  std::size_t unknowns = 0;
};

/// Solves the regularized problem for one delta > 0.
GridFunction solve_regularized(const EllipticProblem& p, double delta, LinearSolveStats* stats = nullptr);

struct EllipticSolution {
  GridFunction u;  // defined on the unknown nodes
  std::vector<double> deltas;
  std::vector<double> gaps;  // L2 differences of consecutive iterates
  std::vector<double> linf;  // max |u_delta| per delta
  std::vector<LinearSolveStats> solves;
  Trace phi_upper, phi_lower;  // u on the curves (the Dirichlet data)
  Trace psi_upper, psi_lower;  // u_y on the curves from the elliptic side
  double psi_corner = 0.0;     // u_y(0) from the two tangential derivatives of g
  double trace_x_max = 0.0;    // traces are sampled on |x| <= trace_x_max
};

/// Runs the delta schedule, checks the continuation gaps and extracts traces.
EllipticSolution continue_to_degenerate(const EllipticProblem& p);

/// ||u||_{H^m} / ||f||_{H^{m+1}} over the solution mask; 0 when f vanishes.
double estimate_ratio(const EllipticSolution& sol, const ScalarField& f, int m);

/// Coefficients at the origin for the polynomial correction.
struct OriginJets {
  Jet a, b1, b2, c;  // jets at 0 of the coefficients (a is the u_xx coefficient)
  Jet f;
};

struct TaylorCorrection {
  /// c[k-2][i], k = 2..m, in the coordinates (kappa x, y):
  /// Q_k = (xs^2 - y^2) sum_i c[k-2][i] xs^(k-2-i) y^i.
  std::vector<std::vector<double>> c;
  double opening = 0.0;  // kappa^2 a(0)
  double max_residual = 0.0;
};

/// Solves successively for the homogeneous parts Q_2, ..., Q_m vanishing on
/// y = +-kappa x. Throws SingularSystem when a level's matrix is singular.
TaylorCorrection taylor_correction(const OriginJets& jets, int m, double kappa);

}  // namespace mixtype
