#pragma once

#include <string>
#include <vector>

#include "mixtype/composite.hpp"
#include "mixtype/smoothing.hpp"

namespace mixtype {

/// det D^2 u = K psi(x, y, u, u_x, u_y) in the original variables.
struct NonlinearProblem {
  Expr psi = Expr::constant(1.0);  // in x, y, u, p1, p2
  double psi_lower = 1.0;          // lambda
  ScalarField K = ScalarField::parse("x^2 - y^2");
  DomainSpec spec = cross_domain();  // the zero set of K

  /// Samples psi over |x|, |y|, |u|, |p| <= range; Config error below psi_lower.
  void validate(double range = 1.0) const;
};

/// Pointwise data of the scaled problem at one level: with
/// u(x~) = x~1^2 / 2 + eps^5 w(x~ / eps^2), K and psi are taken at
/// (eps^2 x, eps^4 x1^2 / 2 + eps^5 w, eps^2 x1 + eps^3 w_1, eps^3 w_2).
struct LinearizationState {
  double eps = 0.0;
  GridFunction Phi11, Phi12, Phi22;  // cofactors of (delta_i1 delta_j1 + eps w_ij)
  GridFunction a1, a2, a0;           // -eps^2 K psi_p1, -eps^2 K psi_p2, -eps^4 K psi_u
  GridFunction F;                    // F(w)
  GridFunction K, psi, psi_u, psi_p1, psi_p2;
  double det_identity_defect = 0.0;  // max |det Phi - (eps F + K psi)|
};

/// F(w) = (1 + eps w_11) w_22 - eps w_12^2 - K psi / eps with centred
/// differences (one-sided at mask edges).
GridFunction evaluate_F(const GridFunction& w, double eps, const NonlinearProblem& problem);

LinearizationState linearize(const GridFunction& w, double eps, const NonlinearProblem& problem);

/// F'(w) rho = Phi^ij rho_ij + a_i rho_i + a rho with the differences used by evaluate_F.
GridFunction apply_linearization(const LinearizationState& s, const GridFunction& rho);

/// y1 solves Phi^12 d1 y1 + Phi^22 d2 y1 = 0, y1(x1, 0) = x1; y2 = x2.
/// Coefficients of F'(w) in the y coordinates, assembled by differences of y1.
struct TransformField {
  GridFunction y1;
  GridFunction b11, b12, b22, b1, b2;
  double min_jacobian = 0.0;  // min d1 y1
  double max_shift = 0.0;     // max |y1 - x1| on the unit disk
  double max_b12 = 0.0;       // on the unit disk

  /// x1 with y1(x1, x2) = y, by bilinear interpolation of y1 along the row.
  double inverse_x1(double y, double x2) const;
  /// y1 at an arbitrary point.
  double forward(double x1, double x2) const;
};

/// Marches the transport equation from x2 = 0 in both directions: classical
/// RK4 in x2, centred differences in x1. Throws TransformDegenerate if
/// d1 y1 <= 1/2 anywhere.
TransformField build_transform(const LinearizationState& s);

/// L(w) rho = a22 rho_{y2y2} + a11 K rho_{y1y1} + (b1 K + b1t d_{y1}K) rho_{y1}
///            + b2 rho_{y2} + c K rho,
/// F'(w) with det Phi replaced by K psi; all fields on the x nodes.
struct CanonicalOperator {
  GridFunction a11, a22, b1, b1t, b2, c;
  GridFunction dK;  // d_{y1} K
  /// max over the unit disk of |transform b1 - (b1 K + b1t d_{y1}K) - d_1(eps F d_1y1 / Phi22)|
  double split_residual = 0.0;
  double max_a_dev = 0.0;  // max |a_ii - 1| on the unit disk
};

CanonicalOperator canonical_operator(const LinearizationState& s, const TransformField& t,
                                     const NonlinearProblem& problem);

/// L(w) rho on the x nodes, rho given on the y grid (derivatives there,
/// interpolated at T(x)).
GridFunction apply_canonical(const CanonicalOperator& op, const LinearizationState& s, const TransformField& t,
                             const GridFunction& rho_y);

struct NashMoserConfig {
  double h = 1.0 / 64;
  int s0 = 2;  // residual norm order
  int s1 = 2;  // norm order reported for w
  double theta0 = 4.0;  // cycles per unit length
  double theta_growth = 2.0;
  int max_levels = 4;     // corrections; the history holds max_levels + 1 residuals
  double target = 1e-3;   // relative to the level-0 residual
  int stagnation_levels = 3;
  int max_halvings = 3;
  double work_radius = 2.0;  // w lives here; residuals are measured on the unit disk
  double taper = 0.5;
  Reflection reflection = Reflection::Smooth;
  /// Corner conditions of the correction data are recorded (compat_worst)
  /// but not gated: the data are residuals of earlier levels.
  CompositeOptions linear = [] {
    CompositeOptions o;
    o.compat_gate = 0;
    return o;
  }();
};

struct LevelRecord {
  int level = 0;
  double theta = 0.0;
  double residual = 0.0;       // ||F(w_l)||_{H^s0(B_1)}
  double residual_l2 = 0.0;
  double residual_max = 0.0;
  double w_norm = 0.0;         // ||w_l||_{H^s1(B_1)}
  double rho_norm = 0.0;       // ||S rho_l||_{H^2(B_1)}
  double quadratic_error = 0.0;     // ||F(w_{l+1}) - F(w_l) - F'(w_l) S rho_l||_{L2(B_1)}
  double quadratic_constant = 0.0;  // the same over ||S rho_l||^2_{H^2}
  double split_defect = 0.0;        // ||F'(w_l) rho_l - L(w_l) rho_l||_{L2(B_1)}
  double split_constant = 0.0;      // over (|F|_C0 + |DF|_C0) ||rho_l||_{H^2}
  double det_identity_defect = 0.0;
  double max_shift = 0.0;
  double max_b12 = 0.0;
  double max_a_dev = 0.0;
  double compat_worst = 0.0;  // largest graded corner residual ratio of the linear solve
  double glue_worst = 0.0;    // largest glue jump / threshold
  double seconds = 0.0;
};

struct NashMoserState {
  double epsilon = 0.0;
  int halvings = 0;
  int level = 0;
  GridFunction w, residual, rho;  // rho: the last smoothed correction
  double theta = 0.0;
  std::vector<LevelRecord> history;
  /// u(x~) = x~1^2 / 2 + eps^5 w(x~ / eps^2) on the x~ nodes (spacing eps^2 h).
  GridFunction u;
  /// max |det D^2 u - K psi| over |x~| <= eps^2 / 2 from differences of u,
  /// and the same from eps F(w).
  double unscaled_residual = 0.0;
  double unscaled_from_F = 0.0;
  std::vector<std::string> notes;
};

/// w_0 = 0; per level: F, linearize, transform, solve L(w) rho = -F(w) with
/// the composite solver in y coordinates, pull back, smooth, update. Stops at
/// target * residual_0 or after max_levels corrections. ResidualStagnation
/// (no decrease for stagnation_levels levels) halves eps, up to max_halvings.
NashMoserState iterate(const NonlinearProblem& problem, double eps, const NashMoserConfig& config);

/// One run at fixed eps, without halving.
NashMoserState iterate_fixed(const NonlinearProblem& problem, double eps, const NashMoserConfig& config);

}  // namespace mixtype
