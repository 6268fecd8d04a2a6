#pragma once

#include <string>
#include <vector>

#include "mixtype/elliptic.hpp"
#include "mixtype/hyperbolic.hpp"

namespace mixtype {

struct CompositeOptions {
  double h = 1.0 / 64;
  std::vector<double> delta_schedule{1e-2, 1e-3, 1e-4, 1e-5};
  std::vector<double> epsilon_schedule{1e-2, 1e-3, 1e-4, 1e-5};
  double cfl = 0.8;
  ScalarField dirichlet;  // g; zero by default
  int extension_order = 3;
  /// Corner residuals of the extracted traces are reported to compat_order
  /// (d + 2) and gated to compat_gate (m + d - 2 with m = 3). The last order
  /// needs the third derivative of the sampled u_y at the corner, which
  /// converges only like h; its tolerance is left infinite.
  int compat_order = 4;
  int compat_gate = 3;
  /// Corner condition n on the extracted traces passes when its residual is
  /// below max(compat_tol, trace_compat_factor (h^2 + h^(5-n))) * scale:
  /// the traces carry a smooth O(h^2) error and an O(h^4) stencil error,
  /// and r_n reads the (n-1)-th derivative of the sampled u_y.
  double compat_tol = 1e-6;
  double trace_compat_factor = 50.0;
  /// Glue defect threshold: glue_factor * h^2 * max|u|.
  double glue_factor = 50.0;
  bool enforce_invariants = true;
};

struct GlueDefect {
  double value_jump = 0.0;  // hyperbolic side extrapolated to the curve vs phi
  double slope_jump = 0.0;  // one-sided u_y on the hyperbolic side vs psi
  double threshold = 0.0;
  int columns = 0;
  bool pass = true;
};

struct CompositeRun {
  DomainSpec spec;
  CoefficientSet coeffs;
  CompositeOptions options;
  RegionMap map;
  OrientationReport orientation;
  std::vector<InvariantCheck> invariants;
  EllipticSolution elliptic;
  CompatReport compat_up, compat_down;
  DegenerateSolution up, down;
  GridFunction u_global;  // on the inner disk
  GlueDefect glue_up, glue_down;
};

/// Relative tolerance for corner condition n on extracted traces (before
/// multiplying by the data scale).
double trace_compat_tolerance(const CompositeOptions& opt, int n);

/// Elliptic continuation between the curves, traces, compatibility check,
/// both hyperbolic marches, assembly on the inner disk.
CompositeRun solve_linear_mixed(const DomainSpec& spec, const CoefficientSet& coeffs, const CompositeOptions& opt);

struct EstimateRow {
  int s = 0;
  double norm_u = 0.0;  // ||u||_{H^s(B_1)}
  double norm_f = 0.0;  // ||f||_{H^{s+d+3}(B_1)}
  double ratio = 0.0;
  double drift = 0.0;  // relative change against the refined run, when given
  bool stable = true;
};

/// Ratios ||u||_{H^s} / ||f||_{H^{s+d+3}} for s = 0..s_max. With `refined`,
/// drift = |ratio_refined / ratio - 1| and stable = drift < max_drift.
std::vector<EstimateRow> verify_estimate(const CompositeRun& run, int s_max, const CompositeRun* refined = nullptr,
                                         double max_drift = 0.2);

struct FailureReport {
  std::string failure_mode;  // "orientation" or "none"
  OrientationReport orientation;
  bool forced = false;
  std::string forced_outcome;  // "instability", "characteristic_corner", "incompatible", "bounded"
  double forced_growth = 0.0;  // max level norm / data scale
};

/// Checks the marching orientation; with `force`, marches the region above
/// the upper curve anyway and reports what happens.
FailureReport demonstrate_failure_mode(const DomainSpec& spec, const CoefficientSet& coeffs, double h, bool force);

}  // namespace mixtype
