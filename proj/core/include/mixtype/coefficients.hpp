#pragma once

#include <string>
#include <vector>

#include "mixtype/field.hpp"
#include "mixtype/geometry.hpp"

namespace mixtype {

/// Coefficients of u_yy + a K u_xx + b1 u_x + b2 u_y + c u = f and the bounds
/// they are declared to satisfy.
struct CoefficientSet {
  ScalarField K;
  ScalarField a = ScalarField::constant(1.0);
  ScalarField b1, b2, c, f;
  double lambda_lo = 1.0;
  double Lambda_hi = 1.0;
  double C_b = 1.0;
  double C_K = 2.0;
  double eta0 = 0.5;
  double eps_c = 1e-3;
  int d = 2;

  /// Signed coefficient of u_xx.
  ScalarField A() const { return a * K; }
  CoefficientSet with_f(ScalarField rhs) const {
    CoefficientSet c2 = *this;
    c2.f = std::move(rhs);
    return c2;
  }
};

struct InvariantCheck {
  std::string name;
  bool pass = true;
  double worst = 0.0;  // largest violation (lhs - rhs), <= 0 when passing
  int nodes = 0;
};

/// lambda <= a <= Lambda on the non-exterior nodes.
InvariantCheck check_a_bounds(const CoefficientSet& c, const RegionMap& map);
/// |b1| <= C_b (sqrt|K| + |K_x|) on the non-exterior nodes.
InvariantCheck levy_check(const CoefficientSet& c, const RegionMap& map);
/// In the hyperbolic components: K_x^2 <= C_K^2 |K_y| and |y - kappa|^d <= C_K |K|.
InvariantCheck degeneracy_check(const CoefficientSet& c, const RegionMap& map, const Curve& kappa_up,
                                const Curve& kappa_down);
/// c <= eps_c in the elliptic region.
InvariantCheck c_sign_check(const CoefficientSet& c, const RegionMap& map);

std::vector<InvariantCheck> check_invariants(const CoefficientSet& c, const RegionMap& map, const Curve& kappa_up,
                                             const Curve& kappa_down);

/// f = u_yy + a K u_xx + b1 u_x + b2 u_y + c u, exact for expression fields.
ScalarField manufacture_linear(const ScalarField& u, const CoefficientSet& c);

/// psi = det D^2 u / K. Throws DivisionByDegeneracy unless det D^2 u vanishes
/// on the sampled zero set of K inside the box [-R, R]^2.
ScalarField manufacture_monge_ampere(const ScalarField& u, const ScalarField& K, double R);

}  // namespace mixtype
