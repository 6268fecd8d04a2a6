#include "mixtype/compat.hpp"

#include <algorithm>
#include <cmath>

#include "mixtype/errors.hpp"
#include "mixtype/numerics.hpp"

namespace mixtype {

namespace {

constexpr double kCharacteristicTol = 1e-8;

struct PointJets {
  Jet A, b1, b2, c, f;
};

PointJets point_jets(const CoefficientSet& cf, double x, double y, int order) {
  const int o = std::max(order, 0);
  auto j = [&](const ScalarField& s) { return s.is_zero() ? Jet(o) : s.jet(x, y, o); };
  return {j(cf.A()), j(cf.b1), j(cf.b2), j(cf.c), j(cf.f)};
}

// Taylor coefficient (k, l) of L U - f.
double residual_coeff(const Jet& U, const PointJets& pj, int k, int l) {
  const Jet Ux = partial_x(U), Uy = partial_y(U);
  const Jet R = partial_y(Uy) + pj.A * partial_x(Ux) + pj.b1 * Ux + pj.b2 * Uy + pj.c * U - pj.f;
  return R.coeff(k, l);
}

// Fills the order-n coefficients with l >= 2 from the PDE, given those with l <= 1.
void fill_from_pde(Jet& U, const PointJets& pj, int n) {
  for (int l = 2; l <= n; ++l) {
    const int k = n - l;
    U.coeff(k, l) = 0.0;
    U.coeff(k, l) = -residual_coeff(U, pj, k, l - 2) / (l * (l - 1));
  }
}

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

bool CompatReport::ok() const {
  return std::all_of(pass.begin(), pass.end(), [](bool b) { return b; });
}

Jet resolve_jet(const CauchyTrace& trace, const CoefficientSet& coeffs, double x0, Side side, int order,
                std::vector<double>* dets) {
  if (order < 1) throw Error(ErrorKind::Config, "jet order must be at least 1");
  Series kap = trace.kappa.jet(x0, side, order);
  const double y0 = kap[0];
  kap[0] = 0.0;
  const Series phi = trace.phi.jet(x0, side, order);
  const Series psi = trace.psi.jet(x0, side, order - 1);
  const PointJets pj = point_jets(coeffs, x0, y0, order - 2);

  const double slope = kap[1];
  if (std::abs(1.0 + pj.A.value() * slope * slope) < kCharacteristicTol)
    throw Error(ErrorKind::CharacteristicCorner, "initial curve is characteristic at x = " + std::to_string(x0));

  Jet U(order);
  U.coeff(0, 0) = phi[0];
  for (int n = 1; n <= order; ++n) {
    // phi and psi equations are affine in (U_{n,0}, U_{n-1,1}): sample three points
    auto eval = [&](double alpha, double beta) {
      U.coeff(n, 0) = alpha;
      U.coeff(n - 1, 1) = beta;
      fill_from_pde(U, pj, n);
      const double e1 = U.along(kap)[n] - phi[n];
      const double e2 = partial_y(U).along(kap)[n - 1] - psi[n - 1];
      return std::pair{e1, e2};
    };
    const auto [p0, q0] = eval(0.0, 0.0);
    const auto [p1, q1] = eval(1.0, 0.0);
    const auto [p2, q2] = eval(0.0, 1.0);
    const double m11 = p1 - p0, m12 = p2 - p0, m21 = q1 - q0, m22 = q2 - q0;
    const double det = m11 * m22 - m12 * m21;
    if (dets) dets->push_back(det);
    if (std::abs(det) < kCharacteristicTol)
      throw Error(ErrorKind::CharacteristicCorner, "singular jet system at order " + std::to_string(n));
    const double alpha = (-p0 * m22 + q0 * m12) / det;
    const double beta = (-q0 * m11 + p0 * m21) / det;
    (void)eval(alpha, beta);
  }
  return U;
}

CompatReport check_compatibility(const CauchyTrace& trace, const CoefficientSet& coeffs, int m, double rel_tol) {
  if (m < 1) throw Error(ErrorKind::Config, "compatibility order must be at least 1");
  CompatReport r;
  r.order = m;
  std::vector<double> dr, dl;
  r.right = resolve_jet(trace, coeffs, 0.0, Side::Right, m, &dr);
  r.left = resolve_jet(trace, coeffs, 0.0, Side::Left, m, &dl);

  // scale of the data jets at the corner, in derivative units
  double scale = 0.0;
  for (Side s : {Side::Right, Side::Left}) {
    const Series phi = trace.phi.jet(0.0, s, m), psi = trace.psi.jet(0.0, s, m - 1);
    for (int k = 0; k <= m; ++k) scale = std::max(scale, std::abs(phi[k]) * factorial(k));
    for (int k = 0; k < m; ++k) scale = std::max(scale, std::abs(psi[k]) * factorial(k));
  }
  if (!coeffs.f.is_zero() && m >= 2) {
    const Jet f = coeffs.f.jet(0.0, 0.0, m - 2);
    for (int n = 0; n <= m - 2; ++n)
      for (int l = 0; l <= n; ++l) scale = std::max(scale, std::abs(f.derivative(n - l, l)));
  }
  r.scale = scale;
  r.tol = std::isinf(rel_tol) ? rel_tol : rel_tol * scale;

  for (int n = 1; n <= m; ++n) {
    double res = 0.0;
    for (int l = 0; l <= 1; ++l)
      res = std::max(res, std::abs(r.right.derivative(n - l, l) - r.left.derivative(n - l, l)));
    if (n == 1) res = std::max(res, std::abs(r.right.derivative(0, 0) - r.left.derivative(0, 0)));
    r.residuals.push_back(res);
    r.pass.push_back(res <= r.tol);
    r.tols.push_back(r.tol);
    r.determinant_trail.push_back(std::min(std::abs(dr[n - 1]), std::abs(dl[n - 1])));
  }
  r.corner_jet = 0.5 * (r.right + r.left);
  return r;
}

namespace {

double smooth_cutoff(double t, double width) {
  if (width <= 0.0) return 1.0;
  return numerics::smooth_step(std::abs(t) / width - 1.0);
}

}  // namespace

double CauchyExtension::operator()(std::size_t column, double y) const {
  const Jet& U = jets[column];
  const double t = y - curve_y[column];
  double s = 0.0, tk = 1.0;
  for (int k = 1; k <= order; ++k) {
    tk *= t;
    s += U.coeff(0, k) * tk;
  }
  return U.coeff(0, 0) + smooth_cutoff(t, cutoff) * s;
}

CauchyExtension build_extension(const CauchyTrace& trace, const CoefficientSet& coeffs, int order,
                                std::vector<double> xs, double cutoff, double rel_tol) {
  CauchyExtension e;
  e.order = order;
  e.cutoff = cutoff;
  const bool corner = !xs.empty() && *std::min_element(xs.begin(), xs.end()) <= 0.0 &&
                      *std::max_element(xs.begin(), xs.end()) >= 0.0;
  if (corner) {
    e.corner = check_compatibility(trace, coeffs, order + 1, rel_tol);
    if (!e.corner.ok()) {
      std::size_t n = 0;
      while (n < e.corner.pass.size() && e.corner.pass[n]) ++n;
      throw Error(ErrorKind::IncompatibleData, "corner condition " + std::to_string(n + 1) + " fails: residual " +
                                                   std::to_string(e.corner.residuals[n]) + " > " +
                                                   std::to_string(e.corner.tol));
    }
  }
  e.jets.reserve(xs.size());
  for (double x : xs) {
    e.curve_y.push_back(trace.kappa(x));
    e.jets.push_back(x == 0.0 ? e.corner.corner_jet
                              : resolve_jet(trace, coeffs, x, x > 0.0 ? Side::Right : Side::Left, order));
  }
  e.xs = std::move(xs);
  return e;
}

GridFunction extend_cauchy_data(const CauchyTrace& trace, const CoefficientSet& coeffs, int order, const Grid2D& grid,
                                const Mask& region, double cutoff, double rel_tol) {
  std::vector<double> xs;
  std::vector<int> cols;
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.ny; ++j)
      if (region[grid.index(i, j)]) {
        xs.push_back(grid.x(i));
        cols.push_back(i);
        break;
      }
  const CauchyExtension e = build_extension(trace, coeffs, order, xs, cutoff, rel_tol);
  GridFunction v(grid, Mask(grid.size(), 0));
  for (std::size_t c = 0; c < cols.size(); ++c)
    for (int j = 0; j < grid.ny; ++j)
      if (region[grid.index(cols[c], j)]) v.define(cols[c], j, e(c, grid.y(j)));
  return v;
}

}  // namespace mixtype
