#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

#include "mixtype/errors.hpp"
#include "mixtype/nashmoser.hpp"

using namespace mixtype;

namespace {

template <class Fn>
GridFunction sample(const Grid2D& g, const Mask& m, Fn fn) {
  GridFunction u(g, m);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (u.defined(i, j)) u(i, j) = fn(g.x(i), g.y(j));
  return u;
}

GridFunction on_disk(double radius, double h, auto fn) {
  const Grid2D g = Grid2D::covering(radius, h);
  return sample(g, disk_mask(g, radius), fn);
}

// a few random low modes with a fixed seed
struct RandomSmooth {
  double c[6][4];
  explicit RandomSmooth(unsigned seed, double amplitude) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    for (auto& row : c)
      for (double& v : row) v = d(gen);
    for (auto& row : c) row[0] *= amplitude / 6;
  }
  double operator()(double x, double y) const {
    double s = 0.0;
    for (const auto& r : c) s += r[0] * std::sin(2 * r[1] * x + 2 * r[2] * y + 3 * r[3]);
    return s;
  }
};

// interior nodes: the 3x3 block around them is defined
bool interior(const GridFunction& u, int i, int j) {
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di)
      if (!u.grid().contains(i + di, j + dj) || !u.defined(i + di, j + dj)) return false;
  return true;
}

double slope(double x0, double y0, double x1, double y1) { return std::log(y1 / y0) / std::log(x1 / x0); }

NonlinearProblem tricomi_psi(const char* psi = "1") {
  NonlinearProblem p;
  p.psi = Expr::parse(psi);
  p.psi_lower = 0.5;
  return p;
}

}  // namespace

TEST_CASE("F at zero is -eps^3 (x1^2 - x2^2)") {
  const NonlinearProblem p = tricomi_psi();
  for (double eps : {0.1, 0.05}) {
    const GridFunction w = on_disk(1.0, 1.0 / 32, [](double, double) { return 0.0; });
    const GridFunction F = evaluate_F(w, eps, p);
    const Grid2D& g = F.grid();
    double d = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (F.defined(i, j))
          d = std::max(d, std::abs(F(i, j) + eps * eps * eps * (g.x(i) * g.x(i) - g.y(j) * g.y(j))));
    CHECK(d <= 1e-15);
  }
}

TEST_CASE("F of x2^2 / 2 with K = 0 is one") {
  NonlinearProblem p = tricomi_psi();
  p.K = ScalarField::parse("0");
  const GridFunction w = on_disk(1.0, 1.0 / 16, [](double, double y) { return 0.5 * y * y; });
  const GridFunction F = evaluate_F(w, 0.3, p);
  CHECK(std::abs(F.max_abs() - 1.0) <= 1e-12);
  CHECK((F - GridFunction(F.grid(), F.mask(), 1.0)).max_abs() <= 1e-12);
}

TEST_CASE("F matches a per-node determinant") {
  const NonlinearProblem p = tricomi_psi("1 + 0.5 * sin(x + u) * p2 + p1^2");
  const double eps = 0.1, h = 1.0 / 16;
  const RandomSmooth f(7, 0.8);
  const GridFunction w = on_disk(1.0, h, f);
  const GridFunction F = evaluate_F(w, eps, p);
  const Grid2D& g = w.grid();
  double d = 0.0;
  int n = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      if (!interior(w, i, j)) continue;
      const double w1 = (w(i + 1, j) - w(i - 1, j)) / (2 * h), w2 = (w(i, j + 1) - w(i, j - 1)) / (2 * h);
      const double w11 = (w(i + 1, j) - 2 * w(i, j) + w(i - 1, j)) / (h * h);
      const double w22 = (w(i, j + 1) - 2 * w(i, j) + w(i, j - 1)) / (h * h);
      const double w12 = (w(i + 1, j + 1) - w(i + 1, j - 1) - w(i - 1, j + 1) + w(i - 1, j - 1)) / (4 * h * h);
      Eigen::Matrix2d M;
      M << 1 + eps * w11, eps * w12, eps * w12, eps * w22;
      const double x1 = g.x(i), x2 = g.y(j), e2 = eps * eps;
      const double K = e2 * x1 * e2 * x1 - e2 * x2 * e2 * x2;
      const double psi = p.psi(e2 * x1, e2 * x2, 0.5 * e2 * e2 * x1 * x1 + e2 * e2 * eps * w(i, j), e2 * x1 + e2 * eps * w1,
                               e2 * eps * w2);
      d = std::max(d, std::abs(F(i, j) - (M.determinant() - K * psi) / eps));
      ++n;
    }
  CHECK(n > 500);
  CHECK(d <= 1e-12);
}

TEST_CASE("linearization at zero") {
  const GridFunction w = on_disk(1.0, 1.0 / 16, [](double, double) { return 0.0; });
  const LinearizationState s = linearize(w, 0.1, tricomi_psi());
  CHECK(s.Phi11.max_abs() == 0.0);
  CHECK(s.Phi12.max_abs() == 0.0);
  CHECK((s.Phi22 - GridFunction(w.grid(), s.Phi22.mask(), 1.0)).max_abs() == 0.0);
  CHECK(s.det_identity_defect <= 1e-15);
}

TEST_CASE("directional derivative has first-order remainder") {
  const NonlinearProblem p = tricomi_psi("1 + 0.5 * sin(x + u) * p2 + p1^2");
  const double eps = 0.1, h = 1.0 / 32;
  const GridFunction w = on_disk(1.0, h, RandomSmooth(3, 0.5));
  const GridFunction rho = on_disk(1.0, h, RandomSmooth(4, 0.5));
  const LinearizationState s = linearize(w, eps, p);
  const GridFunction F0 = evaluate_F(w, eps, p), Lr = apply_linearization(s, rho);
  std::vector<double> ts{1e-2, 1e-3, 1e-4, 1e-5}, errs;
  for (double t : ts) {
    GridFunction wt = rho;
    wt *= t;
    wt += w;
    GridFunction q = evaluate_F(wt, eps, p) - F0;
    q *= 1.0 / t;
    errs.push_back((q - Lr).l2());
  }
  for (std::size_t k = 1; k < ts.size(); ++k) CHECK(slope(ts[k - 1], errs[k - 1], ts[k], errs[k]) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("quadratic remainder for psi = 1") {
  // F(w + rho) - F(w) - F'(w) rho = eps (rho_11 rho_22 - rho_12^2) with the same differences
  const NonlinearProblem p = tricomi_psi();
  const double eps = 0.05, h = 1.0 / 32;
  const GridFunction w = on_disk(1.0, h, RandomSmooth(5, 0.5)), rho = on_disk(1.0, h, RandomSmooth(6, 0.5));
  GridFunction wr = w;
  wr += rho;
  const GridFunction rem = evaluate_F(wr, eps, p) - evaluate_F(w, eps, p) - apply_linearization(linearize(w, eps, p), rho);
  const GridFunction r20 = diff(rho, 2, 0), r02 = diff(rho, 0, 2), r11 = diff(rho, 1, 1);
  const Grid2D& g = rho.grid();
  double d = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (rem.defined(i, j)) d = std::max(d, std::abs(rem(i, j) - eps * (r20(i, j) * r02(i, j) - r11(i, j) * r11(i, j))));
  CHECK(d <= 1e-12);
}

TEST_CASE("determinant identity for a polynomial w") {
  const NonlinearProblem p = tricomi_psi("1 + p1^2 + u");
  const GridFunction w = on_disk(1.0, 1.0 / 16, [](double x, double y) { return 0.25 * x * x * y - 0.5 * x * y + 0.125 * y * y * y; });
  for (double eps : {0.1, 0.05}) CHECK(linearize(w, eps, p).det_identity_defect <= 1e-10);
}

TEST_CASE("transform of w = 0 is the identity") {
  const GridFunction w = on_disk(1.2, 1.0 / 16, [](double, double) { return 0.0; });
  const LinearizationState s = linearize(w, 0.1, tricomi_psi());
  const TransformField t = build_transform(s);
  const Grid2D& g = t.y1.grid();
  double d = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) d = std::max(d, std::abs(t.y1(i, j) - g.x(i)));
  CHECK(d == 0.0);
  CHECK(t.max_b12 == 0.0);
  const CanonicalOperator op = canonical_operator(s, t, tricomi_psi());
  CHECK(op.max_a_dev <= 1e-15);
  CHECK(t.inverse_x1(0.3, 0.2) == doctest::Approx(0.3));
}

TEST_CASE("transform of s x1 x2 shears by eps s x2") {
  const double sh = 0.5, h = 1.0 / 16;
  // on a full box Phi12 is constant everywhere and y1 stays linear
  const Grid2D box = Grid2D::box(1.0, 1.0, h);
  const GridFunction w = sample(box, GridFunction(box).mask(), [&](double x, double y) { return sh * x * y; });
  double shift[2];
  for (int k = 0; k < 2; ++k) {
    const double eps = k == 0 ? 0.1 : 0.05;
    const TransformField t = build_transform(linearize(w, eps, tricomi_psi()));
    const Grid2D& g = t.y1.grid();
    double d = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        d = std::max(d, std::abs(t.y1(i, j) - (g.x(i) + eps * sh * g.y(j))));
    CHECK(d <= 1e-12);
    shift[k] = t.max_shift;
    CHECK(shift[k] <= eps * sh * 1.0 + 1e-12);
  }
  CHECK(shift[0] / shift[1] == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("transform shift is linear in eps and the cross term is second order") {
  const RandomSmooth f(11, 0.6);
  double shift[2], b12[2];
  for (int k = 0; k < 2; ++k) {
    const double eps = k == 0 ? 0.1 : 0.05;
    const TransformField t = build_transform(linearize(on_disk(1.3, 1.0 / 32, f), eps, tricomi_psi()));
    shift[k] = t.max_shift;
  }
  CHECK(shift[0] / shift[1] == doctest::Approx(2.0).epsilon(0.15));
  for (int k = 0; k < 2; ++k) {
    const double h = k == 0 ? 1.0 / 16 : 1.0 / 32;
    b12[k] = build_transform(linearize(on_disk(1.3, h, f), 0.1, tricomi_psi())).max_b12;
    CHECK(b12[k] <= 5 * h * h);
  }
  CHECK(b12[0] / b12[1] > 3.0);
}

TEST_CASE("a_ii - 1 is first order in eps") {
  const RandomSmooth f(13, 0.6);
  std::vector<double> dev;
  for (double eps : {0.1, 0.05, 0.025}) {
    const LinearizationState s = linearize(on_disk(1.3, 1.0 / 32, f), eps, tricomi_psi());
    dev.push_back(canonical_operator(s, build_transform(s), tricomi_psi()).max_a_dev);
  }
  CHECK(dev[0] / dev[1] == doctest::Approx(2.0).epsilon(0.15));
  CHECK(dev[1] / dev[2] == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("split residual of the Levy form is second order") {
  const RandomSmooth f(17, 0.6);
  const NonlinearProblem p = tricomi_psi("1 + p1^2");
  double r[2];
  for (int k = 0; k < 2; ++k) {
    const LinearizationState s = linearize(on_disk(1.3, k == 0 ? 1.0 / 16 : 1.0 / 32, f), 0.1, p);
    r[k] = canonical_operator(s, build_transform(s), p).split_residual;
  }
  CHECK(r[1] < r[0]);
  CHECK(r[0] / r[1] > 3.0);
}

TEST_CASE("folding coordinates are rejected") {
  const GridFunction w = on_disk(1.0, 1.0 / 16, [](double x, double) { return -4.0 * x * x; });
  CHECK_THROWS_AS(build_transform(linearize(w, 0.1, tricomi_psi())), Error);
  try {
    build_transform(linearize(w, 0.1, tricomi_psi()));
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TransformDegenerate);
  }
}

TEST_CASE("psi below its lower bound is a config error") {
  NonlinearProblem p = tricomi_psi("0.2 + u^2");
  CHECK_THROWS_AS(p.validate(), Error);
  p.psi_lower = 0.1;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("one correction level") {
  NashMoserConfig c;
  c.h = 1.0 / 32;
  c.max_levels = 1;
  const NonlinearProblem p = tricomi_psi();
  const double eps = 0.05;
  const NashMoserState s = iterate_fixed(p, eps, c);
  REQUIRE(s.history.size() == 2);
  CHECK(s.history[1].theta > s.history[0].theta);
  CHECK(s.history[0].residual_max == doctest::Approx(eps * eps * eps).epsilon(1e-12));
  CHECK(s.history[0].w_norm == 0.0);
  CHECK(s.history[1].residual_max < 0.1 * s.history[0].residual_max);
  CHECK(s.history[1].residual_l2 < 0.1 * s.history[0].residual_l2);
  CHECK(s.history[0].split_defect < 1e-3 * s.history[0].residual_l2);
  CHECK(s.history[0].max_shift == 0.0);
  // the unscaled residual is eps F, up to differencing
  CHECK(s.unscaled_residual == doctest::Approx(s.unscaled_from_F).epsilon(0.05));
  CHECK(s.u.grid().h == doctest::Approx(eps * eps * c.h));
}
