#include "mixtype/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mixtype/numerics.hpp"

namespace mixtype {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Derivative of order k of g at 0 from samples g(step * o), o in offsets.
template <class G>
double fd_derivative(const G& g, int k, int first, int count, double step) {
  const auto& w = numerics::fd_weights_int(k, first, count);
  double acc = 0.0;
  for (int i = 0; i < count; ++i) acc += w[static_cast<std::size_t>(i)] * g((first + i) * step);
  return acc / std::pow(step, k);
}

// Centered stencil wide enough for derivative k with fourth-order accuracy.
int half_width(int k) { return (k + 1) / 2 + 1; }

}  // namespace

// ------------------------------------------------------------ ScalarField

ScalarField::ScalarField() : expr_(Expr()) {}

ScalarField::ScalarField(Expr e) : expr_(std::move(e)) {}

ScalarField ScalarField::constant(double v) { return ScalarField(Expr::constant(v)); }

ScalarField ScalarField::parse(std::string_view text) { return ScalarField(Expr::parse(text)); }

ScalarField ScalarField::function(std::function<double(double, double)> f, double fd_step, std::string label) {
  ScalarField s;
  s.expr_.reset();
  s.fn_ = std::make_shared<const std::function<double(double, double)>>(std::move(f));
  s.fd_step_ = fd_step;
  s.label_ = std::move(label);
  return s;
}

double ScalarField::operator()(double x, double y) const { return expr_ ? (*expr_)(x, y) : (*fn_)(x, y); }

Jet ScalarField::jet(double x, double y, int order) const {
  if (expr_) return expr_->jet(x, y, order);
  Jet j(order);
  const double hs = fd_step_;
  for (int n = 0; n <= order; ++n) {
    for (int l = 0; l <= n; ++l) {
      const int k = n - l;
      const int px = half_width(k), py = half_width(l);
      // tensor product of 1D stencils
      const auto& wx = numerics::fd_weights_int(k, -px, 2 * px + 1);
      const auto& wy = numerics::fd_weights_int(l, -py, 2 * py + 1);
      double acc = 0.0;
      for (int i = 0; i <= 2 * px; ++i) {
        if (wx[static_cast<std::size_t>(i)] == 0.0) continue;
        for (int m = 0; m <= 2 * py; ++m) {
          if (wy[static_cast<std::size_t>(m)] == 0.0) continue;
          acc += wx[static_cast<std::size_t>(i)] * wy[static_cast<std::size_t>(m)] *
                 (*fn_)(x + (i - px) * hs, y + (m - py) * hs);
        }
      }
      j.coeff(k, l) = acc / std::pow(hs, n) / (factorial(k) * factorial(l));
    }
  }
  return j;
}

std::string ScalarField::describe() const { return expr_ ? expr_->to_string() : label_; }

ScalarField ScalarField::dx() const {
  if (expr_) return ScalarField(expr_->derivative(Var::X));
  auto f = fn_;
  const double hs = fd_step_;
  return function(
      [f, hs](double x, double y) {
        return fd_derivative([&](double t) { return (*f)(x + t, y); }, 1, -2, 5, hs);
      },
      hs, label_ + "_x");
}

ScalarField ScalarField::dy() const {
  if (expr_) return ScalarField(expr_->derivative(Var::Y));
  auto f = fn_;
  const double hs = fd_step_;
  return function(
      [f, hs](double x, double y) {
        return fd_derivative([&](double t) { return (*f)(x, y + t); }, 1, -2, 5, hs);
      },
      hs, label_ + "_y");
}

ScalarField ScalarField::reflected_x() const {
  if (expr_) return ScalarField(expr_->substitute(Var::X, -Expr::variable(Var::X)));
  auto f = fn_;
  return function([f](double x, double y) { return (*f)(-x, y); }, fd_step_, label_ + "(-x)");
}

ScalarField ScalarField::reflected_y() const {
  if (expr_) return ScalarField(expr_->substitute(Var::Y, -Expr::variable(Var::Y)));
  auto f = fn_;
  return function([f](double x, double y) { return (*f)(x, -y); }, fd_step_, label_ + "(-y)");
}

namespace {

template <class Op>
ScalarField combine(const ScalarField& a, const ScalarField& b, Op op, const char* sym) {
  if (a.expr() && b.expr()) return ScalarField(op(*a.expr(), *b.expr()));
  return ScalarField::function([a, b, op](double x, double y) { return op(a(x, y), b(x, y)); }, 1e-3,
                               "(" + a.describe() + sym + b.describe() + ")");
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return combine(a, b, [](auto p, auto q) { return p + q; }, "+");
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  if (b.is_zero()) return a;
  return combine(a, b, [](auto p, auto q) { return p - q; }, "-");
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](auto p, auto q) { return p * q; }, "*");
}
ScalarField operator*(double s, const ScalarField& a) { return ScalarField::constant(s) * a; }
ScalarField operator-(const ScalarField& a) { return ScalarField::constant(-1.0) * a; }

Jet partial_x(const Jet& j) {
  const int n = std::max(j.order() - 1, 0);
  Jet r(n);
  for (int d = 0; d <= n; ++d)
    for (int l = 0; l <= d; ++l) r.coeff(d - l, l) = (d - l + 1) * j.coeff(d - l + 1, l);
  return r;
}

Jet partial_y(const Jet& j) {
  const int n = std::max(j.order() - 1, 0);
  Jet r(n);
  for (int d = 0; d <= n; ++d)
    for (int l = 0; l <= d; ++l) r.coeff(d - l, l) = (l + 1) * j.coeff(d - l, l + 1);
  return r;
}

// ------------------------------------------------------------------ Curve

double Curve::Branch::value(double x) const { return expr ? (*expr)(x, 0.0) : (*fn)(x); }

Series Curve::Branch::jet(double x0, int order, int sided) const {
  Series s(order);
  if (expr) {
    const Jet j = expr->jet(x0, 0.0, order);
    for (int k = 0; k <= order; ++k) s[k] = j.coeff(k, 0);
    return s;
  }
  auto g = [&](double t) { return (*fn)(x0 + t); };
  s[0] = g(0.0);
  for (int k = 1; k <= order; ++k) {
    double d;
    if (sided == 0) {
      const int p = half_width(k);
      d = fd_derivative(g, k, -p, 2 * p + 1, fd_step);
    } else if (sided > 0) {
      d = fd_derivative(g, k, 0, k + 3, fd_step);
    } else {
      d = fd_derivative(g, k, -(k + 2), k + 3, fd_step);
    }
    s[k] = d / factorial(k);
  }
  return s;
}

Curve::Curve() {
  right_.expr = Expr();
  left_.expr = Expr();
}

Curve Curve::analytic(Expr e) { return analytic(e, e); }

Curve Curve::analytic(Expr right, Expr left) {
  Curve c;
  c.right_.expr = std::move(right);
  c.left_.expr = std::move(left);
  return c;
}

Curve Curve::parse(std::string_view right, std::string_view left) {
  return analytic(Expr::parse(right), Expr::parse(left));
}

Curve Curve::function(Fn f, double fd_step, std::string label) {
  Curve c;
  Branch b;
  b.fn = std::make_shared<const Fn>(std::move(f));
  b.fd_step = fd_step;
  b.label = std::move(label);
  c.right_ = b;
  c.left_ = b;
  return c;
}

Curve Curve::piecewise(const Curve& right, const Curve& left) {
  // Flags apply to whole curves; bake them into per-branch functions when set.
  auto branch_of = [](const Curve& c, Side side) {
    if (!c.negate_ && !c.reflect_) return side == Side::Right ? c.right_ : c.left_;
    Branch b;
    b.fn = std::make_shared<const Fn>([c](double x) { return c(x); });
    b.fd_step = 1e-3;
    b.label = c.describe();
    return b;
  };
  Curve out;
  out.right_ = branch_of(right, Side::Right);
  out.left_ = branch_of(left, Side::Left);
  return out;
}

Curve Curve::negated() const {
  Curve c = *this;
  c.negate_ = !negate_;
  return c;
}

Curve Curve::reflected_x() const {
  Curve c = *this;
  c.reflect_ = !reflect_;
  return c;
}

double Curve::operator()(double x) const {
  const double xx = reflect_ ? -x : x;
  const double v = xx >= 0.0 ? right_.value(xx) : left_.value(xx);
  return negate_ ? -v : v;
}

Series Curve::jet(double x0, Side side, int order) const {
  double xx = x0;
  Side sd = side;
  if (reflect_) {
    xx = -x0;
    sd = side == Side::Right ? Side::Left : Side::Right;
  }
  const bool right = xx > 0.0 || (xx == 0.0 && sd == Side::Right);
  const Branch& b = right ? right_ : left_;
  int sided = 0;
  if (!b.expr && std::abs(xx) < (order + 4) * b.fd_step) sided = right ? 1 : -1;
  Series s = b.jet(xx, order, sided);
  for (int k = 0; k <= order; ++k) {
    double v = s[k];
    if (reflect_ && (k % 2 == 1)) v = -v;
    if (negate_) v = -v;
    s[k] = v;
  }
  return s;
}

std::string Curve::describe() const {
  auto d = [](const Branch& b) { return b.expr ? b.expr->to_string() : b.label; };
  std::string s = "right: " + d(right_) + ", left: " + d(left_);
  if (reflect_) s = "reflected(" + s + ")";
  if (negate_) s = "-(" + s + ")";
  return s;
}

// ------------------------------------------------------------------ Trace

Trace::Trace() = default;

Trace Trace::analytic(Expr right, Expr left) {
  Trace t;
  t.kind_ = Kind::Analytic;
  t.right_ = std::move(right);
  t.left_ = std::move(left);
  return t;
}

Trace Trace::from_field(const ScalarField& U, const Curve& kappa, bool y_derivative) {
  if (U.is_zero()) return Trace();
  Trace t;
  t.kind_ = Kind::Field;
  t.field_ = U;
  t.curve_ = kappa;
  t.dy_ = y_derivative;
  return t;
}

Trace Trace::sampled(std::vector<double> xs, std::vector<double> values) {
  if (xs.size() != values.size() || xs.size() < 4) throw std::invalid_argument("Trace::sampled: need >= 4 matching samples");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("Trace::sampled: abscissae must increase");
  Trace t;
  t.kind_ = Kind::Sampled;
  t.xs_ = std::move(xs);
  t.vs_ = std::move(values);
  return t;
}

Trace Trace::negated() const {
  Trace t = *this;
  t.sign_ = -sign_;
  return t;
}

Trace Trace::reflected_x() const {
  Trace t = *this;
  t.reflect_ = !reflect_;
  return t;
}

double Trace::operator()(double x) const { return jet(x, x >= 0.0 ? Side::Right : Side::Left, 0)[0]; }

Series Trace::jet(double x0, Side side, int order) const {
  double xx = x0;
  Side sd = side;
  if (reflect_) {
    xx = -x0;
    sd = side == Side::Right ? Side::Left : Side::Right;
  }
  const bool right = xx > 0.0 || (xx == 0.0 && sd == Side::Right);
  Series s(order);
  switch (kind_) {
    case Kind::Zero: break;
    case Kind::Analytic: {
      const Jet j = (right ? *right_ : *left_).jet(xx, 0.0, order);
      for (int k = 0; k <= order; ++k) s[k] = j.coeff(k, 0);
      break;
    }
    case Kind::Field: {
      Series kj = curve_->jet(xx, right ? Side::Right : Side::Left, order);
      const double y0 = kj[0];
      kj[0] = 0.0;
      Jet uj = field_->jet(xx, y0, order + (dy_ ? 1 : 0));
      if (dy_) uj = partial_y(uj);
      s = uj.along(kj);
      break;
    }
    case Kind::Sampled: {
      // Nearest samples on the requested side of 0 only.
      const int fit_deg = std::max(order, 3);
      const int want = order <= 3 ? 4 : order + 3;
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < xs_.size(); ++i) {
        const bool ok = right ? xs_[i] >= 0.0 : xs_[i] <= 0.0;
        if (ok) idx.push_back(i);
      }
      if (idx.empty()) throw std::invalid_argument("Trace::jet: no samples on requested side");
      std::stable_sort(idx.begin(), idx.end(),
                       [&](std::size_t a, std::size_t b) { return std::abs(xs_[a] - xx) < std::abs(xs_[b] - xx); });
      std::size_t n = std::min<std::size_t>(idx.size(), static_cast<std::size_t>(want));
      // keep ties at the window edge so that the fit commutes with x -> -x
      while (n < idx.size() && std::abs(std::abs(xs_[idx[n]] - xx) - std::abs(xs_[idx[n - 1]] - xx)) <= 1e-12) ++n;
      std::vector<double> px, pv;
      for (std::size_t i = 0; i < n; ++i) {
        px.push_back(xs_[idx[i]]);
        pv.push_back(vs_[idx[i]]);
      }
      const int deg = std::min(fit_deg, static_cast<int>(n) - 1);
      const auto c = numerics::polyfit(px, pv, xx, deg);
      for (int k = 0; k <= std::min(deg, order); ++k) s[k] = c[static_cast<std::size_t>(k)];
      break;
    }
  }
  for (int k = 0; k <= order; ++k) {
    double v = s[k] * sign_;
    if (reflect_ && (k % 2 == 1)) v = -v;
    s[k] = v;
  }
  return s;
}

}  // namespace mixtype
