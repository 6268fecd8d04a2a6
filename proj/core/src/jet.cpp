#include "mixtype/jet.hpp"

#include <algorithm>
#include <stdexcept>

namespace mixtype {

// ---------------------------------------------------------------- Series

Series::Series(int order, double value) : c_(static_cast<std::size_t>(order) + 1, 0.0) { c_[0] = value; }

Series::Series(std::vector<double> coeffs) : c_(std::move(coeffs)) {
  if (c_.empty()) c_.push_back(0.0);
}

Series Series::identity(int order) {
  Series s(order);
  if (order >= 1) s.c_[1] = 1.0;
  return s;
}

double Series::derivative(int k) const {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return (*this)[k] * f;
}

Series& Series::operator+=(const Series& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Series& Series::operator-=(const Series& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0.0);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Series& Series::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Series operator*(const Series& a, const Series& b) {
  const int n = std::max(a.order(), b.order());
  Series r(n);
  for (int i = 0; i <= a.order(); ++i) {
    if (a[i] == 0.0) continue;
    for (int j = 0; j <= b.order() && i + j <= n; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

Series Series::pow(int n) const {
  Series r(order(), 1.0);
  for (int i = 0; i < n; ++i) r = r * *this;
  return r;
}

double Series::eval(double t) const {
  double acc = 0.0;
  for (int k = order(); k >= 0; --k) acc = acc * t + c_[k];
  return acc;
}

// ------------------------------------------------------------------- Jet

Jet::Jet(int order, double value) : order_(order), c_(static_cast<std::size_t>(size_for(order)), 0.0) {
  c_[0] = value;
}

Jet Jet::variable_x(double x0, int order) {
  Jet j(order, x0);
  if (order >= 1) j.coeff(1, 0) = 1.0;
  return j;
}

Jet Jet::variable_y(double y0, int order) {
  Jet j(order, y0);
  if (order >= 1) j.coeff(0, 1) = 1.0;
  return j;
}

double Jet::coeff(int k, int l) const {
  if (k < 0 || l < 0 || k + l > order_) return 0.0;
  return c_[index(k, l)];
}

double Jet::derivative(int k, int l) const {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  for (int i = 2; i <= l; ++i) f *= i;
  return coeff(k, l) * f;
}

Series Jet::along(const Series& dy) const {
  if (dy[0] != 0.0) throw std::invalid_argument("Jet::along: curve offset must vanish at t = 0");
  const int n = order_;
  Series result(n);
  // powers of dy(t)
  std::vector<Series> dyp;
  dyp.reserve(static_cast<std::size_t>(n) + 1);
  dyp.emplace_back(n, 1.0);
  Series dyn(dy.coeffs());
  if (dyn.order() < n) {
    std::vector<double> c = dyn.coeffs();
    c.resize(static_cast<std::size_t>(n) + 1, 0.0);
    dyn = Series(c);
  }
  for (int l = 1; l <= n; ++l) dyp.push_back(dyp.back() * dyn);
  for (int k = 0; k <= n; ++k) {
    for (int l = 0; k + l <= n; ++l) {
      const double c = coeff(k, l);
      if (c == 0.0) continue;
      const Series& p = dyp[l];
      for (int i = 0; i + k <= n; ++i) result[i + k] += c * p[i];
    }
  }
  return result;
}

Jet& Jet::operator+=(const Jet& o) {
  if (o.order_ < order_) {
    // Truncate to the lower order: higher coefficients are unknown.
    Jet t(o.order_);
    for (int i = 0; i < size_for(o.order_); ++i) t.c_[i] = c_[i] + o.c_[i];
    *this = std::move(t);
    return *this;
  }
  for (int i = 0; i < size_for(order_); ++i) c_[i] += o.c_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& o) {
  if (o.order_ < order_) {
    Jet t(o.order_);
    for (int i = 0; i < size_for(o.order_); ++i) t.c_[i] = c_[i] - o.c_[i];
    *this = std::move(t);
    return *this;
  }
  for (int i = 0; i < size_for(order_); ++i) c_[i] -= o.c_[i];
  return *this;
}

Jet& Jet::operator*=(double s) {
  for (double& v : c_) v *= s;
  return *this;
}

Jet operator*(const Jet& a, const Jet& b) {
  const int n = std::min(a.order_, b.order_);
  Jet r(n);
  for (int n1 = 0; n1 <= n; ++n1) {
    for (int l1 = 0; l1 <= n1; ++l1) {
      const double av = a.c_[Jet::index(n1 - l1, l1)];
      if (av == 0.0) continue;
      for (int n2 = 0; n1 + n2 <= n; ++n2) {
        const int base2 = n2 * (n2 + 1) / 2;
        const int baser = (n1 + n2) * (n1 + n2 + 1) / 2 + l1;
        for (int l2 = 0; l2 <= n2; ++l2) r.c_[baser + l2] += av * b.c_[base2 + l2];
      }
    }
  }
  return r;
}

Jet Jet::compose(std::span<const double> taylor) const {
  Jet g = *this;
  g.c_[0] = 0.0;
  const int n = std::min<int>(order_, static_cast<int>(taylor.size()) - 1);
  Jet r(order_, taylor[static_cast<std::size_t>(n)]);
  for (int k = n - 1; k >= 0; --k) {
    r = r * g;
    r.c_[0] += taylor[static_cast<std::size_t>(k)];
  }
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  const double b0 = b.value();
  std::vector<double> t(static_cast<std::size_t>(b.order()) + 1);
  double p = 1.0 / b0;
  for (std::size_t k = 0; k < t.size(); ++k) {
    t[k] = (k % 2 == 0 ? 1.0 : -1.0) * p;
    p /= b0;
  }
  return a * b.compose(t);
}

namespace {
double inv_factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return 1.0 / f;
}
}  // namespace

Jet exp(const Jet& g) {
  std::vector<double> t(static_cast<std::size_t>(g.order()) + 1);
  const double e = std::exp(g.value());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = e * inv_factorial(static_cast<int>(k));
  return g.compose(t);
}

Jet log(const Jet& g) {
  std::vector<double> t(static_cast<std::size_t>(g.order()) + 1);
  const double g0 = g.value();
  t[0] = std::log(g0);
  double p = g0;
  for (std::size_t k = 1; k < t.size(); ++k) {
    t[k] = ((k % 2 == 1) ? 1.0 : -1.0) / (static_cast<double>(k) * p);
    p *= g0;
  }
  return g.compose(t);
}

Jet sin(const Jet& g) {
  std::vector<double> t(static_cast<std::size_t>(g.order()) + 1);
  const double s = std::sin(g.value()), c = std::cos(g.value());
  const double cyc[4] = {s, c, -s, -c};
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = cyc[k % 4] * inv_factorial(static_cast<int>(k));
  return g.compose(t);
}

Jet cos(const Jet& g) {
  std::vector<double> t(static_cast<std::size_t>(g.order()) + 1);
  const double s = std::sin(g.value()), c = std::cos(g.value());
  const double cyc[4] = {c, -s, -c, s};
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = cyc[k % 4] * inv_factorial(static_cast<int>(k));
  return g.compose(t);
}

Jet pow(const Jet& g, double p) {
  std::vector<double> t(static_cast<std::size_t>(g.order()) + 1);
  const double g0 = g.value();
  double binom = 1.0;  // generalized binomial C(p, k)
  for (std::size_t k = 0; k < t.size(); ++k) {
    t[k] = binom * std::pow(g0, p - static_cast<double>(k));
    binom *= (p - static_cast<double>(k)) / static_cast<double>(k + 1);
  }
  return g.compose(t);
}

Jet sqrt(const Jet& g) { return pow(g, 0.5); }

Jet abs(const Jet& g) { return g.value() < 0.0 ? -g : g; }

Jet pow_int(const Jet& g, int n) {
  if (n < 0) return Jet(g.order(), 1.0) / pow_int(g, -n);
  Jet r(g.order(), 1.0);
  Jet base = g;
  while (n > 0) {
    if (n & 1) r = r * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return r;
}

}  // namespace mixtype
