#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace mixtype {

/// Truncated univariate power series  s(t) = sum_k c_k t^k, k <= order.
class Series {
 public:
  Series() = default;
  explicit Series(int order, double value = 0.0);
  Series(std::vector<double> coeffs);

  static Series identity(int order);  // t

  int order() const { return static_cast<int>(c_.size()) - 1; }
  double operator[](int k) const { return k < static_cast<int>(c_.size()) ? c_[k] : 0.0; }
  double& operator[](int k) { return c_[k]; }
  const std::vector<double>& coeffs() const { return c_; }

  /// k-th derivative at t = 0.
  double derivative(int k) const;

  Series& operator+=(const Series& o);
  Series& operator-=(const Series& o);
  Series& operator*=(double s);

  friend Series operator+(Series a, const Series& b) { return a += b; }
  friend Series operator-(Series a, const Series& b) { return a -= b; }
  friend Series operator*(Series a, double s) { return a *= s; }
  friend Series operator*(double s, Series a) { return a *= s; }
  friend Series operator*(const Series& a, const Series& b);

  Series pow(int n) const;
  double eval(double t) const;

 private:
  std::vector<double> c_{0.0};
};

/// Truncated bivariate Taylor polynomial around a point (x0, y0).
/// coeff(k, l) stores d^{k+l} f / dx^k dy^l / (k! l!).
class Jet {
 public:
  Jet() = default;
  explicit Jet(int order, double value = 0.0);

  static Jet variable_x(double x0, int order);
  static Jet variable_y(double y0, int order);

  int order() const { return order_; }
  double value() const { return c_[0]; }
  double coeff(int k, int l) const;
  double& coeff(int k, int l) { return c_[index(k, l)]; }
  /// d^{k+l} f / dx^k dy^l at the expansion point.
  double derivative(int k, int l) const;

  /// Restriction to a curve through the expansion point:
  /// returns s(t) = f(x0 + t, y0 + dy(t)) with dy(0) = 0.
  Series along(const Series& dy) const;

  Jet& operator+=(const Jet& o);
  Jet& operator-=(const Jet& o);
  Jet& operator+=(double s) { c_[0] += s; return *this; }
  Jet& operator*=(double s);

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  friend Jet operator-(double s, const Jet& a) { return (a * -1.0) + s; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator-(const Jet& a) { return a * -1.0; }
  friend Jet operator*(const Jet& a, const Jet& b);
  friend Jet operator/(const Jet& a, const Jet& b);

  /// sum_n taylor[n] (g - g(0))^n, i.e. composition with a scalar function
  /// whose Taylor coefficients at g.value() are given.
  Jet compose(std::span<const double> taylor) const;

  static int index(int k, int l) {
    const int n = k + l;
    return n * (n + 1) / 2 + l;
  }
  static int size_for(int order) { return (order + 1) * (order + 2) / 2; }

 private:
  int order_ = 0;
  std::vector<double> c_{0.0};
};

Jet exp(const Jet& g);
Jet log(const Jet& g);
Jet sin(const Jet& g);
Jet cos(const Jet& g);
Jet sqrt(const Jet& g);
Jet abs(const Jet& g);
Jet pow(const Jet& g, double p);
Jet pow_int(const Jet& g, int n);

/// Forward-mode value + gradient in N directions.
template <int N>
struct Dual {
  double v = 0.0;
  std::array<double, N> d{};

  Dual() = default;
  Dual(double value) : v(value) {}  // NOLINT: constants promote implicitly
  static Dual variable(double value, int dir) {
    Dual r(value);
    r.d[dir] = 1.0;
    return r;
  }

  Dual chain(double fv, double fd) const {
    Dual r(fv);
    for (int i = 0; i < N; ++i) r.d[i] = fd * d[i];
    return r;
  }

  friend Dual operator+(Dual a, const Dual& b) {
    a.v += b.v;
    for (int i = 0; i < N; ++i) a.d[i] += b.d[i];
    return a;
  }
  friend Dual operator-(Dual a, const Dual& b) {
    a.v -= b.v;
    for (int i = 0; i < N; ++i) a.d[i] -= b.d[i];
    return a;
  }
  friend Dual operator-(const Dual& a) { return Dual(0.0) - a; }
  friend Dual operator*(const Dual& a, const Dual& b) {
    Dual r(a.v * b.v);
    for (int i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
    return r;
  }
  friend Dual operator/(const Dual& a, const Dual& b) {
    Dual r(a.v / b.v);
    const double ib2 = 1.0 / (b.v * b.v);
    for (int i = 0; i < N; ++i) r.d[i] = (a.d[i] * b.v - a.v * b.d[i]) * ib2;
    return r;
  }
};

template <int N> Dual<N> exp(const Dual<N>& g) { const double e = std::exp(g.v); return g.chain(e, e); }
template <int N> Dual<N> log(const Dual<N>& g) { return g.chain(std::log(g.v), 1.0 / g.v); }
template <int N> Dual<N> sin(const Dual<N>& g) { return g.chain(std::sin(g.v), std::cos(g.v)); }
template <int N> Dual<N> cos(const Dual<N>& g) { return g.chain(std::cos(g.v), -std::sin(g.v)); }
template <int N> Dual<N> sqrt(const Dual<N>& g) {
  const double s = std::sqrt(g.v);
  return g.chain(s, 0.5 / s);
}
template <int N> Dual<N> abs(const Dual<N>& g) { return g.chain(std::abs(g.v), g.v < 0 ? -1.0 : 1.0); }
template <int N> Dual<N> pow(const Dual<N>& g, double p) {
  return g.chain(std::pow(g.v, p), p * std::pow(g.v, p - 1.0));
}
template <int N> Dual<N> pow_int(const Dual<N>& g, int n) {
  if (n == 0) return Dual<N>(1.0);
  return g.chain(std::pow(g.v, n), n * std::pow(g.v, n - 1));
}

}  // namespace mixtype
