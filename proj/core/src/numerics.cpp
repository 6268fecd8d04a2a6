#include "mixtype/numerics.hpp"

#include <Eigen/Dense>
#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace mixtype::numerics {

std::vector<double> fd_weights(int k, std::span<const double> offsets) {
  const int n = static_cast<int>(offsets.size());
  if (k >= n) throw std::invalid_argument("fd_weights: stencil too small for derivative order");
  // c[j][m] = weight of node j for derivative m
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(k) + 1, 0.0));
  double c1 = 1.0;
  double c4 = offsets[0];
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, k);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = offsets[static_cast<std::size_t>(i)];
    for (int j = 0; j < i; ++j) {
      const double c3 = offsets[static_cast<std::size_t>(i)] - offsets[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int m = mn; m >= 1; --m)
          c[i][m] = c1 * (m * c[i - 1][m - 1] - c5 * c[i - 1][m]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int m = mn; m >= 1; --m) c[j][m] = (c4 * c[j][m] - m * c[j][m - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) w[j] = c[j][k];
  return w;
}

const std::vector<double>& fd_weights_int(int k, int first_offset, int count) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::vector<double>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_tuple(k, first_offset, count);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<double> off(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) off[i] = first_offset + i;
  return cache.emplace(key, fd_weights(k, off)).first->second;
}

std::vector<double> polyfit(std::span<const double> xs, std::span<const double> ys, double x0, int degree) {
  const auto n = static_cast<Eigen::Index>(xs.size());
  if (n < degree + 1) throw std::invalid_argument("polyfit: not enough points");
  // Scale abscissae for conditioning.
  double scale = 0.0;
  for (double x : xs) scale = std::max(scale, std::abs(x - x0));
  if (scale == 0.0) scale = 1.0;
  Eigen::MatrixXd A(n, degree + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = (xs[static_cast<std::size_t>(i)] - x0) / scale;
    double p = 1.0;
    for (int d = 0; d <= degree; ++d) {
      A(i, d) = p;
      p *= t;
    }
    b(i) = ys[static_cast<std::size_t>(i)];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  std::vector<double> out(static_cast<std::size_t>(degree) + 1);
  double s = 1.0;
  for (int d = 0; d <= degree; ++d) {
    out[d] = c(d) / s;
    s *= scale;
  }
  return out;
}

double lagrange_derivative(std::span<const double> ts, std::span<const double> vs, double t0) {
  std::vector<double> off(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) off[i] = ts[i] - t0;
  const std::vector<double> w = fd_weights(1, off);
  double d = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) d += w[i] * vs[i];
  return d;
}

double lagrange_value(std::span<const double> ts, std::span<const double> vs, double t) {
  double acc = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    double l = 1.0;
    for (std::size_t j = 0; j < ts.size(); ++j)
      if (j != i) l *= (t - ts[j]) / (ts[i] - ts[j]);
    acc += l * vs[i];
  }
  return acc;
}

double smooth_step(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const auto bump = [](double z) { return std::exp(-1.0 / z); };
  return bump(1.0 - s) / (bump(1.0 - s) + bump(s));
}

}  // namespace mixtype::numerics
