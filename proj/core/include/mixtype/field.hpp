#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mixtype/expr.hpp"
#include "mixtype/jet.hpp"

namespace mixtype {

/// Smooth scalar field of (x, y). Expression-backed fields carry exact jets;
/// function-backed fields fall back to centered finite differences with a
/// fixed step.
class ScalarField {
 public:
  ScalarField();  // identically zero
  ScalarField(Expr e);  // NOLINT: expressions are fields
  static ScalarField constant(double v);
  static ScalarField parse(std::string_view text);
  static ScalarField function(std::function<double(double, double)> f, double fd_step, std::string label = "function");

  double operator()(double x, double y) const;
  Jet jet(double x, double y, int order) const;

  bool is_zero() const { return expr_ && expr_->is_zero(); }
  const std::optional<Expr>& expr() const { return expr_; }
  std::string describe() const;

  /// Symbolic derivative when expression-backed, finite differences otherwise.
  ScalarField dx() const;
  ScalarField dy() const;
  /// f(-x, y) and f(x, -y).
  ScalarField reflected_x() const;
  ScalarField reflected_y() const;

  friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
  friend ScalarField operator*(double s, const ScalarField& a);
  friend ScalarField operator-(const ScalarField& a);

 private:
  std::optional<Expr> expr_;
  std::shared_ptr<const std::function<double(double, double)>> fn_;
  double fd_step_ = 1e-3;
  std::string label_;
};

/// Jet of the x- or y-partial derivative, one order lower.
Jet partial_x(const Jet& j);
Jet partial_y(const Jet& j);

enum class Side { Left, Right };

/// Graph y = kappa(x) that is smooth on each side of x = 0 and Lipschitz
/// through it. Each side is an independent smooth branch.
class Curve {
 public:
  using Fn = std::function<double(double)>;

  Curve();  // y = 0
  /// Same smooth expression on both sides.
  static Curve analytic(Expr e);
  static Curve analytic(Expr right, Expr left);
  static Curve parse(std::string_view right, std::string_view left);
  static Curve function(Fn f, double fd_step, std::string label = "function");
  /// Right branch of `right`, left branch of `left`.
  static Curve piecewise(const Curve& right, const Curve& left);
  Curve negated() const;
  Curve reflected_x() const;  // x -> -x

  double operator()(double x) const;
  /// Taylor coefficients of kappa(x0 + t), taken from the branch on `side`.
  Series jet(double x0, Side side, int order) const;
  double slope(double x0, Side side) const { return jet(x0, side, 1)[1]; }
  std::string describe() const;

 private:
  struct Branch {
    std::optional<Expr> expr;
    std::shared_ptr<const Fn> fn;
    double fd_step = 1e-3;
    std::string label;
    double value(double x) const;
    Series jet(double x0, int order, int sided) const;  // sided: -1 left-only, +1 right-only, 0 central
  };
  Branch right_, left_;
  bool negate_ = false;
  bool reflect_ = false;
};

/// Data along an initial curve, parametrized by x (phi or psi).
class Trace {
 public:
  Trace();  // zero
  static Trace analytic(Expr right, Expr left);
  /// phi(x) = U(x, kappa(x)) or, with `y_derivative`, psi(x) = U_y(x, kappa(x)).
  static Trace from_field(const ScalarField& U, const Curve& kappa, bool y_derivative);
  /// Samples at strictly increasing abscissae; jets by local least squares,
  /// never mixing samples from both sides of x = 0.
  static Trace sampled(std::vector<double> xs, std::vector<double> values);

  double operator()(double x) const;
  Series jet(double x0, Side side, int order) const;
  bool is_zero() const { return kind_ == Kind::Zero; }
  bool is_sampled() const { return kind_ == Kind::Sampled; }
  const std::vector<double>& sample_x() const { return xs_; }
  const std::vector<double>& sample_values() const { return vs_; }
  Trace negated() const;
  Trace reflected_x() const;

 private:
  enum class Kind { Zero, Analytic, Field, Sampled };
  Kind kind_ = Kind::Zero;
  std::optional<Expr> right_, left_;
  std::optional<ScalarField> field_;
  std::optional<Curve> curve_;
  bool dy_ = false;
  std::vector<double> xs_, vs_;
  double sign_ = 1.0;
  bool reflect_ = false;
};

}  // namespace mixtype
