#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "mixtype/jet.hpp"

namespace mixtype {

/// Variables understood by the expression language, in evaluation order.
enum class Var : int { X = 0, Y = 1, U = 2, P1 = 3, P2 = 4 };
inline constexpr int kVarCount = 5;

/// Small arithmetic expression language used for coefficient fields,
/// manufactured solutions and nonlinearities.
///
///   expr    := term (('+'|'-') term)*
///   term    := unary (('*'|'/') unary)*
///   unary   := ('+'|'-') unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'pi' | var | func '(' expr ')' | '(' expr ')'
///   var     := x | y | u | p1 | p2
///   func    := sin | cos | exp | log | sqrt | abs
///
/// Evaluation is generic over double, Jet (exact Taylor jets in x, y) and
/// Dual<N> (first derivatives).
class Expr {
 public:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Neg, Pow, Sin, Cos, Exp, Log, Sqrt, Abs };

  struct Node {
    Op op;
    double value = 0.0;  // Const
    int var = 0;         // Var
    std::shared_ptr<const Node> a, b;
  };
  using NodePtr = std::shared_ptr<const Node>;

  Expr();  // constant zero
  static Expr parse(std::string_view text);
  static Expr constant(double v);
  static Expr variable(Var v);

  /// Symbolic partial derivative with light constant folding.
  Expr derivative(Var v) const;
  /// Replaces every occurrence of variable v by e.
  Expr substitute(Var v, const Expr& e) const;

  bool is_constant() const { return root_->op == Op::Const; }
  bool is_zero() const { return is_constant() && root_->value == 0.0; }
  double constant_value() const { return root_->value; }
  /// True if the expression depends on variable v.
  bool uses(Var v) const;
  std::string to_string() const;
  std::size_t node_count() const;

  template <class T>
  T evaluate(std::span<const T> vars) const {
    return eval_node<T>(*root_, vars);
  }
  double operator()(double x, double y) const {
    const double v[kVarCount] = {x, y, 0.0, 0.0, 0.0};
    return evaluate<double>(std::span<const double>(v, kVarCount));
  }
  double operator()(double x, double y, double u, double p1, double p2) const {
    const double v[kVarCount] = {x, y, u, p1, p2};
    return evaluate<double>(std::span<const double>(v, kVarCount));
  }
  /// Taylor jet of a field expression in (x, y) at (x0, y0).
  Jet jet(double x0, double y0, int order) const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);

 private:
  explicit Expr(NodePtr root) : root_(std::move(root)) {}

  template <class T>
  static T make_const(double c, std::span<const T> vars) {
    if constexpr (std::is_same_v<T, Jet>) {
      return Jet(vars.empty() ? 0 : vars[0].order(), c);
    } else {
      return T(c);
    }
  }

  template <class T>
  static T eval_node(const Node& n, std::span<const T> vars) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::sin;
    using std::sqrt;
    using std::abs;
    using std::pow;
    switch (n.op) {
      case Op::Const: return make_const<T>(n.value, vars);
      case Op::Var: return vars[static_cast<std::size_t>(n.var)];
      case Op::Add: return eval_node<T>(*n.a, vars) + eval_node<T>(*n.b, vars);
      case Op::Sub: return eval_node<T>(*n.a, vars) - eval_node<T>(*n.b, vars);
      case Op::Mul: return eval_node<T>(*n.a, vars) * eval_node<T>(*n.b, vars);
      case Op::Div: return eval_node<T>(*n.a, vars) / eval_node<T>(*n.b, vars);
      case Op::Neg: return make_const<T>(0.0, vars) - eval_node<T>(*n.a, vars);
      case Op::Pow: {
        const T base = eval_node<T>(*n.a, vars);
        if (n.b->op == Op::Const) {
          const double p = n.b->value;
          if (p == std::floor(p) && std::abs(p) <= 64) {
            if constexpr (std::is_same_v<T, double>) {
              return std::pow(base, p);
            } else {
              return pow_int(base, static_cast<int>(p));
            }
          }
          return pow(base, p);
        }
        const T e = eval_node<T>(*n.b, vars);
        return exp(e * log(base));
      }
      case Op::Sin: return sin(eval_node<T>(*n.a, vars));
      case Op::Cos: return cos(eval_node<T>(*n.a, vars));
      case Op::Exp: return exp(eval_node<T>(*n.a, vars));
      case Op::Log: return log(eval_node<T>(*n.a, vars));
      case Op::Sqrt: return sqrt(eval_node<T>(*n.a, vars));
      case Op::Abs: return abs(eval_node<T>(*n.a, vars));
    }
    return make_const<T>(0.0, vars);
  }

  NodePtr root_;
};

}  // namespace mixtype
