#include "mixtype/expr.hpp"

#include <cctype>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>

#include "mixtype/errors.hpp"

namespace mixtype {

namespace {

using Op = Expr::Op;
using NodePtr = Expr::NodePtr;

NodePtr make_node(Op op, double value = 0.0, int var = 0, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->value = value;
  n->var = var;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->value == v; }

NodePtr k_const(double v) { return make_node(Op::Const, v); }

NodePtr k_add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return k_const(a->value + b->value);
  return make_node(Op::Add, 0.0, 0, std::move(a), std::move(b));
}

NodePtr k_neg(NodePtr a) {
  if (a->op == Op::Const) return k_const(-a->value);
  if (a->op == Op::Neg) return a->a;
  return make_node(Op::Neg, 0.0, 0, std::move(a));
}

NodePtr k_sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return k_neg(std::move(b));
  if (a->op == Op::Const && b->op == Op::Const) return k_const(a->value - b->value);
  return make_node(Op::Sub, 0.0, 0, std::move(a), std::move(b));
}

NodePtr k_mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return k_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return k_const(a->value * b->value);
  return make_node(Op::Mul, 0.0, 0, std::move(a), std::move(b));
}

NodePtr k_div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return k_const(0.0);
  if (is_const(b, 1.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return k_const(a->value / b->value);
  return make_node(Op::Div, 0.0, 0, std::move(a), std::move(b));
}

NodePtr k_pow(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return k_const(1.0);
  if (is_const(b, 1.0)) return a;
  if (a->op == Op::Const && b->op == Op::Const) return k_const(std::pow(a->value, b->value));
  return make_node(Op::Pow, 0.0, 0, std::move(a), std::move(b));
}

NodePtr k_func(Op op, NodePtr a) {
  if (a->op == Op::Const) {
    const double v = a->value;
    switch (op) {
      case Op::Sin: return k_const(std::sin(v));
      case Op::Cos: return k_const(std::cos(v));
      case Op::Exp: return k_const(std::exp(v));
      case Op::Log: return k_const(std::log(v));
      case Op::Sqrt: return k_const(std::sqrt(v));
      case Op::Abs: return k_const(std::abs(v));
      default: break;
    }
  }
  return make_node(op, 0.0, 0, std::move(a));
}

NodePtr differentiate(const NodePtr& n, int var) {
  switch (n->op) {
    case Op::Const: return k_const(0.0);
    case Op::Var: return k_const(n->var == var ? 1.0 : 0.0);
    case Op::Add: return k_add(differentiate(n->a, var), differentiate(n->b, var));
    case Op::Sub: return k_sub(differentiate(n->a, var), differentiate(n->b, var));
    case Op::Neg: return k_neg(differentiate(n->a, var));
    case Op::Mul:
      return k_add(k_mul(differentiate(n->a, var), n->b), k_mul(n->a, differentiate(n->b, var)));
    case Op::Div: {
      // (a' b - a b') / b^2
      NodePtr num = k_sub(k_mul(differentiate(n->a, var), n->b), k_mul(n->a, differentiate(n->b, var)));
      return k_div(num, k_pow(n->b, k_const(2.0)));
    }
    case Op::Pow: {
      if (n->b->op == Op::Const) {
        const double p = n->b->value;
        return k_mul(k_mul(k_const(p), k_pow(n->a, k_const(p - 1.0))), differentiate(n->a, var));
      }
      // d(a^b) = a^b (b' log a + b a'/a)
      NodePtr t1 = k_mul(differentiate(n->b, var), k_func(Op::Log, n->a));
      NodePtr t2 = k_mul(n->b, k_div(differentiate(n->a, var), n->a));
      return k_mul(n, k_add(t1, t2));
    }
    case Op::Sin: return k_mul(k_func(Op::Cos, n->a), differentiate(n->a, var));
    case Op::Cos: return k_neg(k_mul(k_func(Op::Sin, n->a), differentiate(n->a, var)));
    case Op::Exp: return k_mul(n, differentiate(n->a, var));
    case Op::Log: return k_div(differentiate(n->a, var), n->a);
    case Op::Sqrt: return k_div(differentiate(n->a, var), k_mul(k_const(2.0), n));
    case Op::Abs: return k_mul(k_div(n->a, n), differentiate(n->a, var));
  }
  return k_const(0.0);
}

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << msg << " at offset " << pos_ << " in '" << s_ << "'";
    throw Error(ErrorKind::Expression, os.str());
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = k_add(lhs, term());
      else if (accept('-')) lhs = k_sub(lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = k_mul(lhs, unary());
      else if (accept('/')) lhs = k_div(lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return k_neg(unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return k_pow(base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('(')) {
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const std::string rest(s_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      const auto used = static_cast<std::size_t>(end - rest.c_str());
      if (used == 0) fail("malformed number");
      pos_ += used;
      return k_const(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string_view id = s_.substr(start, pos_ - start);
      if (id == "x") return make_node(Op::Var, 0.0, static_cast<int>(Var::X));
      if (id == "y") return make_node(Op::Var, 0.0, static_cast<int>(Var::Y));
      if (id == "u") return make_node(Op::Var, 0.0, static_cast<int>(Var::U));
      if (id == "p1") return make_node(Op::Var, 0.0, static_cast<int>(Var::P1));
      if (id == "p2") return make_node(Op::Var, 0.0, static_cast<int>(Var::P2));
      if (id == "pi") return k_const(std::numbers::pi);
      Op op;
      if (id == "sin") op = Op::Sin;
      else if (id == "cos") op = Op::Cos;
      else if (id == "exp") op = Op::Exp;
      else if (id == "log") op = Op::Log;
      else if (id == "sqrt") op = Op::Sqrt;
      else if (id == "abs") op = Op::Abs;
      else {
        pos_ = start;
        fail("unknown identifier '" + std::string(id) + "'");
      }
      if (!accept('(')) fail("expected '(' after function name");
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      return k_func(op, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

void print(const NodePtr& n, std::ostringstream& os) {
  static const char* names[] = {"x", "y", "u", "p1", "p2"};
  switch (n->op) {
    case Op::Const: {
      std::ostringstream v;
      v.precision(17);
      v << n->value;
      if (n->value < 0) os << "(" << v.str() << ")";
      else os << v.str();
      return;
    }
    case Op::Var: os << names[n->var]; return;
    case Op::Add: os << "("; print(n->a, os); os << " + "; print(n->b, os); os << ")"; return;
    case Op::Sub: os << "("; print(n->a, os); os << " - "; print(n->b, os); os << ")"; return;
    case Op::Mul: os << "("; print(n->a, os); os << " * "; print(n->b, os); os << ")"; return;
    case Op::Div: os << "("; print(n->a, os); os << " / "; print(n->b, os); os << ")"; return;
    case Op::Neg: os << "(-"; print(n->a, os); os << ")"; return;
    case Op::Pow: os << "("; print(n->a, os); os << "^"; print(n->b, os); os << ")"; return;
    case Op::Sin: os << "sin("; print(n->a, os); os << ")"; return;
    case Op::Cos: os << "cos("; print(n->a, os); os << ")"; return;
    case Op::Exp: os << "exp("; print(n->a, os); os << ")"; return;
    case Op::Log: os << "log("; print(n->a, os); os << ")"; return;
    case Op::Sqrt: os << "sqrt("; print(n->a, os); os << ")"; return;
    case Op::Abs: os << "abs("; print(n->a, os); os << ")"; return;
  }
}

}  // namespace

Expr::Expr() : root_(k_const(0.0)) {}

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).parse()); }

Expr Expr::constant(double v) { return Expr(k_const(v)); }

Expr Expr::variable(Var v) { return Expr(make_node(Op::Var, 0.0, static_cast<int>(v))); }

Expr Expr::derivative(Var v) const { return Expr(differentiate(root_, static_cast<int>(v))); }

Expr Expr::substitute(Var v, const Expr& e) const {
  std::function<NodePtr(const NodePtr&)> walk = [&](const NodePtr& n) -> NodePtr {
    switch (n->op) {
      case Op::Const: return n;
      case Op::Var: return n->var == static_cast<int>(v) ? e.root_ : n;
      case Op::Add: return k_add(walk(n->a), walk(n->b));
      case Op::Sub: return k_sub(walk(n->a), walk(n->b));
      case Op::Mul: return k_mul(walk(n->a), walk(n->b));
      case Op::Div: return k_div(walk(n->a), walk(n->b));
      case Op::Pow: return k_pow(walk(n->a), walk(n->b));
      case Op::Neg: return k_neg(walk(n->a));
      default: return k_func(n->op, walk(n->a));
    }
  };
  return Expr(walk(root_));
}

bool Expr::uses(Var v) const {
  std::function<bool(const Node&)> walk = [&](const Node& n) -> bool {
    if (n.op == Op::Var) return n.var == static_cast<int>(v);
    return (n.a && walk(*n.a)) || (n.b && walk(*n.b));
  };
  return walk(*root_);
}

std::string Expr::to_string() const {
  std::ostringstream os;
  print(root_, os);
  return os.str();
}

std::size_t Expr::node_count() const {
  std::function<std::size_t(const Node&)> walk = [&](const Node& n) -> std::size_t {
    return 1 + (n.a ? walk(*n.a) : 0) + (n.b ? walk(*n.b) : 0);
  };
  return walk(*root_);
}

Jet Expr::jet(double x0, double y0, int order) const {
  const Jet vars[kVarCount] = {Jet::variable_x(x0, order), Jet::variable_y(y0, order), Jet(order), Jet(order),
                               Jet(order)};
  return evaluate<Jet>(std::span<const Jet>(vars, kVarCount));
}

Expr operator+(const Expr& a, const Expr& b) { return Expr(k_add(a.root_, b.root_)); }
Expr operator-(const Expr& a, const Expr& b) { return Expr(k_sub(a.root_, b.root_)); }
Expr operator*(const Expr& a, const Expr& b) { return Expr(k_mul(a.root_, b.root_)); }
Expr operator/(const Expr& a, const Expr& b) { return Expr(k_div(a.root_, b.root_)); }
Expr operator-(const Expr& a) { return Expr(k_neg(a.root_)); }

}  // namespace mixtype
