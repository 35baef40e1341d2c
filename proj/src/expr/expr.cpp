#include "gradcert/expr.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <utility>

namespace gradcert {

namespace detail {

struct Node {
  Op op = Op::Const;
  double value = 0.0;
  std::size_t index = 0;  // variable index
  int exponent = 0;
  std::size_t dim = 0;  // largest variable index + 1
  std::vector<Expr> args;
};

}  // namespace detail

namespace {

std::shared_ptr<const detail::Node> const_node(double v) {
  auto n = std::make_shared<detail::Node>();
  n->op = Op::Const;
  n->value = v;
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// Expr

Expr::Expr() : node_(const_node(0.0)) {}

Expr::Expr(std::shared_ptr<const detail::Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) { return Expr(const_node(value)); }

Expr Expr::variable(std::size_t index) {
  auto n = std::make_shared<detail::Node>();
  n->op = Op::Var;
  n->index = index;
  n->dim = index + 1;
  return Expr(std::move(n));
}

Expr Expr::make_binary(Op op, Expr lhs, Expr rhs) {
  assert(op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div);
  auto n = std::make_shared<detail::Node>();
  n->op = op;
  n->args = {std::move(lhs), std::move(rhs)};
  n->dim = std::max(n->args[0].required_dim(), n->args[1].required_dim());
  return Expr(std::move(n));
}

Expr Expr::make_unary(Op op, Expr arg) {
  assert(op == Op::Neg || is_function(op));
  auto n = std::make_shared<detail::Node>();
  n->op = op;
  n->args = {std::move(arg)};
  n->dim = n->args[0].required_dim();
  return Expr(std::move(n));
}

Expr Expr::make_pow(Expr base, int exponent) {
  auto n = std::make_shared<detail::Node>();
  n->op = Op::Pow;
  n->exponent = exponent;
  n->args = {std::move(base)};
  n->dim = n->args[0].required_dim();
  return Expr(std::move(n));
}

Expr Expr::make_sgncase(Expr selector, Expr negative, Expr zero, Expr positive) {
  auto n = std::make_shared<detail::Node>();
  n->op = Op::SgnCase;
  n->args = {std::move(selector), std::move(negative), std::move(zero),
             std::move(positive)};
  for (const auto& a : n->args) n->dim = std::max(n->dim, a.required_dim());
  return Expr(std::move(n));
}

Op Expr::op() const { return node_->op; }
double Expr::value() const { return node_->value; }
std::size_t Expr::var_index() const { return node_->index; }
int Expr::exponent() const { return node_->exponent; }
std::size_t Expr::arity() const { return node_->args.size(); }
const Expr& Expr::arg(std::size_t i) const { return node_->args.at(i); }

std::size_t Expr::required_dim() const { return node_->dim; }

std::size_t Expr::node_count() const {
  std::size_t c = 1;
  for (const auto& a : node_->args) c += a.node_count();
  return c;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op() || a.arity() != b.arity()) return false;
  switch (a.op()) {
    case Op::Const:
      return std::bit_cast<std::uint64_t>(a.value()) ==
             std::bit_cast<std::uint64_t>(b.value());
    case Op::Var:
      return a.var_index() == b.var_index();
    case Op::Pow:
      if (a.exponent() != b.exponent()) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!(a.arg(i) == b.arg(i))) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Folding constructors

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() + b.value());
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expr::make_binary(Op::Add, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() - b.value());
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return -b;
  return Expr::make_binary(Op::Sub, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant()) return Expr::constant(a.value() * b.value());
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return Expr::make_binary(Op::Mul, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_constant() && b.is_constant() && b.value() != 0.0)
    return Expr::constant(a.value() / b.value());
  if (b.is_constant(1.0)) return a;
  if (a.is_constant(0.0) && !b.is_constant(0.0)) return Expr::constant(0.0);
  return Expr::make_binary(Op::Div, a, b);
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.value());
  if (a.op() == Op::Neg) return a.arg(0);
  return Expr::make_unary(Op::Neg, a);
}

Expr pow(const Expr& base, int exponent) {
  if (exponent == 1) return base;
  if (exponent == 0) return Expr::constant(1.0);
  if (base.is_constant() && !(base.value() == 0.0 && exponent < 0))
    return Expr::constant(std::pow(base.value(), exponent));
  return Expr::make_pow(base, exponent);
}

namespace {

Expr fold_function(Op op, const Expr& a) {
  if (a.is_constant()) {
    const double v = a.value();
    switch (op) {
      case Op::Exp: return Expr::constant(std::exp(v));
      case Op::Sin: return Expr::constant(std::sin(v));
      case Op::Cos: return Expr::constant(std::cos(v));
      case Op::Sqrt:
        if (v >= 0.0) return Expr::constant(std::sqrt(v));
        break;
      case Op::Ln:
        if (v > 0.0) return Expr::constant(std::log(v));
        break;
      default: break;
    }
  }
  return Expr::make_unary(op, a);
}

}  // namespace

Expr exp(const Expr& a) { return fold_function(Op::Exp, a); }
Expr sin(const Expr& a) { return fold_function(Op::Sin, a); }
Expr cos(const Expr& a) { return fold_function(Op::Cos, a); }
Expr sqrt(const Expr& a) { return fold_function(Op::Sqrt, a); }
Expr ln(const Expr& a) { return fold_function(Op::Ln, a); }

Expr sgncase(const Expr& selector, const Expr& negative, const Expr& zero,
             const Expr& positive) {
  if (selector.is_constant()) {
    const double t = selector.value();
    if (t < 0.0) return negative;
    if (t > 0.0) return positive;
    if (t == 0.0) return zero;
  }
  return Expr::make_sgncase(selector, negative, zero, positive);
}

// ---------------------------------------------------------------------------
// Errors

ParseError::ParseError(std::size_t position, std::string message, std::string expected)
    : std::runtime_error("parse error at offset " + std::to_string(position) + ": " +
                         message + (expected.empty() ? "" : " (expected " + expected + ")")),
      position_(position),
      message_(std::move(message)),
      expected_(std::move(expected)) {}

namespace {

std::string eval_message(EvalErrorKind kind, const std::vector<double>& at) {
  std::string s = kind == EvalErrorKind::DivByZero ? "division by zero" : "domain error";
  s += " at (";
  for (std::size_t i = 0; i < at.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(at[i]);
  }
  return s + ")";
}

}  // namespace

EvalError::EvalError(EvalErrorKind kind, std::vector<double> at)
    : std::runtime_error(eval_message(kind, at)), kind_(kind), at_(std::move(at)) {}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

struct RawEvalError {
  EvalErrorKind kind;
};

template <typename T>
T evaluate(const Expr& e, std::span<const double> p) {
  switch (e.op()) {
    case Op::Const: return static_cast<T>(e.value());
    case Op::Var: return static_cast<T>(p[e.var_index()]);
    case Op::Add: return evaluate<T>(e.arg(0), p) + evaluate<T>(e.arg(1), p);
    case Op::Sub: return evaluate<T>(e.arg(0), p) - evaluate<T>(e.arg(1), p);
    case Op::Mul: return evaluate<T>(e.arg(0), p) * evaluate<T>(e.arg(1), p);
    case Op::Div: {
      const T num = evaluate<T>(e.arg(0), p);
      const T den = evaluate<T>(e.arg(1), p);
      if (den == T(0)) throw RawEvalError{EvalErrorKind::DivByZero};
      return num / den;
    }
    case Op::Pow: {
      const T b = evaluate<T>(e.arg(0), p);
      if (b == T(0) && e.exponent() < 0) throw RawEvalError{EvalErrorKind::DivByZero};
      return std::pow(b, e.exponent());
    }
    case Op::Neg: return -evaluate<T>(e.arg(0), p);
    case Op::Exp: return std::exp(evaluate<T>(e.arg(0), p));
    case Op::Sin: return std::sin(evaluate<T>(e.arg(0), p));
    case Op::Cos: return std::cos(evaluate<T>(e.arg(0), p));
    case Op::Sqrt: {
      const T v = evaluate<T>(e.arg(0), p);
      if (v < T(0)) throw RawEvalError{EvalErrorKind::DomainError};
      return std::sqrt(v);
    }
    case Op::Ln: {
      const T v = evaluate<T>(e.arg(0), p);
      if (!(v > T(0))) throw RawEvalError{EvalErrorKind::DomainError};
      return std::log(v);
    }
    case Op::SgnCase: {
      const T t = evaluate<T>(e.arg(0), p);
      if (t < T(0)) return evaluate<T>(e.arg(1), p);
      if (t > T(0)) return evaluate<T>(e.arg(3), p);
      if (t == T(0)) return evaluate<T>(e.arg(2), p);
      throw RawEvalError{EvalErrorKind::DomainError};  // NaN selector
    }
  }
  return T(0);
}

template <typename T>
T evaluate_checked(const Expr& e, std::span<const double> p) {
  if (e.required_dim() > p.size())
    throw std::invalid_argument("point dimension " + std::to_string(p.size()) +
                                " is below the expression's variable count " +
                                std::to_string(e.required_dim()));
  try {
    return evaluate<T>(e, p);
  } catch (const RawEvalError& err) {
    throw EvalError(err.kind, std::vector<double>(p.begin(), p.end()));
  }
}

}  // namespace

double eval(const Expr& e, std::span<const double> point) {
  return evaluate_checked<double>(e, point);
}

long double eval_extended(const Expr& e, std::span<const double> point) {
  return evaluate_checked<long double>(e, point);
}

// ---------------------------------------------------------------------------
// Differentiation

Expr diff(const Expr& e, std::size_t var) {
  switch (e.op()) {
    case Op::Const: return Expr::constant(0.0);
    case Op::Var: return Expr::constant(e.var_index() == var ? 1.0 : 0.0);
    case Op::Add: return diff(e.arg(0), var) + diff(e.arg(1), var);
    case Op::Sub: return diff(e.arg(0), var) - diff(e.arg(1), var);
    case Op::Mul: {
      const Expr& a = e.arg(0);
      const Expr& b = e.arg(1);
      return diff(a, var) * b + a * diff(b, var);
    }
    case Op::Div: {
      const Expr& a = e.arg(0);
      const Expr& b = e.arg(1);
      const Expr db = diff(b, var);
      if (db.is_constant(0.0)) return diff(a, var) / b;
      return (diff(a, var) * b - a * db) / pow(b, 2);
    }
    case Op::Pow: {
      const int n = e.exponent();
      const Expr& u = e.arg(0);
      return Expr::constant(n) * pow(u, n - 1) * diff(u, var);
    }
    case Op::Neg: return -diff(e.arg(0), var);
    case Op::Exp: return e * diff(e.arg(0), var);
    case Op::Sin: return cos(e.arg(0)) * diff(e.arg(0), var);
    case Op::Cos: return -(sin(e.arg(0)) * diff(e.arg(0), var));
    case Op::Sqrt: return diff(e.arg(0), var) / (Expr::constant(2.0) * e);
    case Op::Ln: return diff(e.arg(0), var) / e.arg(0);
    case Op::SgnCase:
      return sgncase(e.arg(0), diff(e.arg(1), var), Expr::constant(0.0),
                     diff(e.arg(3), var));
  }
  return Expr::constant(0.0);
}

// ---------------------------------------------------------------------------
// Simplification

Expr simplify(const Expr& e) {
  switch (e.op()) {
    case Op::Const:
    case Op::Var: return e;
    case Op::Add: return simplify(e.arg(0)) + simplify(e.arg(1));
    case Op::Sub: return simplify(e.arg(0)) - simplify(e.arg(1));
    case Op::Mul: return simplify(e.arg(0)) * simplify(e.arg(1));
    case Op::Div: return simplify(e.arg(0)) / simplify(e.arg(1));
    case Op::Pow: return pow(simplify(e.arg(0)), e.exponent());
    case Op::Neg: return -simplify(e.arg(0));
    case Op::Exp:
    case Op::Sin:
    case Op::Cos:
    case Op::Sqrt:
    case Op::Ln: return fold_function(e.op(), simplify(e.arg(0)));
    case Op::SgnCase:
      return sgncase(simplify(e.arg(0)), simplify(e.arg(1)), simplify(e.arg(2)),
                     simplify(e.arg(3)));
  }
  return e;
}

}  // namespace gradcert
