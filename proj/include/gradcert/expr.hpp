#pragma once

// Expression language over chart coordinates: an immutable AST with
// parsing, printing, IEEE evaluation and exact symbolic differentiation.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gradcert {

enum class Op : std::uint8_t {
  Const,
  Var,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
  Neg,
  Exp,
  Sin,
  Cos,
  Sqrt,
  Ln,
  SgnCase,
};

class Expr;

namespace detail {
struct Node;
}

/// Immutable expression handle. Copies share the underlying node, so an
/// Expr may be read concurrently from any number of threads.
class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable(std::size_t index);

  /// Raw node constructors. No folding is applied; the parser uses these so
  /// that print/parse round trips are structural.
  static Expr make_binary(Op op, Expr lhs, Expr rhs);
  static Expr make_unary(Op op, Expr arg);
  static Expr make_pow(Expr base, int exponent);
  static Expr make_sgncase(Expr selector, Expr negative, Expr zero, Expr positive);

  Op op() const;
  double value() const;           // Const only
  std::size_t var_index() const;  // Var only
  int exponent() const;           // Pow only
  std::size_t arity() const;
  const Expr& arg(std::size_t i) const;

  bool is_constant() const { return op() == Op::Const; }
  bool is_constant(double v) const { return is_constant() && value() == v; }

  /// Largest variable index + 1 (0 for closed expressions).
  std::size_t required_dim() const;
  std::size_t node_count() const;

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  explicit Expr(std::shared_ptr<const detail::Node> node);
  std::shared_ptr<const detail::Node> node_;
};

// Folding constructors. These apply the local rules of simplify() (constant
// folding, x*0, x*1, x+0, x^1, double negation) and are what diff() uses.
Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr exp(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr sqrt(const Expr& a);
Expr ln(const Expr& a);
Expr sgncase(const Expr& selector, const Expr& negative, const Expr& zero,
             const Expr& positive);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t position, std::string message, std::string expected);

  std::size_t position() const { return position_; }
  const std::string& message() const { return message_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t position_;
  std::string message_;
  std::string expected_;
};

enum class EvalErrorKind { DivByZero, DomainError };

class EvalError : public std::runtime_error {
 public:
  EvalError(EvalErrorKind kind, std::vector<double> at);

  EvalErrorKind kind() const { return kind_; }
  const std::vector<double>& at() const { return at_; }

 private:
  EvalErrorKind kind_;
  std::vector<double> at_;
};

/// Parses infix text. Precedence: ^ > unary - > * / > + -. Exponents must
/// fold to integer constants. `sgncase(t; neg, zero, pos)` selects a branch
/// by the strict sign of t.
Expr parse(std::string_view source, std::span<const std::string> var_names);

/// Fully parenthesised text that parse() maps back to the same AST.
std::string to_string(const Expr& e, std::span<const std::string> var_names = {});

/// Throws EvalError on division by zero, sqrt of a negative, ln of a
/// non-positive number, or a zero base raised to a negative power.
double eval(const Expr& e, std::span<const double> point);

/// Same semantics as eval() carried out in long double. Used where double
/// underflow would destroy a ratio of two flat quantities.
long double eval_extended(const Expr& e, std::span<const double> point);

/// Exact derivative with respect to variable `var`. sgncase differentiates
/// branchwise with a zero derivative on the seam; this is only meaningful
/// when the function is smooth across the seam.
Expr diff(const Expr& e, std::size_t var);

/// Bottom-up rebuild through the folding constructors.
Expr simplify(const Expr& e);

}  // namespace gradcert
