#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <optional>
#include <string>

#include "gradcert/expr.hpp"

namespace gradcert {

namespace {

constexpr std::string_view kOperandExpected = "number, identifier, '(' or '-'";

bool is_reserved(std::string_view name) {
  return name == "exp" || name == "sin" || name == "cos" || name == "sqrt" ||
         name == "ln" || name == "sgncase";
}

class Parser {
 public:
  Parser(std::string_view src, std::span<const std::string> vars) : src_(src), vars_(vars) {}

  Expr parse_all() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError(pos_, "unexpected character '" + std::string(1, src_[pos_]) + "'",
                       "operator or end of input");
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c))
      throw ParseError(pos_, pos_ < src_.size() ? "unexpected character '" + std::string(1, src_[pos_]) + "'"
                                                : "unexpected end of input",
                       std::string("'") + c + "'");
  }

  Expr parse_sum() {
    Expr lhs = parse_product();
    for (;;) {
      if (accept('+'))
        lhs = Expr::make_binary(Op::Add, lhs, parse_product());
      else if (accept('-'))
        lhs = Expr::make_binary(Op::Sub, lhs, parse_product());
      else
        return lhs;
    }
  }

  Expr parse_product() {
    Expr lhs = parse_unary();
    for (;;) {
      if (accept('*'))
        lhs = Expr::make_binary(Op::Mul, lhs, parse_unary());
      else if (accept('/'))
        lhs = Expr::make_binary(Op::Div, lhs, parse_unary());
      else
        return lhs;
    }
  }

  // A minus in front of a literal becomes a negative literal so that printed
  // negative constants read back as the same node.
  Expr parse_unary() {
    if (accept('-')) {
      Expr operand = parse_unary();
      if (operand.is_constant()) return Expr::constant(-operand.value());
      return Expr::make_unary(Op::Neg, operand);
    }
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    skip_ws();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t at = pos_;
    Expr exponent = parse_unary();
    const auto n = integer_value(exponent);
    if (!n) throw ParseError(at, "exponent must be an integer constant", "integer");
    return Expr::make_pow(base, *n);
  }

  static std::optional<int> integer_value(const Expr& e) {
    const Expr folded = simplify(e);
    if (!folded.is_constant()) return std::nullopt;
    const double v = folded.value();
    if (!std::isfinite(v) || v != std::trunc(v) || std::fabs(v) > 1024) return std::nullopt;
    return static_cast<int>(v);
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= src_.size())
      throw ParseError(pos_, "unexpected end of input", std::string(kOperandExpected));
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = parse_sum();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError(pos_, "unexpected character '" + std::string(1, c) + "'",
                     std::string(kOperandExpected));
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        digits();
      else
        pos_ = save;
    }
    const std::string text(src_.substr(start, pos_ - start));
    if (text == ".") throw ParseError(start, "malformed number", "digit");
    return Expr::constant(std::strtod(text.c_str(), nullptr));
  }

  Expr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    if (name == "sgncase") {
      expect('(');
      Expr t = parse_sum();
      expect(';');
      Expr neg = parse_sum();
      expect(',');
      Expr zero = parse_sum();
      expect(',');
      Expr positive = parse_sum();
      expect(')');
      return Expr::make_sgncase(t, neg, zero, positive);
    }
    if (is_reserved(name)) {
      Op op = Op::Exp;
      if (name == "sin") op = Op::Sin;
      if (name == "cos") op = Op::Cos;
      if (name == "sqrt") op = Op::Sqrt;
      if (name == "ln") op = Op::Ln;
      expect('(');
      Expr arg = parse_sum();
      expect(')');
      return Expr::make_unary(op, arg);
    }
    for (std::size_t i = 0; i < vars_.size(); ++i)
      if (vars_[i] == name) return Expr::variable(i);
    throw ParseError(start, "unknown identifier '" + std::string(name) + "'", "declared variable");
  }

  std::string_view src_;
  std::span<const std::string> vars_;
  std::size_t pos_ = 0;
};

bool is_identifier(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (v < 0 || (v == 0 && std::signbit(v))) return "(" + s + ")";
  return s;
}

void print(const Expr& e, std::span<const std::string> names, std::string& out) {
  auto binary = [&](const char* op) {
    out += '(';
    print(e.arg(0), names, out);
    out += op;
    print(e.arg(1), names, out);
    out += ')';
  };
  auto call = [&](const char* fn) {
    out += fn;
    out += '(';
    print(e.arg(0), names, out);
    out += ')';
  };
  switch (e.op()) {
    case Op::Const: out += format_number(e.value()); break;
    case Op::Var:
      if (e.var_index() < names.size())
        out += names[e.var_index()];
      else
        out += "x" + std::to_string(e.var_index());
      break;
    case Op::Add: binary(" + "); break;
    case Op::Sub: binary(" - "); break;
    case Op::Mul: binary("*"); break;
    case Op::Div: binary("/"); break;
    case Op::Pow:
      out += '(';
      print(e.arg(0), names, out);
      out += '^';
      out += e.exponent() < 0 ? "(" + std::to_string(e.exponent()) + ")"
                              : std::to_string(e.exponent());
      out += ')';
      break;
    case Op::Neg:
      out += "(-";
      print(e.arg(0), names, out);
      out += ')';
      break;
    case Op::Exp: call("exp"); break;
    case Op::Sin: call("sin"); break;
    case Op::Cos: call("cos"); break;
    case Op::Sqrt: call("sqrt"); break;
    case Op::Ln: call("ln"); break;
    case Op::SgnCase:
      out += "sgncase(";
      print(e.arg(0), names, out);
      out += "; ";
      print(e.arg(1), names, out);
      out += ", ";
      print(e.arg(2), names, out);
      out += ", ";
      print(e.arg(3), names, out);
      out += ')';
      break;
  }
}

}  // namespace

Expr parse(std::string_view source, std::span<const std::string> var_names) {
  if (var_names.empty()) throw std::invalid_argument("variable list must not be empty");
  for (std::size_t i = 0; i < var_names.size(); ++i) {
    if (!is_identifier(var_names[i]) || is_reserved(var_names[i]))
      throw std::invalid_argument("invalid variable name '" + var_names[i] + "'");
    for (std::size_t j = 0; j < i; ++j)
      if (var_names[i] == var_names[j])
        throw std::invalid_argument("duplicate variable name '" + var_names[i] + "'");
  }
  return Parser(source, var_names).parse_all();
}

std::string to_string(const Expr& e, std::span<const std::string> var_names) {
  std::string out;
  print(e, var_names, out);
  return out;
}

}  // namespace gradcert
