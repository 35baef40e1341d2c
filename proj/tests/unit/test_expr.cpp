#include <array>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "gradcert/expr.hpp"

using namespace gradcert;

namespace {

const std::vector<std::string> kXY{"x", "y"};

double at(const Expr& e, double x, double y) {
  const std::array<double, 2> p{x, y};
  return eval(e, p);
}

// Richardson-extrapolated central difference, written independently of the
// library's finite differences.
double fd(const Expr& e, std::array<double, 2> p, std::size_t var) {
  auto central = [&](double h) {
    auto q = p;
    q[var] = p[var] + h;
    const double up = eval(e, q);
    q[var] = p[var] - h;
    return (up - eval(e, q)) / (2.0 * h);
  };
  const double h = 1e-3;
  const double d1 = central(h);
  const double d2 = central(h / 2);
  const double d4 = central(h / 4);
  const double r1 = (4.0 * d2 - d1) / 3.0;
  const double r2 = (4.0 * d4 - d2) / 3.0;
  return (16.0 * r2 - r1) / 15.0;
}

const std::vector<std::string> kCorpus{
    "x^2*y + 3*x - 7",
    "sin(x)*cos(y)",
    "exp(x*y)",
    "ln(x + y)",
    "sqrt(x^2 + y^2)",
    "x/y",
    "(x + 1)/(y^2 + 1)",
    "x^5 - 4*x^3*y^2 + y^4",
    "exp(-1/x^2)",
    "sin(x^2 + y)^3",
    "cos(exp(x)) + sin(ln(y))",
    "x^(-2) + y^(-3)",
    "sqrt(1 + x*y)*ln(1 + x^2)",
    "(x - y)^4/(1 + x^2*y^2)",
    "-x^2 - -y",
    "exp(sin(x))*cos(x*y)^2",
    "x*ln(x) - y*ln(y)",
    "sgncase(x - 1; exp(x)*y, exp(1)*y, exp(x)*y)",
    "1/(x + y)^2 + x^7*y",
    "sin(x)/x + sqrt(y)",
};

}  // namespace

TEST_CASE("parse: precedence and unary minus") {
  CHECK(at(parse("2 + 3*4", kXY), 0, 0) == 14.0);
  CHECK(at(parse("-x^2", kXY), 3, 0) == -9.0);
  CHECK(at(parse("2^3^2", kXY), 0, 0) == 512.0);
  CHECK(at(parse("x - y - 1", kXY), 5, 2) == 2.0);
  CHECK(at(parse("x/y/2", kXY), 8, 2) == 2.0);
  CHECK(at(parse("x^(1+1)", kXY), 3, 0) == 9.0);
}

TEST_CASE("parse: error positions") {
  try {
    parse("x + * y", kXY);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.position() == 4);
  }
  CHECK_THROWS_AS(parse("x^y", kXY), ParseError);
  CHECK_THROWS_AS(parse("x^1.5", kXY), ParseError);
  CHECK_THROWS_AS(parse("z + 1", kXY), ParseError);
  CHECK_THROWS_AS(parse("sin(x", kXY), ParseError);
  CHECK_THROWS_AS(parse("", kXY), ParseError);
}

TEST_CASE("print then parse is a fixpoint") {
  for (const auto& src : kCorpus) {
    const Expr e = parse(src, kXY);
    const std::string once = to_string(e, kXY);
    const Expr back = parse(once, kXY);
    CHECK_MESSAGE(back == e, src);
    CHECK(to_string(back, kXY) == once);
  }
}

TEST_CASE("simplify is idempotent and preserves values bitwise") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  for (const auto& src : kCorpus) {
    const Expr e = parse(src, kXY);
    const Expr s = simplify(e);
    CHECK(simplify(s) == s);
    CHECK(s.node_count() <= e.node_count());
    for (int k = 0; k < 20; ++k) {
      const double x = u(rng), y = u(rng);
      CHECK_MESSAGE(at(s, x, y) == at(e, x, y), src);
    }
  }
}

TEST_CASE("folding rules") {
  const Expr x = Expr::variable(0);
  CHECK(x * Expr::constant(1.0) == x);
  CHECK(x + Expr::constant(0.0) == x);
  CHECK((x * Expr::constant(0.0)).is_constant(0.0));
  CHECK(pow(x, 1) == x);
  CHECK(-(-x) == x);
  CHECK((Expr::constant(2.0) * Expr::constant(3.0)).is_constant(6.0));
}

TEST_CASE("symbolic derivatives agree with finite differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.3, 1.4);
  int checked = 0;
  for (const auto& src : kCorpus) {
    const Expr e = parse(src, kXY);
    for (int k = 0; k < 50; ++k) {
      const std::array<double, 2> p{u(rng), u(rng)};
      for (std::size_t var = 0; var < 2; ++var) {
        const double exact = eval(diff(e, var), p);
        const double approx = fd(e, p, var);
        const double rel = std::abs(exact - approx) / std::max(1.0, std::abs(exact));
        CHECK_MESSAGE(rel < 1e-6, src << " d/d" << kXY[var] << " at (" << p[0] << ", " << p[1] << ")");
        ++checked;
      }
    }
  }
  CHECK(checked == 20 * 50 * 2);
}

TEST_CASE("derivative examples") {
  const Expr d = simplify(diff(parse("x^3", kXY), 0));
  CHECK(at(d, 2, 0) == 12.0);
  CHECK(diff(parse("y", kXY), 0).is_constant(0.0));
  CHECK(at(diff(parse("exp(-1/x^2)", kXY), 0), 1, 0) == doctest::Approx(2.0 * std::exp(-1.0)));
}

TEST_CASE("evaluation errors") {
  const std::array<double, 2> zero{0.0, 0.0};
  const std::array<double, 2> neg{-1.0, 0.0};
  try {
    eval(parse("1/x", kXY), zero);
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(e.kind() == EvalErrorKind::DivByZero);
    CHECK(e.at().size() == 2);
  }
  try {
    eval(parse("sqrt(x)", kXY), neg);
    FAIL("expected EvalError");
  } catch (const EvalError& e) {
    CHECK(e.kind() == EvalErrorKind::DomainError);
  }
  CHECK_THROWS_AS(eval(parse("ln(x)", kXY), zero), EvalError);
  CHECK_THROWS_AS(eval(parse("x^(-2)", kXY), zero), EvalError);
}

TEST_CASE("sgncase selects by strict sign") {
  const Expr e = parse("sgncase(x; -1, 0, 1)", kXY);
  CHECK(at(e, -0.5, 0) == -1.0);
  CHECK(at(e, 0.0, 0) == 0.0);
  CHECK(at(e, 1e-300, 0) == 1.0);
  // Only the selected branch is evaluated.
  CHECK(at(parse("sgncase(x; 1/x, 7, 1/x)", kXY), 0.0, 0) == 7.0);
}

TEST_CASE("extended evaluation survives double underflow") {
  const Expr e = parse("exp(-1/x^2)", kXY);
  const std::array<double, 2> p{0.035, 0.0};
  CHECK(eval(e, p) == 0.0);
  CHECK(eval_extended(e, p) > 0.0L);
}

TEST_CASE("required_dim") {
  CHECK(parse("3", kXY).required_dim() == 0);
  CHECK(parse("x", kXY).required_dim() == 1);
  CHECK(parse("x*y", kXY).required_dim() == 2);
}
