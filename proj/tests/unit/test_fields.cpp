#include <cmath>
#include <random>

#include "doctest.h"
#include "gradcert/errors.hpp"
#include "gradcert/fields.hpp"

using namespace gradcert;

namespace {

Expr random_term(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> power(0, 3);
  std::uniform_int_distribution<std::size_t> var(0, m - 1);
  std::uniform_int_distribution<int> kind(0, 3);
  Expr t = Expr::constant(coef(rng));
  for (std::size_t i = 0; i < m; ++i) t = t * pow(Expr::variable(i), power(rng));
  switch (kind(rng)) {
    case 0: return t * sin(Expr::variable(var(rng)));
    case 1: return t * exp(Expr::constant(0.5) * Expr::variable(var(rng)));
    default: return t;
  }
}

Expr random_function(std::mt19937_64& rng, std::size_t m) {
  Expr f = random_term(rng, m);
  for (int k = 0; k < 3; ++k) f = f + random_term(rng, m);
  return f;
}

Point random_point(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Point p(m);
  for (std::size_t i = 0; i < m; ++i) p(i) = u(rng);
  return p;
}

}  // namespace

TEST_CASE("d of x dy is dx^dy with the column convention") {
  const OneForm lambda(2, std::vector<Expr>{Expr::constant(0.0), Expr::variable(0)});
  const Matrix omega = exterior_derivative_1(lambda)(Point::Zero(2));
  Matrix expected(2, 2);
  expected << 0, -1, 1, 0;
  CHECK((omega - expected).norm() == 0.0);
  // omega(e_x, e_y) = <Omega e_x, e_y> = 1
  CHECK(omega(1, 0) == 1.0);
}

TEST_CASE("d o d vanishes on random one-forms") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = trial % 2 == 0 ? 3 : 4;
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < m; ++i) comps.push_back(random_function(rng, m));
    const TwoForm omega = exterior_derivative_1(OneForm(m, comps));
    const auto dd = exterior_derivative_2(omega);
    CHECK(dd.size() == m * (m - 1) * (m - 2) / 6);
    for (int k = 0; k < 5; ++k) {
      const Point p = random_point(rng, m);
      for (const auto& c : dd) CHECK(std::abs(eval(c.value, as_span(p))) < 1e-12);
    }
  }
}

TEST_CASE("numeric exterior derivative matches the symbolic one") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < 3; ++i) comps.push_back(random_function(rng, 3));
    const OneForm sym(3, comps);
    const OneForm num(3, [sym](const Point& p) { return sym(p); });
    const TwoForm a = exterior_derivative_1(sym);
    const TwoForm b = exterior_derivative_1(num);
    CHECK_FALSE(b.is_symbolic());
    for (int k = 0; k < 5; ++k) {
      const Point p = random_point(rng, 3);
      CHECK((a(p) - b(p)).cwiseAbs().maxCoeff() < 1e-8);
    }
  }
}

TEST_CASE("interior product is linear in X and equals Omega X") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Expr> l, x1, x2;
    for (std::size_t i = 0; i < 4; ++i) {
      l.push_back(random_function(rng, 4));
      x1.push_back(random_function(rng, 4));
      x2.push_back(random_function(rng, 4));
    }
    const TwoForm omega = exterior_derivative_1(OneForm(4, l));
    const double a = u(rng), b = u(rng);
    std::vector<Expr> mix;
    for (std::size_t i = 0; i < 4; ++i) mix.push_back(Expr::constant(a) * x1[i] + Expr::constant(b) * x2[i]);
    const OneForm i1 = interior_product(VectorField(4, x1), omega);
    const OneForm i2 = interior_product(VectorField(4, x2), omega);
    const OneForm im = interior_product(VectorField(4, mix), omega);
    for (int k = 0; k < 5; ++k) {
      const Point p = random_point(rng, 4);
      const Vector lin = a * i1(p) + b * i2(p);
      CHECK((im(p) - lin).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, lin.cwiseAbs().maxCoeff()));
      CHECK((i1(p) - omega(p) * VectorField(4, x1)(p)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("closedness, nondegeneracy and the Liouville identity on the radial plane") {
  const Chart chart = Chart::cube(2, -1, 1, 9);
  Matrix o(2, 2);
  o << 0, -1, 1, 0;
  const TwoForm omega(2, ExprMatrix::constant(o));
  const Expr half = Expr::constant(0.5);
  const VectorField x(2, std::vector<Expr>{half * Expr::variable(0), half * Expr::variable(1)});
  CHECK(closedness_residual(omega, chart) == 0.0);
  CHECK(nondegeneracy_margin(omega, chart) == 1.0);
  CHECK(lie_derivative_residual(x, omega, chart) < 1e-14);
  const VectorField slow(2, std::vector<Expr>{Expr::constant(0.25) * Expr::variable(0),
                                              Expr::constant(0.25) * Expr::variable(1)});
  CHECK(lie_derivative_residual(slow, omega, chart) == doctest::Approx(0.5));
}

TEST_CASE("non-closed forms and odd dimensions are rejected") {
  // Omega = [[0, -z], [z, 0]] padded to 3D is not closed: d(z dx^dy) = dz^dx^dy.
  ExprMatrix e(3, 3);
  e(0, 1) = -Expr::variable(2);
  e(1, 0) = Expr::variable(2);
  const TwoForm omega(3, e);
  const Chart chart = Chart::cube(3, -1, 1, 5);
  CHECK(closedness_residual(omega, chart) == doctest::Approx(1.0));
  CHECK_THROWS_AS(nondegeneracy_margin(omega, chart), Error);
  const VectorField zero(3, std::vector<Expr>(3, Expr::constant(0.0)));
  try {
    lie_derivative_residual(zero, omega, chart);
    FAIL("expected NotClosed");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NotClosed);
  }
}

TEST_CASE("grid lattice order and size") {
  const Chart chart(2, {0.0, -1.0}, {1.0, 1.0}, 3);
  const auto pts = grid_points(chart);
  REQUIRE(pts.size() == 9);
  CHECK(pts[0](0) == 0.0);
  CHECK(pts[0](1) == -1.0);
  CHECK(pts[1](0) == 0.0);
  CHECK(pts[1](1) == 0.0);
  CHECK(pts[8](0) == 1.0);
  CHECK(pts[8](1) == 1.0);
  const Chart big = Chart::cube(4, -1, 1, 33);
  CHECK(grid_is_reduced(big));
  const std::size_t n = grid_resolution(big);
  CHECK(n * n * n * n <= kMaxGridSamples);
  CHECK(grid_points(big).size() == n * n * n * n);
}

TEST_CASE("determinant and adjugate") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t m = 1; m <= 4; ++m) {
    Matrix a(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) a(i, j) = u(rng);
    const ExprMatrix e = ExprMatrix::constant(a);
    const Point p = Point::Zero(1);
    CHECK(eval(determinant(e), as_span(p)) == doctest::Approx(a.determinant()).epsilon(1e-12));
    const Matrix adj = adjugate(e).evaluate(p);
    CHECK((a * adj - a.determinant() * Matrix::Identity(m, m)).cwiseAbs().maxCoeff() < 1e-12);
  }
}
