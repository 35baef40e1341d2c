#include <Eigen/QR>
#include <algorithm>
#include <random>

#include "doctest.h"
#include "gradcert/critical.hpp"
#include "gradcert/errors.hpp"

using namespace gradcert;

namespace {

const std::vector<std::string> kX{"x"};
const std::vector<std::string> kXY{"x", "y"};

ScalarField scalar(const char* src) { return ScalarField(2, parse(src, kXY)); }

VectorField field(std::initializer_list<const char*> comps) {
  std::vector<Expr> e;
  for (const char* c : comps) e.push_back(parse(c, kXY));
  return VectorField(2, e);
}

Matrix random_rotation(std::mt19937_64& rng, std::size_t m) {
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix a(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) a(i, j) = n(rng);
  Eigen::HouseholderQR<Matrix> qr(a);
  return qr.householderQ() * Matrix::Identity(m, m);
}

}  // namespace

TEST_CASE("find_zeros locates isolated zeros in canonical order") {
  const Chart chart = Chart::cube(2, -1, 1, 9);
  const ZeroSet zs = find_zeros(field({"x^2 - 0.25", "y"}), chart);
  CHECK_FALSE(zs.non_isolated);
  REQUIRE(zs.points.size() == 2);
  CHECK(zs.points[0](0) == doctest::Approx(-0.5));
  CHECK(zs.points[1](0) == doctest::Approx(0.5));
  CHECK(std::abs(zs.points[0](1)) < 1e-12);
}

TEST_CASE("find_zeros reaches degenerate zeros") {
  const Chart chart = Chart::cube(1, -1, 1, 33);
  const ZeroSet zs = find_zeros(VectorField(1, std::vector<Expr>{parse("x^4", kX)}), chart);
  REQUIRE(zs.points.size() == 1);
  CHECK(std::abs(zs.points[0](0)) < 1e-3);
}

TEST_CASE("find_zeros flags a curve of zeros") {
  const Chart chart = Chart::cube(2, -1, 1, 9);
  CHECK(find_zeros(field({"y", "0"}), chart).non_isolated);
}

TEST_CASE("Morse index is invariant under rotations") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  std::uniform_real_distribution<double> shift(-0.3, 0.3);
  std::bernoulli_distribution sign(0.5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t m = 3;
    const Matrix r = random_rotation(rng, m);
    Vector s(m);
    int negatives = 0;
    for (std::size_t i = 0; i < m; ++i) {
      s(i) = u(rng) * (sign(rng) ? -1.0 : 1.0);
      negatives += s(i) < 0;
    }
    Point c(m);
    for (std::size_t i = 0; i < m; ++i) c(i) = shift(rng);
    // phi = 1/2 sum_i s_i ((R (z - c))_i)^2
    Expr phi;
    for (std::size_t i = 0; i < m; ++i) {
      Expr row;
      for (std::size_t j = 0; j < m; ++j)
        row = row + Expr::constant(r(i, j)) * (Expr::variable(j) - Expr::constant(c(j)));
      phi = phi + Expr::constant(0.5 * s(i)) * pow(row, 2);
    }
    const CriticalPoint cp = classify(ScalarField(m, phi), c);
    CHECK(cp.kind == CriticalKind::Morse);
    CHECK(cp.index == negatives);
    std::vector<double> expected(s.data(), s.data() + m);
    std::sort(expected.begin(), expected.end());
    for (std::size_t i = 0; i < m; ++i) CHECK(cp.hessian_eigenvalues[i] == doctest::Approx(expected[i]).epsilon(1e-9));
  }
}

TEST_CASE("classification of embryonic and degenerate points") {
  const Point o = Point::Zero(2);
  const CriticalPoint e = classify(scalar("x^3/3 + y^2/2"), o);
  CHECK(e.kind == CriticalKind::Embryonic);
  REQUIRE(e.kernel_direction);
  CHECK(std::abs((*e.kernel_direction)(0)) == doctest::Approx(1.0));
  CHECK(std::abs(e.third_derivative) == doctest::Approx(2.0));
  CHECK(classify(scalar("x^4 + y^2"), o).kind == CriticalKind::Degenerate);
  CHECK(classify(scalar("x^3 + y^3"), o).kind == CriticalKind::Degenerate);
  const CriticalPoint saddle = classify(scalar("x^2 - y^2"), o);
  CHECK(saddle.kind == CriticalKind::Morse);
  CHECK(saddle.index == 1);
}

TEST_CASE("classify rejects regular points") {
  try {
    classify(scalar("x + y^2"), Point::Zero(2));
    FAIL("expected NotCritical");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::NotCritical);
  }
}

TEST_CASE("zero sets of grad phi and X are compared both ways") {
  const Chart chart = Chart::cube(2, -1, 1, 9);
  const ZeroSetMatch ok = zero_sets_match(scalar("(x^2 + y^2)/2"), field({"x - y/2", "y + x/2"}), chart);
  CHECK(ok.verdict.status == Status::Pass);
  const ZeroSetMatch bad = zero_sets_match(scalar("(x^2 + y^2)/2"), field({"x - 0.5", "y"}), chart);
  CHECK(bad.verdict.status == Status::Fail);
  CHECK(bad.unmatched_critical.size() == 1);
  CHECK(bad.unmatched_zeros.size() == 1);
  const ZeroSetMatch curve = zero_sets_match(scalar("y^2/2"), field({"0", "y"}), chart);
  CHECK(curve.verdict.status == Status::Inconclusive);
}
