#include "gradcert/fixtures.hpp"

#include "gradcert/errors.hpp"

namespace gradcert::fixtures {

namespace {

Expr v(std::size_t i) { return Expr::variable(i); }
Expr c(double x) { return Expr::constant(x); }

}  // namespace

Pair cubic_quartic() {
  return {"cubic-quartic", {"x"}, Chart::cube(1, -1.0, 1.0), ScalarField(1, pow(v(0), 3)),
          VectorField(1, std::vector<Expr>{pow(v(0), 4)}), std::nullopt};
}

Pair bump() {
  const Expr e = exp(-(c(1.0) / pow(v(0), 2)));
  const Expr phi = sgncase(v(0), e, c(0.0), e);
  const Expr x = sgncase(v(0), c(2.0) * pow(v(0), -3) * e, c(0.0), pow(v(0), -3) * e);
  return {"bump", {"x"}, Chart::cube(1, -1.0, 1.0), ScalarField(1, phi), VectorField(1, std::vector<Expr>{x}),
          std::nullopt};
}

Pair eliashberg() {
  const Expr phi = c(0.25) * (pow(v(0), 4) + pow(v(1), 4));
  std::vector<Expr> x{pow(v(0), 3) + pow(v(0), 2) * pow(v(1), 2), pow(v(1), 3)};
  return {"eliashberg", {"x", "y"}, Chart::cube(2, -1.0, 1.0), ScalarField(2, phi), VectorField(2, std::move(x)),
          std::nullopt};
}

Pair rotated_gradient() {
  const Expr phi = c(0.5) * (pow(v(0), 2) + pow(v(1), 2));
  std::vector<Expr> x{v(0) - c(0.5) * v(1), v(1) + c(0.5) * v(0)};
  return {"rotated-gradient", {"x", "y"}, Chart::cube(2, -1.0, 1.0), ScalarField(2, phi),
          VectorField(2, std::move(x)), std::nullopt};
}

Weinstein radial_plane() {
  ExprMatrix omega(2, 2);
  omega(0, 1) = c(-1.0);
  omega(1, 0) = c(1.0);
  WeinsteinStructure w{TwoForm(2, omega),
                       VectorField(2, std::vector<Expr>{c(0.5) * v(0), c(0.5) * v(1)}),
                       ScalarField(2, c(0.25) * (pow(v(0), 2) + pow(v(1), 2))),
                       TensorField(2, ExprMatrix::identity(2))};
  return {"radial", {"x", "y"}, Chart::cube(2, -1.0, 1.0), std::move(w)};
}

Weinstein cotangent(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "cotangent fixture needs n >= 1");
  const std::size_t m = 2 * n;
  std::vector<std::string> vars;
  for (std::size_t i = 1; i <= n; ++i) vars.push_back("q" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) vars.push_back("p" + std::to_string(i));

  std::vector<Expr> lambda(m, c(0.0)), x(m, c(0.0));
  Expr phi = c(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    lambda[i] = v(n + i);
    x[n + i] = v(n + i);
    phi = phi + c(0.5) * pow(v(n + i), 2);
  }
  const TwoForm omega = exterior_derivative_1(OneForm(m, lambda));
  WeinsteinStructure w{TwoForm(m, omega.entries().simplified()), VectorField(m, std::move(x)),
                       ScalarField(m, phi), TensorField(m, ExprMatrix::identity(m))};
  const std::size_t grid_n = m <= 2 ? 33 : 17;
  return {"cotangent", std::move(vars), Chart::cube(m, -1.0, 1.0, grid_n), std::move(w)};
}

EmbryonicNormalForm embryonic_shear() {
  EmbryonicNormalForm nf;
  nf.b = Matrix::Identity(1, 1);
  nf.c = 1.0;
  nf.a = ExprMatrix::identity(1);
  nf.a1 = c(1.0);
  nf.a2 = {v(1)};
  return nf;
}

std::vector<std::string> names() {
  return {"cubic-quartic", "bump", "eliashberg", "rotated-gradient", "radial", "cotangent", "embryonic"};
}

}  // namespace gradcert::fixtures

namespace gradcert {

WeinsteinStructure cotangent_fixture(std::size_t n) { return fixtures::cotangent(n).structure; }

}  // namespace gradcert
