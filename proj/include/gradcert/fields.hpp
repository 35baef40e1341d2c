#pragma once

// Geometric objects on a coordinate box in R^m and the exterior calculus
// needed for symplectic and Liouville checks.
//
// Matrix conventions (fixed throughout the library):
//   tensor  g(v, w) = <M v, w>
//   2-form  w(u, v) = <Omega u, v>,  Omega^T = -Omega
// so  dphi = g(X, .)  is the column identity  M X = grad phi,  and the
// interior product i_X w has coefficient vector Omega X.

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "gradcert/expr.hpp"

namespace gradcert {

using Point = Eigen::VectorXd;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline std::span<const double> as_span(const Point& p) {
  return {p.data(), static_cast<std::size_t>(p.size())};
}

/// Row-major matrix of expressions.
class ExprMatrix {
 public:
  ExprMatrix() = default;
  ExprMatrix(std::size_t rows, std::size_t cols);
  ExprMatrix(std::size_t rows, std::size_t cols, std::vector<Expr> entries);

  static ExprMatrix identity(std::size_t m);
  static ExprMatrix constant(const Matrix& values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const Expr& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  Expr& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

  bool is_constant() const;
  Matrix evaluate(const Point& p) const;
  ExprMatrix transpose() const;
  ExprMatrix simplified() const;

  friend ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b);
  friend std::vector<Expr> operator*(const ExprMatrix& a, const std::vector<Expr>& v);

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Expr> data_;
};

/// Determinant and adjugate by cofactor expansion (intended for m <= 4).
Expr determinant(const ExprMatrix& a);
ExprMatrix adjugate(const ExprMatrix& a);

struct Chart {
  std::size_t dim = 1;
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t n = 33;     // lattice points per axis
  double r_excl = 1e-3;  // exclusion radius around marked points

  Chart() = default;
  Chart(std::size_t dim, std::vector<double> lo, std::vector<double> hi, std::size_t n = 33,
        double r_excl = 1e-3);
  static Chart cube(std::size_t dim, double lo, double hi, std::size_t n = 33);

  bool contains(const Point& p, double slack = 0.0) const;
  /// Lattice spacing along axis i at the effective resolution.
  double spacing(std::size_t i) const;
};

inline constexpr std::size_t kMaxGridSamples = 200000;

/// Resolution actually used: n, reduced until n^m <= kMaxGridSamples.
std::size_t grid_resolution(const Chart& chart);
bool grid_is_reduced(const Chart& chart);

/// Uniform lattice including the boundary, lexicographic order with the
/// first coordinate varying slowest.
std::vector<Point> grid_points(const Chart& chart);
/// grid_points minus the open balls of radius chart.r_excl around centers.
std::vector<Point> grid_points_excluding(const Chart& chart, std::span<const Point> centers);

class ScalarField {
 public:
  ScalarField() = default;
  ScalarField(std::size_t dim, Expr expr);

  std::size_t dim() const { return dim_; }
  const Expr& expr() const { return expr_; }
  double operator()(const Point& p) const;

 private:
  std::size_t dim_ = 1;
  Expr expr_;
};

namespace detail {

/// m-vector of functions, symbolic (with Expr components) or numeric only.
class VectorValued {
 public:
  using Evaluator = std::function<Vector(const Point&)>;

  VectorValued() = default;
  VectorValued(std::size_t dim, std::vector<Expr> components);
  VectorValued(std::size_t dim, Evaluator evaluator);

  std::size_t dim() const { return dim_; }
  bool is_symbolic() const { return components_.has_value(); }
  /// Throws std::logic_error for numeric-only fields.
  const std::vector<Expr>& components() const;
  Vector operator()(const Point& p) const;

 private:
  std::size_t dim_ = 0;
  std::optional<std::vector<Expr>> components_;
  Evaluator evaluator_;
};

/// m x m matrix of functions, symbolic or numeric only.
class MatrixValued {
 public:
  using Evaluator = std::function<Matrix(const Point&)>;

  MatrixValued() = default;
  MatrixValued(std::size_t dim, ExprMatrix entries);
  MatrixValued(std::size_t dim, Evaluator evaluator);

  std::size_t dim() const { return dim_; }
  bool is_symbolic() const { return entries_.has_value(); }
  const ExprMatrix& entries() const;
  Matrix operator()(const Point& p) const;

 private:
  std::size_t dim_ = 0;
  std::optional<ExprMatrix> entries_;
  Evaluator evaluator_;
};

}  // namespace detail

class VectorField : public detail::VectorValued {
 public:
  using VectorValued::VectorValued;
};

/// Coefficients of dx_1 .. dx_m.
class OneForm : public detail::VectorValued {
 public:
  using VectorValued::VectorValued;
};

class TwoForm : public detail::MatrixValued {
 public:
  using MatrixValued::MatrixValued;
};

class TensorField : public detail::MatrixValued {
 public:
  using MatrixValued::MatrixValued;
};

OneForm differential(const ScalarField& phi);
/// Euclidean gradient: the components of differential(phi) as a vector field.
VectorField gradient(const ScalarField& phi);

/// Omega_ij = d_j lambda_i - d_i lambda_j. Symbolic input gives a symbolic
/// result; numeric input uses 6th-order central differences (h = 1e-4).
TwoForm exterior_derivative_1(const OneForm& lambda);

struct ThreeFormComponent {
  std::size_t i, j, k;
  Expr value;  // (d omega)(e_i, e_j, e_k)
};

/// All components i < j < k of d omega (empty for m < 3). Symbolic only.
std::vector<ThreeFormComponent> exterior_derivative_2(const TwoForm& omega);

/// max over the grid and over i < j < k of |(d omega)_ijk|.
double closedness_residual(const TwoForm& omega, const Chart& chart);

/// Coefficient vector Omega X.
OneForm interior_product(const VectorField& x, const TwoForm& omega);

/// max over the grid of |d(i_X omega) - omega| entrywise. Throws NotClosed
/// when the closedness residual of omega reaches closed_tol.
double lie_derivative_residual(const VectorField& x, const TwoForm& omega, const Chart& chart,
                               double closed_tol = 1e-10);

/// min over the grid of |det Omega|. Throws OddDimension for odd m.
double nondegeneracy_margin(const TwoForm& omega, const Chart& chart);

/// First derivatives of a numeric vector function by 6th-order central
/// differences: J(a, b) = d_b f_a.
Matrix fd_jacobian(const std::function<Vector(const Point&)>& f, const Point& p,
                   double h = 1e-4);

}  // namespace gradcert
