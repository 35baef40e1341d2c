#include "gradcert/fields.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gradcert/errors.hpp"
#include "gradcert/parallel.hpp"

namespace gradcert {

// ---------------------------------------------------------------------------
// ExprMatrix

ExprMatrix::ExprMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols) {}

ExprMatrix::ExprMatrix(std::size_t rows, std::size_t cols, std::vector<Expr> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols)
    throw std::invalid_argument("ExprMatrix: entry count does not match shape");
}

ExprMatrix ExprMatrix::identity(std::size_t m) {
  ExprMatrix out(m, m);
  for (std::size_t i = 0; i < m; ++i) out(i, i) = Expr::constant(1.0);
  return out;
}

ExprMatrix ExprMatrix::constant(const Matrix& values) {
  ExprMatrix out(values.rows(), values.cols());
  for (Eigen::Index i = 0; i < values.rows(); ++i)
    for (Eigen::Index j = 0; j < values.cols(); ++j) out(i, j) = Expr::constant(values(i, j));
  return out;
}

bool ExprMatrix::is_constant() const {
  for (const auto& e : data_)
    if (!e.is_constant()) return false;
  return true;
}

Matrix ExprMatrix::evaluate(const Point& p) const {
  Matrix out(rows_, cols_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(i, j) = eval((*this)(i, j), as_span(p));
  return out;
}

ExprMatrix ExprMatrix::transpose() const {
  ExprMatrix out(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
  return out;
}

ExprMatrix ExprMatrix::simplified() const {
  ExprMatrix out(rows_, cols_);
  for (std::size_t k = 0; k < data_.size(); ++k) out.data_[k] = simplify(data_[k]);
  return out;
}

ExprMatrix operator*(const ExprMatrix& a, const ExprMatrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("ExprMatrix product: shape mismatch");
  ExprMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      Expr acc = Expr::constant(0.0);
      for (std::size_t k = 0; k < a.cols(); ++k) acc = acc + a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  return out;
}

std::vector<Expr> operator*(const ExprMatrix& a, const std::vector<Expr>& v) {
  if (a.cols() != v.size()) throw std::invalid_argument("ExprMatrix-vector product: shape mismatch");
  std::vector<Expr> out(a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    Expr acc = Expr::constant(0.0);
    for (std::size_t k = 0; k < a.cols(); ++k) acc = acc + a(i, k) * v[k];
    out[i] = acc;
  }
  return out;
}

namespace {

ExprMatrix minor_of(const ExprMatrix& a, std::size_t row, std::size_t col) {
  const std::size_t m = a.rows();
  ExprMatrix out(m - 1, m - 1);
  for (std::size_t i = 0, r = 0; i < m; ++i) {
    if (i == row) continue;
    for (std::size_t j = 0, c = 0; j < m; ++j) {
      if (j == col) continue;
      out(r, c++) = a(i, j);
    }
    ++r;
  }
  return out;
}

}  // namespace

Expr determinant(const ExprMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("determinant: matrix not square");
  const std::size_t m = a.rows();
  if (m == 0) return Expr::constant(1.0);
  if (m == 1) return a(0, 0);
  if (m == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  Expr acc = Expr::constant(0.0);
  for (std::size_t j = 0; j < m; ++j) {
    if (a(0, j).is_constant(0.0)) continue;
    const Expr term = a(0, j) * determinant(minor_of(a, 0, j));
    acc = (j % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

ExprMatrix adjugate(const ExprMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("adjugate: matrix not square");
  const std::size_t m = a.rows();
  ExprMatrix out(m, m);
  if (m == 1) {
    out(0, 0) = Expr::constant(1.0);
    return out;
  }
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      const Expr c = determinant(minor_of(a, i, j));
      out(j, i) = ((i + j) % 2 == 0) ? c : -c;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Chart and grids

Chart::Chart(std::size_t dim_, std::vector<double> lo_, std::vector<double> hi_, std::size_t n_,
             double r_excl_)
    : dim(dim_), lo(std::move(lo_)), hi(std::move(hi_)), n(n_), r_excl(r_excl_) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "chart dimension must be >= 1");
  if (lo.size() != dim || hi.size() != dim)
    throw Error(ErrorCode::InvalidArgument, "chart bounds must have one entry per coordinate");
  for (std::size_t i = 0; i < dim; ++i)
    if (!(lo[i] < hi[i]))
      throw Error(ErrorCode::InvalidArgument,
                  "chart bounds must satisfy lo < hi on axis " + std::to_string(i));
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "grid resolution must be >= 3");
  if (!(r_excl >= 0)) throw Error(ErrorCode::InvalidArgument, "exclusion radius must be >= 0");
}

Chart Chart::cube(std::size_t dim, double lo, double hi, std::size_t n) {
  return Chart(dim, std::vector<double>(dim, lo), std::vector<double>(dim, hi), n);
}

bool Chart::contains(const Point& p, double slack) const {
  for (std::size_t i = 0; i < dim; ++i)
    if (p(i) < lo[i] - slack || p(i) > hi[i] + slack) return false;
  return true;
}

double Chart::spacing(std::size_t i) const {
  return (hi[i] - lo[i]) / static_cast<double>(grid_resolution(*this) - 1);
}

std::size_t grid_resolution(const Chart& chart) {
  std::size_t n = chart.n;
  auto total = [&](std::size_t k) {
    double t = 1;
    for (std::size_t i = 0; i < chart.dim; ++i) t *= static_cast<double>(k);
    return t;
  };
  while (n > 3 && total(n) > static_cast<double>(kMaxGridSamples)) --n;
  return n;
}

bool grid_is_reduced(const Chart& chart) { return grid_resolution(chart) != chart.n; }

std::vector<Point> grid_points(const Chart& chart) {
  const std::size_t n = grid_resolution(chart);
  const std::size_t m = chart.dim;
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= n;
  std::vector<Point> out;
  out.reserve(total);
  std::vector<std::size_t> idx(m, 0);
  for (std::size_t count = 0; count < total; ++count) {
    Point p(m);
    for (std::size_t i = 0; i < m; ++i)
      p(i) = chart.lo[i] +
             static_cast<double>(idx[i]) * (chart.hi[i] - chart.lo[i]) / static_cast<double>(n - 1);
    out.push_back(std::move(p));
    for (std::size_t i = m; i-- > 0;) {
      if (++idx[i] < n) break;
      idx[i] = 0;
    }
  }
  return out;
}

std::vector<Point> grid_points_excluding(const Chart& chart, std::span<const Point> centers) {
  std::vector<Point> out;
  for (auto& p : grid_points(chart)) {
    bool keep = true;
    for (const auto& c : centers)
      if ((p - c).norm() < chart.r_excl) {
        keep = false;
        break;
      }
    if (keep) out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Field types

namespace {

void check_dims(std::size_t dim, const Expr& e) {
  if (e.required_dim() > dim)
    throw Error(ErrorCode::InvalidArgument,
                "expression uses variable index " + std::to_string(e.required_dim() - 1) +
                    " on a chart of dimension " + std::to_string(dim));
}

}  // namespace

ScalarField::ScalarField(std::size_t dim, Expr expr) : dim_(dim), expr_(std::move(expr)) {
  check_dims(dim_, expr_);
}

double ScalarField::operator()(const Point& p) const { return eval(expr_, as_span(p)); }

namespace detail {

VectorValued::VectorValued(std::size_t dim, std::vector<Expr> components)
    : dim_(dim), components_(std::move(components)) {
  if (components_->size() != dim)
    throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(dim) +
                                                " components, got " +
                                                std::to_string(components_->size()));
  for (const auto& e : *components_) check_dims(dim, e);
}

VectorValued::VectorValued(std::size_t dim, Evaluator evaluator)
    : dim_(dim), evaluator_(std::move(evaluator)) {}

const std::vector<Expr>& VectorValued::components() const {
  if (!components_) throw std::logic_error("field has no symbolic form");
  return *components_;
}

Vector VectorValued::operator()(const Point& p) const {
  if (!components_) return evaluator_(p);
  Vector out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out(i) = eval((*components_)[i], as_span(p));
  return out;
}

MatrixValued::MatrixValued(std::size_t dim, ExprMatrix entries)
    : dim_(dim), entries_(std::move(entries)) {
  if (entries_->rows() != dim || entries_->cols() != dim)
    throw Error(ErrorCode::InvalidArgument,
                "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) check_dims(dim, (*entries_)(i, j));
}

MatrixValued::MatrixValued(std::size_t dim, Evaluator evaluator)
    : dim_(dim), evaluator_(std::move(evaluator)) {}

const ExprMatrix& MatrixValued::entries() const {
  if (!entries_) throw std::logic_error("field has no symbolic form");
  return *entries_;
}

Matrix MatrixValued::operator()(const Point& p) const {
  if (!entries_) return evaluator_(p);
  return entries_->evaluate(p);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Exterior calculus

namespace {

constexpr double kFdStep = 1e-4;

// 6th-order central difference weights for offsets 1, 2, 3 (antisymmetric).
constexpr double kW1 = 45.0 / 60.0;
constexpr double kW2 = -9.0 / 60.0;
constexpr double kW3 = 1.0 / 60.0;

template <typename F>
auto fd_partial(const F& f, const Point& p, std::size_t k, double h) {
  auto shifted = [&](double s) {
    Point q = p;
    q(k) += s * h;
    return f(q);
  };
  using R = decltype(f(p));
  const R d1 = shifted(1) - shifted(-1);
  const R d2 = shifted(2) - shifted(-2);
  const R d3 = shifted(3) - shifted(-3);
  return R((d1 * kW1 + d2 * kW2 + d3 * kW3) / h);
}

double max_over_grid(const Chart& chart, const std::function<double(const Point&)>& f) {
  const auto pts = grid_points(chart);
  const auto vals = parallel_map<double>(pts.size(), [&](std::size_t i) { return f(pts[i]); });
  double best = 0.0;
  for (double v : vals) best = std::max(best, v);
  return best;
}

}  // namespace

Matrix fd_jacobian(const std::function<Vector(const Point&)>& f, const Point& p, double h) {
  const auto m = p.size();
  Matrix jac(f(p).size(), m);
  for (Eigen::Index k = 0; k < m; ++k)
    jac.col(k) = fd_partial(f, p, static_cast<std::size_t>(k), h);
  return jac;
}

OneForm differential(const ScalarField& phi) {
  std::vector<Expr> comps;
  comps.reserve(phi.dim());
  for (std::size_t j = 0; j < phi.dim(); ++j) comps.push_back(diff(phi.expr(), j));
  return OneForm(phi.dim(), std::move(comps));
}

VectorField gradient(const ScalarField& phi) {
  return VectorField(phi.dim(), differential(phi).components());
}

TwoForm exterior_derivative_1(const OneForm& lambda) {
  const std::size_t m = lambda.dim();
  if (lambda.is_symbolic()) {
    const auto& l = lambda.components();
    ExprMatrix omega(m, m);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        omega(i, j) = i == j ? Expr::constant(0.0) : diff(l[i], j) - diff(l[j], i);
    return TwoForm(m, std::move(omega));
  }
  return TwoForm(m, [lambda](const Point& p) -> Matrix {
    const Matrix jac = fd_jacobian([&](const Point& q) { return lambda(q); }, p, kFdStep);
    return jac - jac.transpose();
  });
}

std::vector<ThreeFormComponent> exterior_derivative_2(const TwoForm& omega) {
  const std::size_t m = omega.dim();
  const auto& o = omega.entries();
  // w(e_a, e_b) = Omega_ba
  auto w = [&](std::size_t a, std::size_t b) -> const Expr& { return o(b, a); };
  std::vector<ThreeFormComponent> out;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      for (std::size_t k = j + 1; k < m; ++k)
        out.push_back({i, j, k, diff(w(j, k), i) + diff(w(k, i), j) + diff(w(i, j), k)});
  return out;
}

double closedness_residual(const TwoForm& omega, const Chart& chart) {
  const std::size_t m = omega.dim();
  if (m < 3) return 0.0;
  if (omega.is_symbolic()) {
    const auto comps = exterior_derivative_2(omega);
    return max_over_grid(chart, [&](const Point& p) {
      double r = 0.0;
      for (const auto& c : comps) r = std::max(r, std::abs(eval(c.value, as_span(p))));
      return r;
    });
  }
  return max_over_grid(chart, [&](const Point& p) {
    std::vector<Matrix> partials(m);
    for (std::size_t k = 0; k < m; ++k)
      partials[k] = fd_partial([&](const Point& q) -> Matrix { return omega(q); }, p, k, kFdStep);
    double r = 0.0;
    // d_i w_jk + d_j w_ki + d_k w_ij with w_ab = Omega_ba
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k)
          r = std::max(r, std::abs(partials[i](k, j) + partials[j](i, k) + partials[k](j, i)));
    return r;
  });
}

OneForm interior_product(const VectorField& x, const TwoForm& omega) {
  if (x.dim() != omega.dim()) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  const std::size_t m = x.dim();
  if (x.is_symbolic() && omega.is_symbolic()) return OneForm(m, omega.entries() * x.components());
  return OneForm(m, [x, omega](const Point& p) -> Vector { return omega(p) * x(p); });
}

double lie_derivative_residual(const VectorField& x, const TwoForm& omega, const Chart& chart,
                               double closed_tol) {
  const double closed = closedness_residual(omega, chart);
  if (!(closed < closed_tol))
    throw Error(ErrorCode::NotClosed,
                "d omega residual " + std::to_string(closed) + " exceeds tolerance");
  const TwoForm d_lambda = exterior_derivative_1(interior_product(x, omega));
  return max_over_grid(chart, [&](const Point& p) {
    return (d_lambda(p) - omega(p)).cwiseAbs().maxCoeff();
  });
}

double nondegeneracy_margin(const TwoForm& omega, const Chart& chart) {
  if (omega.dim() % 2 != 0)
    throw Error(ErrorCode::OddDimension, "a 2-form on an odd-dimensional chart is degenerate");
  const auto pts = grid_points(chart);
  const auto dets = parallel_map<double>(
      pts.size(), [&](std::size_t i) { return std::abs(omega(pts[i]).determinant()); });
  double best = std::numeric_limits<double>::infinity();
  for (double d : dets) best = std::min(best, d);
  return best;
}

}  // namespace gradcert
