#include "gradcert/weinstein.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gradcert/linalg.hpp"
#include "gradcert/parallel.hpp"

namespace gradcert {

namespace {

std::vector<double> to_vec(const Point& p) { return {p.data(), p.data() + p.size()}; }

std::vector<Expr> gradient_exprs(const ScalarField& phi) {
  std::vector<Expr> g;
  for (std::size_t i = 0; i < phi.dim(); ++i) g.push_back(diff(phi.expr(), i));
  return g;
}

Vector eval_vec(const std::vector<Expr>& es, const Point& p) {
  Vector v(es.size());
  for (std::size_t i = 0; i < es.size(); ++i) v(i) = eval(es[i], as_span(p));
  return v;
}

bool symbolic_pair(const TwoForm& omega, const TensorField& g) {
  return omega.is_symbolic() && g.is_symbolic() && omega.dim() <= 4;
}

}  // namespace

Status WeinsteinReport::status() const {
  Status s = Status::Pass;
  for (const Verdict* v : {&closed, &nondegenerate, &liouville, &condition3}) s = worst(s, v->status);
  return s;
}

WeinsteinReport check_weinstein(const WeinsteinStructure& w, const Chart& chart, const CheckOptions& opts) {
  const std::size_t m = w.dim();
  if (m % 2 != 0) throw Error(ErrorCode::OddDimension, "Weinstein structures need even dimension");
  if (w.omega.dim() != m || w.x.dim() != m || chart.dim != m)
    throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  WeinsteinReport rep;
  const Point origin = Point::Zero(m);

  rep.closedness_residual = closedness_residual(w.omega, chart);
  rep.closed = Verdict::below(rep.closedness_residual, 1e-10, origin, "d omega residual");
  rep.closed.values.emplace_back("closedness_residual", rep.closedness_residual);

  rep.nondegeneracy_margin = nondegeneracy_margin(w.omega, chart);
  if (rep.nondegeneracy_margin > 0.0) {
    rep.nondegenerate = Verdict::pass(rep.nondegeneracy_margin);
  } else {
    const auto pts = grid_points(chart);
    Point at = origin;
    for (const auto& p : pts)
      if (std::abs(w.omega(p).determinant()) == rep.nondegeneracy_margin) {
        at = p;
        break;
      }
    rep.nondegenerate = Verdict::fail(Witness{at, {{"det", rep.nondegeneracy_margin}}}, {"omega is degenerate"});
  }
  rep.nondegenerate.values.emplace_back("min_abs_det", rep.nondegeneracy_margin);

  try {
    rep.liouville_residual = lie_derivative_residual(w.x, w.omega, chart, 1e-10);
    rep.liouville = Verdict::below(*rep.liouville_residual, kDeformTol, origin, "L_X omega - omega");
    rep.liouville.values.emplace_back("liouville_residual", *rep.liouville_residual);
  } catch (const Error& e) {
    rep.liouville = Verdict::inconclusive({e.what()});
  }
  if (rep.liouville.status == Status::Fail) {
    // Witness: the grid point with the largest Liouville defect.
    const TwoForm dl = exterior_derivative_1(w.lambda());
    double best = -1.0;
    for (const auto& p : grid_points(chart)) {
      const double r = (dl(p) - w.omega(p)).cwiseAbs().maxCoeff();
      if (r > best) {
        best = r;
        rep.liouville.witness->point = p;
      }
    }
  }

  if (w.g) {
    rep.certificate = check_certificate(w.phi, w.x, *w.g, chart, std::nullopt, opts);
    rep.condition3 = rep.certificate->verdict;
  } else {
    try {
      rep.certify = certify(w.phi, w.x, chart, {}, opts);
      if (rep.certify->certificate && rep.certify->status != Status::Inconclusive)
        rep.condition3 = rep.certify->certificate->verdict;
      else
        rep.condition3 = Verdict::inconclusive(rep.certify->notes);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Condition1Fails) throw;
      Point wp(static_cast<Eigen::Index>(e.witness().size()));
      for (std::size_t i = 0; i < e.witness().size(); ++i) wp(i) = e.witness()[i];
      rep.condition3 = Verdict::fail(Witness{wp, {}}, {e.what()});
    }
  }
  rep.notes.push_back("exhaustion of phi is not checked on a compact chart");
  return rep;
}

ConnectionOperator::ConnectionOperator(TwoForm omega, TensorField g, std::optional<ExprMatrix> symbolic)
    : omega_(std::move(omega)), g_(std::move(g)), symbolic_(std::move(symbolic)) {}

const ExprMatrix& ConnectionOperator::entries() const {
  if (!symbolic_) throw std::logic_error("connection operator has no symbolic form");
  return *symbolic_;
}

Matrix ConnectionOperator::operator()(const Point& p) const {
  if (symbolic_) return symbolic_->evaluate(p);
  return -omega_(p).partialPivLu().solve(g_(p).transpose());
}

Matrix ConnectionOperator::inverse(const Point& p) const {
  return -g_(p).transpose().partialPivLu().solve(omega_(p));
}

ConnectionOperator connection_operator(const TwoForm& omega, const TensorField& g, const Chart& chart) {
  const std::size_t m = omega.dim();
  if (g.dim() != m) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  if (m % 2 != 0) throw Error(ErrorCode::Degenerate, "omega is degenerate in odd dimension");
  for (const auto& p : grid_points(chart)) {
    if (!(std::abs(omega(p).determinant()) > 0.0))
      throw Error(ErrorCode::Degenerate, "omega is degenerate", to_vec(p));
    if (!(linalg::min_sym_eigenvalue(g(p)) > 0.0))
      throw Error(ErrorCode::Degenerate, "g is not positive", to_vec(p));
  }
  std::optional<ExprMatrix> sym;
  if (symbolic_pair(omega, g)) {
    const ExprMatrix& o = omega.entries();
    const ExprMatrix adj = adjugate(o);
    const Expr det = simplify(determinant(o));
    ExprMatrix a = adj * g.entries().transpose();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) a(i, j) = simplify(-(a(i, j) / det));
    sym = std::move(a);
  }
  return ConnectionOperator(omega, g, std::move(sym));
}

DeformationError::DeformationError(const std::string& what, DeformationDiagnostics diagnostics)
    : Error(ErrorCode::NotCloseEnough, what,
            diagnostics.witness ? to_vec(*diagnostics.witness) : std::vector<double>{}),
      diagnostics_(std::move(diagnostics)) {}

namespace {

struct DeformSample {
  bool ok = false;
  double interior = 0.0;
  double gradient = 0.0;
  double margin = 0.0;
  double det = 0.0;
};

}  // namespace

DeformationResult deform(const WeinsteinStructure& w, const TensorField& g, const ScalarField& phi_tilde,
                         const Chart& chart) {
  const std::size_t m = w.dim();
  if (g.dim() != m || phi_tilde.dim() != m || chart.dim != m)
    throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  const ConnectionOperator a = connection_operator(w.omega, g, chart);
  const TwoForm& omega = w.omega;
  DeformationDiagnostics diag;

  // lambda = i_X omega must equal dphi o A^{-1} = Omega M^{-1} grad phi.
  const OneForm lambda = w.lambda();
  const auto grad_phi = gradient_exprs(w.phi);
  const auto pts = grid_points(chart);
  {
    const auto res = parallel_map<double>(pts.size(), [&](std::size_t i) {
      const Point& p = pts[i];
      const Vector expected = a.inverse(p).transpose() * eval_vec(grad_phi, p);
      return (lambda(p) - expected).cwiseAbs().maxCoeff();
    });
    for (double r : res) diag.lambda_consistency = std::max(diag.lambda_consistency, r);
  }
  if (!(diag.lambda_consistency < kDeformTol))
    throw Error(ErrorCode::InvalidArgument,
                "input is not consistent: i_X omega differs from dphi o A^{-1} by " +
                    std::to_string(diag.lambda_consistency));

  // lambda~ = A^{-T} grad phi~ = Omega M^{-1} grad phi~.
  const auto grad_tilde = gradient_exprs(phi_tilde);
  OneForm lambda_t;
  if (symbolic_pair(omega, g)) {
    const ExprMatrix& mm = g.entries();
    const Expr det = simplify(determinant(mm));
    const std::vector<Expr> v = omega.entries() * (adjugate(mm) * grad_tilde);
    std::vector<Expr> comps(m);
    for (std::size_t i = 0; i < m; ++i) comps[i] = simplify(v[i] / det);
    lambda_t = OneForm(m, std::move(comps));
  } else {
    lambda_t = OneForm(m, [omega, g, grad_tilde](const Point& p) -> Vector {
      return omega(p) * g(p).partialPivLu().solve(eval_vec(grad_tilde, p));
    });
  }
  TwoForm omega_t = exterior_derivative_1(lambda_t);
  if (omega_t.is_symbolic()) omega_t = TwoForm(m, omega_t.entries().simplified());

  const VectorField x_t(m, [omega_t, lambda_t](const Point& p) -> Vector {
    Eigen::PartialPivLU<Matrix> lu(omega_t(p));
    const Vector x = lu.solve(lambda_t(p));
    if (lu.determinant() == 0.0 || !x.allFinite())
      throw Error(ErrorCode::NotCloseEnough, "deformed form is degenerate", to_vec(p));
    return x;
  });
  const TensorField g_t(m, [a, omega_t](const Point& p) -> Matrix { return a(p).transpose() * omega_t(p); });

  const auto samples = parallel_map<DeformSample>(pts.size(), [&](std::size_t i) {
    const Point& p = pts[i];
    DeformSample s;
    try {
      const Matrix o = omega_t(p);
      s.det = std::abs(o.determinant());
      if (!(s.det > 0.0)) return s;
      const Vector xv = x_t(p);
      s.interior = (o * xv - lambda_t(p)).cwiseAbs().maxCoeff();
      const Matrix mt = g_t(p);
      s.gradient = (mt * xv - eval_vec(grad_tilde, p)).cwiseAbs().maxCoeff();
      s.margin = linalg::min_sym_eigenvalue(mt);
      s.ok = true;
    } catch (const std::exception&) {
    }
    return s;
  });
  diag.nondegeneracy = std::numeric_limits<double>::infinity();
  diag.g_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& s = samples[i];
    if (s.det < diag.nondegeneracy) {
      diag.nondegeneracy = s.det;
      if (!s.ok) diag.witness = pts[i];
    }
    if (!s.ok) continue;
    diag.interior = std::max(diag.interior, s.interior);
    diag.gradient = std::max(diag.gradient, s.gradient);
    if (s.margin < diag.g_margin) {
      diag.g_margin = s.margin;
      if (!diag.witness || diag.nondegeneracy > 0.0) diag.witness = pts[i];
    }
  }
  if (!(diag.nondegeneracy > 0.0)) throw DeformationError("deformed form is degenerate", diag);
  if (!(diag.g_margin > 0.0)) throw DeformationError("deformed tensor is not positive", diag);

  diag.closedness = closedness_residual(omega_t, chart);
  try {
    diag.liouville = lie_derivative_residual(x_t, omega_t, chart, kDeformTol);
  } catch (const Error& e) {
    throw DeformationError(e.what(), diag);
  }
  if (!(diag.interior < kDeformTol) || !(diag.gradient < kDeformTol) || !(diag.liouville < kDeformTol))
    throw DeformationError("deformation identities fail numerically", diag);

  DeformationResult out{WeinsteinStructure{omega_t, x_t, phi_tilde, g_t}, lambda_t, diag};
  return out;
}

HomotopyResult homotopy(const WeinsteinStructure& w, const TensorField& g, const ScalarField& phi_tilde,
                        std::size_t steps, const Chart& chart) {
  if (steps < 2) throw Error(ErrorCode::InvalidArgument, "a homotopy needs at least 2 steps");
  HomotopyResult out;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(steps - 1);
    const ScalarField phi_t(w.dim(), simplify(Expr::constant(1.0 - t) * w.phi.expr() +
                                              Expr::constant(t) * phi_tilde.expr()));
    try {
      DeformationResult r = deform(w, g, phi_t, chart);
      r.diagnostics.t = t;
      out.steps.push_back(std::move(r));
    } catch (const DeformationError& e) {
      out.failed_t = t;
      out.failure = e.diagnostics();
      out.failure->t = t;
      out.failure_message = e.what();
      break;
    }
  }
  return out;
}

SteinResult stein_to_weinstein(const ExprMatrix& j, const ScalarField& phi, const Chart& chart) {
  const std::size_t m = phi.dim();
  if (j.rows() != m || j.cols() != m || chart.dim != m)
    throw Error(ErrorCode::InvalidArgument, "J must be an m x m matrix");
  SteinResult out;
  const auto pts = grid_points(chart);
  for (const auto& p : pts) {
    const Matrix jp = j.evaluate(p);
    const double r = (jp * jp + Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
    out.almost_complex_residual = std::max(out.almost_complex_residual, r);
    if (!(r < 1e-10))
      throw Error(ErrorCode::NotAlmostComplex, "J^2 + Id residual " + std::to_string(r), to_vec(p));
  }

  // alpha(v) = dphi(J v): coefficients J^T grad phi.
  out.alpha = OneForm(m, j.transpose() * gradient_exprs(phi));
  const TwoForm d_alpha = exterior_derivative_1(out.alpha);
  ExprMatrix omega(m, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) omega(a, b) = simplify(-d_alpha.entries()(a, b));
  // g(v, w) = omega(v, J w) gives M = J^T Omega.
  const ExprMatrix metric = (j.transpose() * omega).simplified();
  const TwoForm omega_phi(m, omega);
  const TensorField g_phi(m, metric);

  out.j_convexity_margin = std::numeric_limits<double>::infinity();
  for (const auto& p : pts) {
    const Matrix mp = g_phi(p);
    const double mar = linalg::min_sym_eigenvalue(mp);
    if (!(mar > 0.0)) {
      std::vector<double> wit = to_vec(p);
      const Vector v = linalg::min_sym_eigenvector(mp);
      wit.insert(wit.end(), v.data(), v.data() + v.size());
      throw Error(ErrorCode::NotJConvex,
                  "-d(dphi o J)(v, J v) = " + std::to_string(mar) + " for a unit vector v", wit);
    }
    out.j_convexity_margin = std::min(out.j_convexity_margin, mar);
  }
  out.structure = WeinsteinStructure{omega_phi, solve_vector_field(phi, g_phi, chart), phi, g_phi};
  return out;
}

}  // namespace gradcert
