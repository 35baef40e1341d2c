#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gradcert/errors.hpp"
#include "gradcert/gradlike.hpp"
#include "gradcert/linalg.hpp"
#include "gradcert/parallel.hpp"
#include "pair.hpp"

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

struct Quadrature {
  std::array<double, 8> nodes;    // on [0, 1]
  std::array<double, 8> weights;  // sum to 1
};

/// 8-point Gauss-Legendre rule mapped to [0, 1]; nodes by Newton on P_8.
const Quadrature& gauss_legendre8() {
  static const Quadrature q = [] {
    Quadrature out{};
    constexpr int n = 8;
    for (int i = 0; i < n; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = pk;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      out.nodes[i] = 0.5 * (1.0 - x);
      out.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return out;
  }();
  return q;
}

struct PointCheck {
  bool ok = false;
  double residual = 0.0;
  double margin = 0.0;
  double grad_max = 0.0;
};

}  // namespace

Certificate check_certificate(const ScalarField& phi, const VectorField& x, const TensorField& g,
                              const Chart& chart, const std::optional<Ball>& ball,
                              const CheckOptions& opts) {
  if (phi.dim() != x.dim() || x.dim() != g.dim() || g.dim() != chart.dim)
    throw Error(ErrorCode::InvalidArgument, "certificate: dimension mismatch");
  const auto grad = gradient_exprs(phi);
  const auto pts = region_points(chart, ball);
  const auto checks = parallel_map<PointCheck>(pts.size(), [&](std::size_t i) {
    PointCheck c;
    try {
      const Vector gp = eval_vec(grad, pts[i]);
      const Vector xp = x(pts[i]);
      const Matrix m = g(pts[i]);
      if (!m.allFinite() || !xp.allFinite() || !gp.allFinite()) return c;
      c.residual = (m * xp - gp).cwiseAbs().maxCoeff();
      c.margin = linalg::min_sym_eigenvalue(m);
      c.grad_max = gp.cwiseAbs().maxCoeff();
      c.ok = true;
    } catch (const EvalError&) {
    } catch (const Error&) {
    }
    return c;
  });

  Certificate cert;
  cert.g = g;
  cert.ball = ball;
  cert.samples = pts.size();
  cert.positivity_margin = std::numeric_limits<double>::infinity();
  std::size_t failures = 0;
  std::optional<std::size_t> worst_res, worst_margin;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& c = checks[i];
    if (!c.ok) {
      ++failures;
      continue;
    }
    cert.scale = std::max(cert.scale, c.grad_max);
    if (!worst_res || c.residual > checks[*worst_res].residual) worst_res = i;
    if (!worst_margin || c.margin < checks[*worst_margin].margin) worst_margin = i;
  }
  cert.residual = worst_res ? checks[*worst_res].residual : 0.0;
  if (worst_margin) cert.positivity_margin = checks[*worst_margin].margin;

  if (pts.empty() || failures > 0) {
    cert.verdict = Verdict::inconclusive(
        {std::to_string(failures) + " of " + std::to_string(pts.size()) + " samples failed to evaluate"});
  } else if (!(cert.residual < opts.residual_tol * cert.scale)) {
    cert.verdict = Verdict::fail(Witness{pts[*worst_res], {{"residual", cert.residual}}},
                                 {"M X differs from grad phi"});
  } else if (!(cert.positivity_margin > 0.0)) {
    cert.verdict = Verdict::fail(
        Witness{pts[*worst_margin], {{"positivity_margin", cert.positivity_margin}}},
        {"tensor is not positive"});
  } else {
    cert.verdict = Verdict::pass(cert.positivity_margin);
  }
  cert.verdict.values.emplace_back("residual", cert.residual);
  if (worst_margin) cert.verdict.values.emplace_back("positivity_margin", cert.positivity_margin);
  cert.verdict.values.emplace_back("scale", cert.scale);
  return cert;
}

Verdict is_riemannian(const TensorField& g, const Chart& chart, const CheckOptions& opts) {
  const auto pts = grid_points(chart);
  struct Sample {
    bool ok = false;
    double asym = 0.0;
    double margin = 0.0;
  };
  const auto samples = parallel_map<Sample>(pts.size(), [&](std::size_t i) {
    Sample s;
    try {
      const Matrix m = g(pts[i]);
      if (!m.allFinite()) return s;
      s = {true, linalg::asymmetry(m), linalg::min_sym_eigenvalue(m)};
    } catch (const EvalError&) {
    }
    return s;
  });
  double asym = 0.0, margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& s = samples[i];
    if (!s.ok) return Verdict::inconclusive({"tensor failed to evaluate"});
    if (!(s.asym < opts.symmetry_tol))
      return Verdict::fail(Witness{pts[i], {{"asymmetry", s.asym}}}, {"tensor is not symmetric"});
    if (!(s.margin > 0.0))
      return Verdict::fail(Witness{pts[i], {{"positivity_margin", s.margin}}}, {"tensor is not positive"});
    asym = std::max(asym, s.asym);
    margin = std::min(margin, s.margin);
  }
  if (pts.empty()) return Verdict::inconclusive({"empty grid"});
  Verdict v = Verdict::pass(margin);
  v.values = {{"asymmetry", asym}, {"positivity_margin", margin}};
  return v;
}

DeltaBound delta_from_certificate(const ScalarField& phi, const VectorField& x, const TensorField& g,
                                  const Point& p) {
  const Matrix m = g(p);
  DeltaBound d;
  d.a = linalg::min_sym_eigenvalue(m);
  if (!(d.a > 0.0))
    throw Error(ErrorCode::NotPositive, "symmetric part of the certificate is not positive", to_vec(p));
  d.b = linalg::max_singular_value(m);
  d.delta = d.a / (1.0 + d.b * d.b);
  const Vector gp = gradient(phi)(p);
  const Vector xp = x(p);
  d.slack = gp.dot(xp) - d.delta * (xp.squaredNorm() + gp.squaredNorm());
  return d;
}

VectorField solve_vector_field(const ScalarField& phi, const TensorField& g, const Chart& chart) {
  const std::size_t m = phi.dim();
  if (g.dim() != m || chart.dim != m) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");
  for (const auto& p : grid_points(chart)) {
    const Matrix mp = g(p);
    if (!(linalg::min_sym_eigenvalue(mp) > 0.0))
      throw Error(ErrorCode::SingularTensor, "tensor is not positive on the chart", to_vec(p));
  }
  const auto grad = gradient_exprs(phi);
  if (g.is_symbolic() && g.entries().is_constant() && m <= 4) {
    const ExprMatrix& e = g.entries();
    const ExprMatrix adj = adjugate(e);
    const Expr det = simplify(determinant(e));
    std::vector<Expr> comps(m);
    for (std::size_t i = 0; i < m; ++i) {
      Expr acc = Expr::constant(0.0);
      for (std::size_t j = 0; j < m; ++j) acc = acc + adj(i, j) * grad[j];
      comps[i] = simplify(acc / det);
    }
    return VectorField(m, std::move(comps));
  }
  return VectorField(m, [g, grad](const Point& p) -> Vector {
    const Matrix mp = g(p);
    Eigen::PartialPivLU<Matrix> lu(mp);
    const Vector out = lu.solve(eval_vec(grad, p));
    if (!out.allFinite() || lu.determinant() == 0.0)
      throw Error(ErrorCode::SingularTensor, "tensor is singular", to_vec(p));
    return out;
  });
}

Certificate construct_certificate_morse(const ScalarField& phi, const VectorField& x, const Point& p,
                                        double radius, const Chart& chart, const CheckOptions& opts) {
  const std::size_t m = phi.dim();
  const CriticalPoint cp = classify(phi, p, opts.critical);
  if (cp.kind != CriticalKind::Morse)
    throw Error(ErrorCode::NotMorse, "critical point is " + std::string(to_string(cp.kind)), to_vec(p));
  const auto& xs = x.components();
  if (!(x(p).norm() < opts.critical.newton_tol))
    throw Error(ErrorCode::InvalidArgument, "the point is not a zero of X", to_vec(p));

  const auto grad = gradient_exprs(phi);
  ExprMatrix jac(m, m), hess(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      jac(i, j) = diff(xs[i], j);
      hess(i, j) = diff(grad[i], j);
    }
  const Matrix b = hess.evaluate(p);
  const Matrix a0 = jac.evaluate(p);
  const double beta = linalg::min_sym_eigenvalue(b * a0);
  if (!(beta > 0.0))
    throw Error(ErrorCode::LinearizationNotLyapunov,
                "<Hess v, DX v> is not positive definite (minimum " + std::to_string(beta) + ")", to_vec(p));

  const TensorField g(m, [jac, hess, p](const Point& z) -> Matrix {
    const auto& q = gauss_legendre8();
    const auto n = p.size();
    Matrix a = Matrix::Zero(n, n), h = Matrix::Zero(n, n);
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
      const Point y = p + q.nodes[k] * (z - p);
      a += q.weights[k] * jac.evaluate(y);
      h += q.weights[k] * hess.evaluate(y);
    }
    Eigen::PartialPivLU<Matrix> lu(a.transpose());
    if (lu.determinant() == 0.0) throw Error(ErrorCode::SingularTensor, "averaged Jacobian is singular", to_vec(z));
    return lu.solve(h.transpose()).transpose();
  });

  double r = radius;
  for (int attempt = 0; attempt <= 6; ++attempt, r *= 0.5) {
    Certificate cert = check_certificate(phi, x, g, chart, Ball{p, r}, opts);
    if (cert.verdict.status != Status::Inconclusive && cert.positivity_margin > 0.0) return cert;
  }
  throw Error(ErrorCode::NoPositiveRadius, "no radius with a positive Morse certificate", to_vec(p));
}

ScalarField EmbryonicNormalForm::phi() const {
  const std::size_t mw = b.rows();
  Expr acc = Expr::constant(0.0);
  for (std::size_t i = 0; i < mw; ++i)
    for (std::size_t j = 0; j < mw; ++j)
      acc = acc + Expr::constant(0.5 * b(i, j)) * Expr::variable(i) * Expr::variable(j);
  acc = acc + Expr::constant(c / 3.0) * pow(Expr::variable(mw), 3);
  return ScalarField(dim(), simplify(acc));
}

VectorField EmbryonicNormalForm::x() const {
  const std::size_t mw = b.rows();
  std::vector<Expr> w;
  for (std::size_t i = 0; i < mw; ++i) w.push_back(Expr::variable(i));
  std::vector<Expr> comps = a * w;
  Expr last = a1 * pow(Expr::variable(mw), 2);
  for (std::size_t i = 0; i < mw; ++i) last = last + a2[i] * w[i];
  comps.push_back(last);
  for (auto& e : comps) e = simplify(e);
  return VectorField(dim(), std::move(comps));
}

EmbryonicCertificate construct_certificate_embryonic(const EmbryonicNormalForm& nf, double radius,
                                                     std::size_t n, const CheckOptions& opts) {
  const auto mw = static_cast<std::size_t>(nf.b.rows());
  auto violation = [](const std::string& what) { return Error(ErrorCode::NormalFormViolation, what); };
  if (mw == 0 || static_cast<std::size_t>(nf.b.cols()) != mw) throw violation("B must be a nonempty square matrix");
  if (nf.a.rows() != mw || nf.a.cols() != mw) throw violation("A must match the size of B");
  if (nf.a2.size() != mw) throw violation("a2 must have one entry per w coordinate");
  if (linalg::asymmetry(nf.b) > 1e-12) throw violation("B must be symmetric");
  if (std::abs(nf.b.determinant()) < 1e-12) throw violation("B must be invertible");
  if (!(nf.c > 0.0)) throw violation("c must be positive");

  const std::size_t m = mw + 1;
  const Point origin = Point::Zero(m);
  try {
    const Matrix a0 = nf.a.evaluate(origin);
    if (std::abs(a0.determinant()) < 1e-12) throw violation("A(0) must be invertible");
    if (std::abs(eval(nf.a1, as_span(origin)) - 1.0) > 1e-12) throw violation("a1(0) must equal 1");
    for (const auto& e : nf.a2)
      if (std::abs(eval(e, as_span(origin))) > 1e-12) throw violation("a2(0) must vanish");
    if (!(linalg::min_sym_eigenvalue(nf.b * a0) > 0.0))
      throw violation("<B v, A(0) v> is not positive definite");
  } catch (const EvalError&) {
    throw violation("normal-form data failed to evaluate at 0");
  }

  EmbryonicCertificate out{nf.phi(), nf.x(), {}};
  const TensorField g(m, [nf, mw](const Point& z) -> Matrix {
    const Matrix a = nf.a.evaluate(z);
    Eigen::PartialPivLU<Matrix> lu(a);
    if (lu.determinant() == 0.0) throw Error(ErrorCode::SingularTensor, "A is singular", to_vec(z));
    const Matrix a_inv = lu.inverse();
    const double g22 = nf.c / eval(nf.a1, as_span(z));
    Vector a2(mw);
    for (std::size_t i = 0; i < mw; ++i) a2(i) = eval(nf.a2[i], as_span(z));
    Matrix out = Matrix::Zero(mw + 1, mw + 1);
    out.topLeftCorner(mw, mw) = nf.b * a_inv;
    out.bottomLeftCorner(1, mw) = -g22 * a2.transpose() * a_inv;
    out(mw, mw) = g22;
    return out;
  });

  double r = radius;
  for (int attempt = 0; attempt <= 6; ++attempt, r *= 0.5) {
    const Chart box = Chart::cube(m, -r, r, n);
    Certificate cert = check_certificate(out.phi, out.x, g, box, Ball{origin, r}, opts);
    if (cert.verdict.status != Status::Inconclusive && cert.positivity_margin > 0.0) {
      out.certificate = std::move(cert);
      return out;
    }
  }
  throw Error(ErrorCode::NoPositiveRadius, "no radius with a positive embryonic certificate");
}

Matrix regular_tensor(const Vector& grad_phi, const Vector& x) {
  const double s = grad_phi.dot(x);
  if (!(s > 0.0)) throw Error(ErrorCode::NotTransverse, "dphi(X) is not positive");
  const auto m = grad_phi.size();
  const Matrix p = Matrix::Identity(m, m) - x * grad_phi.transpose() / s;
  return grad_phi * grad_phi.transpose() / s + p.transpose() * p;
}

Matrix construct_certificate_regular(const ScalarField& phi, const VectorField& x, const Point& p) {
  try {
    return regular_tensor(gradient(phi)(p), x(p));
  } catch (const Error& e) {
    throw Error(e.code(), e.what(), to_vec(p));
  }
}

ScalarField ball_cutoff(std::size_t dim, const Point& center, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "cutoff radius must be positive");
  Expr r2 = Expr::constant(0.0);
  for (std::size_t i = 0; i < dim; ++i) r2 = r2 + pow(Expr::variable(i) - Expr::constant(center(i)), 2);
  const Expr t = Expr::constant(2.0 / radius) * sqrt(r2) - Expr::constant(1.0);
  const Expr ramp = pow(t, 3) * (Expr::constant(10.0) - Expr::constant(15.0) * t + Expr::constant(6.0) * pow(t, 2));
  const Expr one = Expr::constant(1.0), zero = Expr::constant(0.0);
  const Expr smooth = sgncase(t, zero, zero, sgncase(t - one, ramp, one, one));
  return ScalarField(dim, one - smooth);
}

Certificate blend_certificates(const ScalarField& phi, const VectorField& x,
                               const std::vector<BlendPiece>& pieces, const Chart& chart,
                               const CheckOptions& opts) {
  if (pieces.empty()) throw Error(ErrorCode::PartitionInvalid, "no pieces to blend");
  const std::size_t m = phi.dim();
  for (const auto& pc : pieces)
    if (pc.g.dim() != m || pc.cutoff.dim() != m) throw Error(ErrorCode::InvalidArgument, "dimension mismatch");

  const auto grad = gradient_exprs(phi);
  const auto pts = grid_points(chart);
  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, eval_vec(grad, p).cwiseAbs().maxCoeff());

  enum class Issue { None, Partition, Piece };
  struct Sample {
    Issue issue = Issue::None;
    std::size_t piece = 0;
    double value = 0.0;
  };
  const auto samples = parallel_map<Sample>(pts.size(), [&](std::size_t i) {
    const Point& p = pts[i];
    std::vector<double> chi(pieces.size());
    double sum = 0.0;
    try {
      for (std::size_t k = 0; k < pieces.size(); ++k) {
        chi[k] = pieces[k].cutoff(p);
        sum += chi[k];
        if (!(chi[k] >= -opts.partition_tol)) return Sample{Issue::Partition, k, chi[k]};
      }
    } catch (const EvalError&) {
      return Sample{Issue::Partition, 0, std::nan("")};
    }
    if (!(std::abs(sum - 1.0) <= opts.partition_tol)) return Sample{Issue::Partition, 0, sum};
    const Vector gp = eval_vec(grad, p);
    const Vector xp = x(p);
    for (std::size_t k = 0; k < pieces.size(); ++k) {
      if (!(chi[k] > 0.0)) continue;
      try {
        const Matrix mk = pieces[k].g(p);
        const double res = (mk * xp - gp).cwiseAbs().maxCoeff();
        if (!(res < opts.residual_tol * scale)) return Sample{Issue::Piece, k, res};
        const double mar = linalg::min_sym_eigenvalue(mk);
        if (!(mar > 0.0)) return Sample{Issue::Piece, k, mar};
      } catch (const std::exception&) {
        return Sample{Issue::Piece, k, std::nan("")};
      }
    }
    return Sample{};
  });
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& s = samples[i];
    if (s.issue == Issue::Partition)
      throw Error(ErrorCode::PartitionInvalid,
                  "cutoffs are not a partition of unity (value " + std::to_string(s.value) + ")", to_vec(pts[i]));
    if (s.issue == Issue::Piece)
      throw Error(ErrorCode::PieceInvalidOnSupport,
                  "piece " + std::to_string(s.piece) + " is not a valid certificate on its support",
                  to_vec(pts[i]));
  }

  const TensorField blended(m, [pieces](const Point& p) -> Matrix {
    const auto n = p.size();
    Matrix out = Matrix::Zero(n, n);
    for (const auto& pc : pieces) {
      const double chi = pc.cutoff(p);
      if (chi > 0.0) out += chi * pc.g(p);
    }
    return out;
  });
  return check_certificate(phi, x, blended, chart, std::nullopt, opts);
}

}  // namespace gradcert
