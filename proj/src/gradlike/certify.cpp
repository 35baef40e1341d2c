#include <cmath>
#include <limits>
#include <string>

#include "gradcert/errors.hpp"
#include "gradcert/gradlike.hpp"

namespace gradcert {

namespace {

struct LocalPiece {
  TensorField g;
  Point center;
  double radius;
};

}  // namespace

CertifyResult certify(const ScalarField& phi, const VectorField& x, const Chart& chart,
                      const std::vector<LocalCertificate>& local, const CheckOptions& opts) {
  CertifyResult out;
  out.condition1 = check_condition1(phi, x, chart, opts);
  const Verdict& c1 = out.condition1.verdict;
  if (c1.status == Status::Fail) {
    const Point& w = c1.witness->point;
    std::string what = "condition (1) fails";
    if (!c1.notes.empty()) what += ": " + c1.notes.front();
    throw Error(ErrorCode::Condition1Fails, what, std::vector<double>(w.data(), w.data() + w.size()));
  }
  const auto& zm = out.condition1.zeros;
  if (zm.critical.non_isolated || zm.zeros.non_isolated) {
    out.status = Status::Inconclusive;
    out.notes.push_back("critical set is not isolated");
    return out;
  }
  if (c1.status == Status::Inconclusive) {
    out.status = Status::Inconclusive;
    out.notes = c1.notes;
    return out;
  }

  const auto& crit = zm.critical.points;
  const std::size_t m = phi.dim();
  std::vector<LocalPiece> pieces;
  bool complete = true;
  for (std::size_t i = 0; i < crit.size(); ++i) {
    const Point& p = crit[i];
    double r = opts.certify_radius;
    for (std::size_t j = 0; j < crit.size(); ++j)
      if (j != i) r = std::min(r, 0.45 * (crit[j] - p).norm());

    CriticalReport rep;
    rep.point = classify(phi, p, opts.critical);
    if (rep.point.kind == CriticalKind::Morse) {
      try {
        Certificate cert = construct_certificate_morse(phi, x, p, r, chart, opts);
        rep.status = Status::Pass;
        rep.radius = cert.ball->radius;
        pieces.push_back({cert.g, p, cert.ball->radius});
      } catch (const Error& e) {
        rep.note = e.what();
      }
    } else {
      const LocalCertificate* match = nullptr;
      for (const auto& lc : local)
        if ((lc.center - p).norm() <= opts.critical.match_tol) match = &lc;
      if (match && match->certificate.verdict.passed()) {
        const double lr = match->certificate.ball ? std::min(match->certificate.ball->radius, r) : r;
        rep.status = Status::Pass;
        rep.radius = lr;
        pieces.push_back({match->certificate.g, p, lr});
      } else {
        rep.note = std::string(to_string(rep.point.kind)) +
                   " critical point: no local certificate supplied";
      }
    }
    complete = complete && rep.status == Status::Pass;
    out.critical_points.push_back(std::move(rep));
  }
  if (!complete) {
    out.status = Status::Inconclusive;
    out.notes.push_back("some critical points have no local certificate");
    return out;
  }

  std::vector<BlendPiece> blend;
  Expr rest = Expr::constant(1.0);
  for (const auto& lp : pieces) {
    ScalarField chi = ball_cutoff(m, lp.center, lp.radius);
    rest = rest - chi.expr();
    blend.push_back({lp.g, std::move(chi)});
  }
  const VectorField grad = gradient(phi);
  const TensorField regular(m, [grad, x](const Point& p) { return regular_tensor(grad(p), x(p)); });
  blend.push_back({regular, ScalarField(m, rest)});

  try {
    Certificate cert = blend_certificates(phi, x, blend, chart, opts);
    out.status = cert.verdict.status;
    out.certificate = std::move(cert);
  } catch (const Error& e) {
    out.status = Status::Inconclusive;
    out.notes.push_back(std::string("blending failed: ") + e.what());
  }
  return out;
}

}  // namespace gradcert
