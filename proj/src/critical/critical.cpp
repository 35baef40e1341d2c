#include "gradcert/critical.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gradcert/errors.hpp"
#include "gradcert/parallel.hpp"

namespace gradcert {

std::string_view to_string(CriticalKind k) {
  switch (k) {
    case CriticalKind::Morse: return "morse";
    case CriticalKind::Embryonic: return "embryonic";
    case CriticalKind::Degenerate: return "degenerate";
  }
  return "degenerate";
}

namespace {

bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

bool all_zero_extended(const std::vector<Expr>& comps, const Point& p) {
  for (const auto& c : comps)
    if (eval_extended(c, as_span(p)) != 0.0L) return false;
  return true;
}

struct NewtonOutcome {
  bool converged = false;
  Point point;
  double residual = 0.0;
};

NewtonOutcome newton(const std::vector<Expr>& f, const ExprMatrix& jac, const Point& start,
                     const Chart& chart, const CriticalTolerances& tol) {
  const auto m = static_cast<Eigen::Index>(f.size());
  Point x = start;
  // Starts that run far outside the box are abandoned.
  double box_scale = 0.0;
  for (std::size_t i = 0; i < chart.dim; ++i) box_scale = std::max(box_scale, chart.hi[i] - chart.lo[i]);
  try {
    for (int iter = 0; iter <= tol.max_iterations; ++iter) {
      Vector fx(m);
      for (Eigen::Index i = 0; i < m; ++i) fx(i) = eval(f[i], as_span(x));
      const double r = fx.norm();
      if (r == 0.0) {
        // An exact zero in double may be underflow of a flat function.
        if (!all_zero_extended(f, x)) return {};
        return {true, x, 0.0};
      }
      const Matrix j = jac.evaluate(x);
      if (j.cwiseAbs().maxCoeff() == 0.0) return {};
      const Vector step = j.completeOrthogonalDecomposition().solve(fx);
      if (!step.allFinite()) return {};
      if (r < tol.newton_tol && step.norm() < tol.step_tol) return {true, x, r};
      if (iter == tol.max_iterations) break;
      x -= step;
      if (!x.allFinite() || !chart.contains(x, 10 * box_scale)) return {};
    }
  } catch (const EvalError&) {
    return {};
  }
  return {};
}

}  // namespace

ZeroSet find_zeros(const VectorField& f, const Chart& chart, const CriticalTolerances& tol) {
  const auto& comps = f.components();
  const std::size_t m = comps.size();
  ExprMatrix jac(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) jac(i, j) = diff(comps[i], j);

  const auto starts = grid_points(chart);
  const auto outcomes = parallel_map<NewtonOutcome>(
      starts.size(), [&](std::size_t i) { return newton(comps, jac, starts[i], chart, tol); });

  std::vector<NewtonOutcome> found;
  for (const auto& o : outcomes)
    if (o.converged && chart.contains(o.point, 1e-12)) found.push_back(o);
  std::sort(found.begin(), found.end(),
            [](const NewtonOutcome& a, const NewtonOutcome& b) { return lex_less(a.point, b.point); });
  found.erase(std::unique(found.begin(), found.end(),
                          [](const NewtonOutcome& a, const NewtonOutcome& b) { return a.point == b.point; }),
              found.end());

  // Single-linkage clustering at dedup_tol; sweep along the first coordinate.
  const std::size_t k = found.size();
  std::vector<std::size_t> parent(k);
  std::iota(parent.begin(), parent.end(), 0);
  auto root = [&](std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a + 1; b < k && found[b].point(0) - found[a].point(0) <= tol.dedup_tol; ++b)
      if ((found[a].point - found[b].point).norm() <= tol.dedup_tol) parent[root(b)] = root(a);

  ZeroSet out;
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> cluster_of(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    const std::size_t r = root(a);
    if (cluster_of[r] == k) {
      cluster_of[r] = clusters.size();
      clusters.emplace_back();
    }
    clusters[cluster_of[r]].push_back(a);
  }
  for (const auto& members : clusters) {
    Point lo = found[members[0]].point, hi = lo;
    std::size_t best = members[0];
    for (std::size_t idx : members) {
      lo = lo.cwiseMin(found[idx].point);
      hi = hi.cwiseMax(found[idx].point);
      if (found[idx].residual < found[best].residual) best = idx;
    }
    if ((hi - lo).norm() > 10 * tol.dedup_tol) out.non_isolated = true;
    out.points.push_back(found[best].point);
  }
  std::sort(out.points.begin(), out.points.end(), lex_less);

  // Neighbouring zeros joined through a vanishing midpoint lie on a
  // continuum of zeros.
  double reach = 0.0;
  for (std::size_t i = 0; i < chart.dim; ++i) reach = std::max(reach, chart.spacing(i));
  reach *= 2.0 * std::sqrt(static_cast<double>(chart.dim));
  for (std::size_t a = 0; a < out.points.size() && !out.non_isolated; ++a)
    for (std::size_t b = a + 1; b < out.points.size(); ++b) {
      const Point& pa = out.points[a];
      const Point& pb = out.points[b];
      if ((pa - pb).norm() > reach) continue;
      const Point mid = 0.5 * (pa + pb);
      try {
        if (f(mid).norm() < tol.newton_tol) {
          out.non_isolated = true;
          break;
        }
      } catch (const EvalError&) {
      }
    }
  return out;
}

CriticalPoint classify(const ScalarField& phi, const Point& p, const CriticalTolerances& tol) {
  const std::size_t m = phi.dim();
  const Vector grad = gradient(phi)(p);
  if (!(grad.norm() < tol.newton_tol))
    throw Error(ErrorCode::NotCritical,
                "gradient norm " + std::to_string(grad.norm()) + " at the given point",
                std::vector<double>(p.data(), p.data() + p.size()));

  Matrix hess(m, m);
  std::vector<Expr> first(m);
  for (std::size_t i = 0; i < m; ++i) first[i] = diff(phi.expr(), i);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) hess(i, j) = eval(diff(first[i], j), as_span(p));

  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (hess + hess.transpose()));
  const Vector eig = es.eigenvalues();
  CriticalPoint cp;
  cp.location = p;
  cp.hessian_eigenvalues.assign(eig.data(), eig.data() + eig.size());

  const double scale = std::max(eig.cwiseAbs().maxCoeff(), 1.0);
  const double zero_tol = tol.eig_zero_rel * scale;
  std::vector<Eigen::Index> kernel;
  int negatives = 0;
  for (Eigen::Index i = 0; i < eig.size(); ++i) {
    if (std::abs(eig(i)) <= zero_tol)
      kernel.push_back(i);
    else if (eig(i) < 0)
      ++negatives;
  }
  if (kernel.empty()) {
    cp.kind = CriticalKind::Morse;
    cp.index = negatives;
    return cp;
  }
  if (kernel.size() == 1) {
    Vector e = es.eigenvectors().col(kernel[0]);
    for (Eigen::Index i = 0; i < e.size(); ++i)
      if (std::abs(e(i)) > 1e-12) {
        if (e(i) < 0) e = -e;
        break;
      }
    // Third directional derivative along e, built symbolically.
    auto directional = [&](const Expr& g) {
      Expr acc = Expr::constant(0.0);
      for (std::size_t i = 0; i < m; ++i) acc = acc + Expr::constant(e(i)) * diff(g, i);
      return acc;
    };
    const Expr d3 = directional(directional(directional(phi.expr())));
    cp.third_derivative = eval(d3, as_span(p));
    cp.kernel_direction = e;
    cp.kind = std::abs(cp.third_derivative) > tol.third_tol ? CriticalKind::Embryonic
                                                            : CriticalKind::Degenerate;
    return cp;
  }
  cp.kind = CriticalKind::Degenerate;
  return cp;
}

ZeroSetMatch zero_sets_match(const ScalarField& phi, const VectorField& x, const Chart& chart,
                             const CriticalTolerances& tol) {
  ZeroSetMatch out;
  out.critical = find_zeros(gradient(phi), chart, tol);
  out.zeros = find_zeros(x, chart, tol);

  auto unmatched = [&](const std::vector<Point>& from, const std::vector<Point>& to) {
    std::vector<Point> miss;
    for (const auto& p : from) {
      bool hit = false;
      for (const auto& q : to)
        if ((p - q).norm() <= tol.match_tol) {
          hit = true;
          break;
        }
      if (!hit) miss.push_back(p);
    }
    return miss;
  };
  out.unmatched_critical = unmatched(out.critical.points, out.zeros.points);
  out.unmatched_zeros = unmatched(out.zeros.points, out.critical.points);

  if (out.critical.non_isolated || out.zeros.non_isolated) {
    out.verdict = Verdict::inconclusive(
        {"non-isolated zero set: pointwise matching of Zero(X) and Crit(phi) is not meaningful"});
  } else if (!out.unmatched_critical.empty() || !out.unmatched_zeros.empty()) {
    const Point& w = !out.unmatched_critical.empty() ? out.unmatched_critical.front()
                                                     : out.unmatched_zeros.front();
    out.verdict = Verdict::fail(
        Witness{w,
                {{"unmatched_critical", static_cast<double>(out.unmatched_critical.size())},
                 {"unmatched_zeros", static_cast<double>(out.unmatched_zeros.size())}}},
        {"Zero(X) and Crit(phi) differ"});
  } else {
    // Matching sets: the margin is the match tolerance headroom.
    double worst_gap = 0.0;
    for (const auto& p : out.critical.points) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& q : out.zeros.points) best = std::min(best, (p - q).norm());
      worst_gap = std::max(worst_gap, best);
    }
    out.verdict = Verdict::pass(tol.match_tol - worst_gap);
    out.verdict.values.emplace_back("zero_count", static_cast<double>(out.zeros.points.size()));
  }
  return out;
}

}  // namespace gradcert
