#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "gradcert/errors.hpp"
#include "gradcert/gradlike.hpp"
#include "gradcert/parallel.hpp"
#include "pair.hpp"

namespace gradcert {

namespace detail {

PairEvaluator::PairEvaluator(const ScalarField& phi, const VectorField& x) : x_(x) {
  if (phi.dim() != x.dim()) throw Error(ErrorCode::InvalidArgument, "phi and X have different dimensions");
  grad_.reserve(phi.dim());
  for (std::size_t i = 0; i < phi.dim(); ++i) grad_.push_back(diff(phi.expr(), i));
}

Vector PairEvaluator::grad(const Point& p) const {
  Vector g(grad_.size());
  for (std::size_t i = 0; i < grad_.size(); ++i) g(i) = eval(grad_[i], as_span(p));
  return g;
}

namespace {

PairSample combine(const std::vector<long double>& g, const std::vector<long double>& x) {
  PairSample s;
  long double gmax = 0.0L, xmax = 0.0L;
  for (auto v : g) gmax = std::max(gmax, std::fabs(v));
  for (auto v : x) xmax = std::max(xmax, std::fabs(v));
  s.grad_zero = gmax == 0.0L;
  s.x_zero = xmax == 0.0L;
  s.scale = std::max(gmax, xmax);
  if (s.scale == 0.0L) return s;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const long double gi = g[i] / s.scale;
    const long double xi = x[i] / s.scale;
    s.dot += gi * xi;
    s.denom += gi * gi + xi * xi;
  }
  return s;
}

}  // namespace

PairSample PairEvaluator::operator()(const Point& p) const {
  const Vector g = grad(p);
  const Vector x = x_(p);
  const double s = std::max(g.cwiseAbs().maxCoeff(), x.cwiseAbs().maxCoeff());
  if (s >= DBL_MIN || !x_.is_symbolic()) {
    return combine(std::vector<long double>(g.data(), g.data() + g.size()),
                   std::vector<long double>(x.data(), x.data() + x.size()));
  }
  std::vector<long double> gl, xl;
  for (const auto& e : grad_) gl.push_back(eval_extended(e, as_span(p)));
  for (const auto& e : x_.components()) xl.push_back(eval_extended(e, as_span(p)));
  return combine(gl, xl);
}

}  // namespace detail

namespace {

std::vector<double> to_vec(const Point& p) { return {p.data(), p.data() + p.size()}; }

double as_positive_double(long double v) {
  const double d = static_cast<double>(v);
  return d > 0.0 ? d : std::numeric_limits<double>::denorm_min();
}

std::vector<Point> merge_zeros(const ZeroSetMatch& zm, double tol) {
  std::vector<Point> out = zm.zeros.points;
  for (const auto& p : zm.critical.points) {
    bool dup = false;
    for (const auto& q : out)
      if ((p - q).norm() <= tol) dup = true;
    if (!dup) out.push_back(p);
  }
  return out;
}

/// Deterministic sample points of the shell r_in <= |z - c| <= r_out.
std::vector<Point> annulus_points(const Point& c, double r_in, double r_out, int samples,
                                  std::uint64_t seed) {
  const auto m = c.size();
  std::vector<Point> out;
  if (m == 1) {
    const int per_side = std::max(samples / 2, 2);
    for (int side : {-1, 1})
      for (int i = 0; i < per_side; ++i) {
        const double r = r_in + (r_out - r_in) * i / (per_side - 1);
        out.push_back(c + Point::Constant(1, side * r));
      }
    return out;
  }
  constexpr int kRadii = 4;
  const int n_dirs = std::max(samples / kRadii, 2 * static_cast<int>(m));
  std::vector<Vector> dirs;
  if (m == 2) {
    for (int j = 0; j < n_dirs; ++j) {
      const double t = 2.0 * std::numbers::pi * j / n_dirs;
      dirs.push_back((Vector(2) << std::cos(t), std::sin(t)).finished());
    }
  } else {
    for (Eigen::Index i = 0; i < m; ++i)
      for (double s : {1.0, -1.0}) {
        Vector e = Vector::Zero(m);
        e(i) = s;
        dirs.push_back(e);
      }
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL ^ seed);
    std::normal_distribution<double> normal;
    while (static_cast<int>(dirs.size()) < n_dirs) {
      Vector v(m);
      for (Eigen::Index i = 0; i < m; ++i) v(i) = normal(rng);
      if (v.norm() > 1e-6) dirs.push_back(v / v.norm());
    }
  }
  for (int k = 0; k < kRadii; ++k) {
    const double r = r_in + (r_out - r_in) * k / (kRadii - 1);
    for (const auto& d : dirs) out.push_back(c + r * d);
  }
  return out;
}

}  // namespace

std::vector<Point> region_points(const Chart& chart, const std::optional<Ball>& ball) {
  if (!ball) return grid_points(chart);
  std::vector<double> lo(chart.dim), hi(chart.dim);
  for (std::size_t i = 0; i < chart.dim; ++i) {
    lo[i] = ball->center(i) - ball->radius;
    hi[i] = ball->center(i) + ball->radius;
  }
  const Chart local(chart.dim, lo, hi, chart.n, chart.r_excl);
  std::vector<Point> out;
  for (auto& p : grid_points(local))
    if ((p - ball->center).norm() <= ball->radius * (1 + 1e-12) && chart.contains(p, 1e-12))
      out.push_back(std::move(p));
  return out;
}

Condition1Result check_condition1(const ScalarField& phi, const VectorField& x, const Chart& chart,
                                  const CheckOptions& opts) {
  if (!x.is_symbolic())
    throw Error(ErrorCode::InvalidArgument, "condition (1) needs a symbolic vector field");
  Condition1Result out;
  out.zeros = zero_sets_match(phi, x, chart, opts.critical);
  out.common_zeros = merge_zeros(out.zeros, opts.critical.match_tol);

  const detail::PairEvaluator pair(phi, x);
  const auto pts = grid_points_excluding(chart, out.common_zeros);
  const auto samples = parallel_map<std::optional<detail::PairSample>>(
      pts.size(), [&](std::size_t i) -> std::optional<detail::PairSample> {
        try {
          return pair(pts[i]);
        } catch (const EvalError&) {
          return std::nullopt;
        }
      });

  std::optional<Verdict> grid_fail;
  long double min_dot = std::numeric_limits<long double>::infinity();
  std::size_t unresolved = 0, eval_errors = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& s = samples[i];
    if (!s) {
      ++eval_errors;
      continue;
    }
    if (s->both_zero()) {
      ++unresolved;
      continue;
    }
    if (grid_fail) continue;
    if (s->grad_zero != s->x_zero) {
      grid_fail = Verdict::fail(
          Witness{pts[i], {{"grad_phi_zero", s->grad_zero ? 1.0 : 0.0}, {"x_zero", s->x_zero ? 1.0 : 0.0}}},
          {"X and dphi do not vanish together"});
    } else if (!(s->dot > 0.0L)) {
      grid_fail = Verdict::fail(Witness{pts[i], {{"dphi_x", static_cast<double>(s->raw_dot())}}},
                                {"dphi(X) <= 0 outside the zero set"});
    } else {
      min_dot = std::min(min_dot, s->raw_dot());
    }
  }

  if (grid_fail) {
    out.verdict = *grid_fail;
  } else if (out.zeros.verdict.status == Status::Fail) {
    out.verdict = out.zeros.verdict;
  } else if (out.zeros.verdict.status == Status::Inconclusive || unresolved > 0 || eval_errors > 0 ||
             pts.empty()) {
    std::vector<std::string> notes = out.zeros.verdict.notes;
    if (unresolved > 0)
      notes.push_back(std::to_string(unresolved) + " grid points where X and dphi both vanish numerically");
    if (eval_errors > 0) notes.push_back(std::to_string(eval_errors) + " grid points failed to evaluate");
    out.verdict = Verdict::inconclusive(std::move(notes));
  } else {
    out.verdict = Verdict::pass(as_positive_double(min_dot));
  }
  out.verdict.values.emplace_back("zero_count", static_cast<double>(out.common_zeros.size()));
  out.verdict.values.emplace_back("samples", static_cast<double>(pts.size()));
  return out;
}

double lyapunov_ratio(const ScalarField& phi, const VectorField& x, const Point& p) {
  const auto s = detail::PairEvaluator(phi, x)(p);
  if (s.both_zero())
    throw Error(ErrorCode::ZeroDenominator, "X and dphi both vanish", to_vec(p));
  return static_cast<double>(s.ratio());
}

Condition2Result check_condition2(const ScalarField& phi, const VectorField& x, const Chart& chart,
                                  const CheckOptions& opts) {
  Condition2Result out;
  out.condition1 = check_condition1(phi, x, chart, opts);
  const auto& c1 = out.condition1;
  if (c1.verdict.status == Status::Fail) {
    out.verdict = Verdict::fail(*c1.verdict.witness, {"condition (1) fails"});
    return out;
  }

  const detail::PairEvaluator pair(phi, x);
  auto ratio_at = [&](const Point& p) -> std::optional<long double> {
    try {
      const auto s = pair(p);
      if (s.both_zero()) return std::nullopt;
      return s.ratio();
    } catch (const EvalError&) {
      return std::nullopt;
    }
  };

  const auto pts = grid_points_excluding(chart, c1.common_zeros);
  const auto ratios = parallel_map<std::optional<long double>>(pts.size(), [&](std::size_t i) { return ratio_at(pts[i]); });
  std::optional<std::size_t> grid_arg;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (ratios[i] && (!grid_arg || *ratios[i] < *ratios[*grid_arg])) grid_arg = i;
  if (grid_arg) out.grid_infimum = static_cast<double>(*ratios[*grid_arg]);

  std::vector<std::string> notes;
  if (c1.zeros.zeros.non_isolated) {
    notes.push_back("zero set is not isolated; no decay profiles");
  } else {
    for (const auto& z : c1.zeros.zeros.points) {
      DecayProfile prof;
      prof.center = z;
      for (int k = 0; k <= opts.decay_levels; ++k) prof.radii.push_back(opts.decay_r0 * std::ldexp(1.0, -k));
      for (int k = 0; k < opts.decay_levels; ++k) {
        std::optional<long double> best;
        Point best_at = z;
        int count = 0;
        for (const auto& p : annulus_points(z, prof.radii[k + 1], prof.radii[k], opts.annulus_samples, opts.seed)) {
          if (!chart.contains(p, 1e-12)) continue;
          const auto r = ratio_at(p);
          if (!r) continue;
          ++count;
          if (!best || *r < *best) {
            best = r;
            best_at = p;
          }
        }
        prof.infima.push_back(best ? std::optional<double>(static_cast<double>(*best)) : std::nullopt);
        prof.argmin.push_back(best_at);
        prof.samples.push_back(count);
      }
      // Decay: the last four resolved scales strictly decrease and the last
      // one is below decay_factor times the first resolved scale.
      std::vector<std::size_t> resolved;
      for (std::size_t k = 0; k < prof.infima.size(); ++k)
        if (prof.infima[k]) resolved.push_back(k);
      if (resolved.size() >= 4) {
        bool decreasing = true;
        for (std::size_t i = resolved.size() - 3; i < resolved.size(); ++i)
          decreasing = decreasing && *prof.infima[resolved[i]] < *prof.infima[resolved[i - 1]];
        prof.decay_detected = decreasing && *prof.infima[resolved.back()] <
                                                opts.decay_factor * *prof.infima[resolved.front()];
      }
      out.profiles.push_back(std::move(prof));
    }
  }

  for (const auto& prof : out.profiles) {
    if (!prof.decay_detected) continue;
    std::size_t last = prof.infima.size();
    while (!prof.infima[last - 1]) --last;
    out.verdict = Verdict::fail(
        Witness{prof.argmin[last - 1],
                {{"ratio", *prof.infima[last - 1]}, {"inner_radius", prof.radii[last]}}},
        {"Lyapunov ratio decays to zero at a zero of X"});
    return out;
  }

  double inf = out.grid_infimum.value_or(std::numeric_limits<double>::infinity());
  for (const auto& prof : out.profiles)
    for (const auto& v : prof.infima)
      if (v) inf = std::min(inf, *v);

  if (c1.verdict.status == Status::Inconclusive) {
    notes.insert(notes.begin(), "condition (1) is inconclusive");
    out.verdict = Verdict::inconclusive(std::move(notes));
  } else if (std::isfinite(inf) && inf >= opts.delta_floor) {
    out.verdict = Verdict::pass(inf, std::move(notes));
  } else {
    notes.push_back("ratio infimum below the floor without a monotone decay");
    out.verdict = Verdict::inconclusive(std::move(notes));
  }
  if (std::isfinite(inf)) out.verdict.values.emplace_back("infimum", inf);
  return out;
}

ForcedTensor1D forced_tensor_1d(const ScalarField& phi, const VectorField& x, const Chart& chart,
                                const CheckOptions& opts) {
  if (phi.dim() != 1 || x.dim() != 1 || chart.dim != 1)
    throw Error(ErrorCode::NotOneDimensional, "forced tensor is defined in dimension 1 only");
  const ZeroSet zeros = find_zeros(x, chart, opts.critical);
  if (zeros.non_isolated) throw Error(ErrorCode::InvalidArgument, "zeros of X are not isolated");

  const Expr dphi = diff(phi.expr(), 0);
  const Expr& xe = x.components()[0];
  auto quotient = [&](double t) -> std::optional<long double> {
    const Point p = Point::Constant(1, t);
    try {
      double num = eval(dphi, as_span(p)), den = eval(xe, as_span(p));
      if (std::fabs(den) >= DBL_MIN) return static_cast<long double>(num) / den;
      const long double nl = eval_extended(dphi, as_span(p)), dl = eval_extended(xe, as_span(p));
      if (dl == 0.0L) return std::nullopt;
      return nl / dl;
    } catch (const EvalError&) {
      return std::nullopt;
    }
  };

  ForcedTensor1D out;
  for (const auto& p : grid_points_excluding(chart, zeros.points))
    if (const auto q = quotient(p(0))) out.samples.emplace_back(p(0), static_cast<double>(*q));

  constexpr int kLevels = 21;
  for (const auto& z : zeros.points) {
    OneSidedLimits lim;
    lim.zero = z;
    for (int side : {-1, 1}) {
      std::vector<long double> seq;
      for (int k = 0; k < kLevels; ++k) {
        const double t = z(0) + side * opts.decay_r0 * std::ldexp(1.0, -k);
        if (!chart.contains(Point::Constant(1, t), 1e-12)) {
          if (seq.empty()) continue;
          break;
        }
        const auto q = quotient(t);
        if (!q) break;
        seq.push_back(*q);
      }
      std::optional<double> value;
      const std::size_t n = seq.size();
      if (n >= 4 && std::fabs(seq[n - 1]) > 1.5L * std::fabs(seq[n - 2]) &&
          std::fabs(seq[n - 2]) > 1.5L * std::fabs(seq[n - 3]) &&
          std::fabs(seq[n - 3]) > 1.5L * std::fabs(seq[n - 4])) {
        value = std::copysign(std::numeric_limits<double>::infinity(), static_cast<double>(seq[n - 1]));
      } else if (n > 0) {
        // Richardson table on the finest (up to four) samples, step ratio 2.
        const std::size_t depth = std::min<std::size_t>(n, 4);
        std::vector<long double> t(seq.end() - static_cast<long>(depth), seq.end());
        for (std::size_t j = 1; j < depth; ++j) {
          const long double f = std::ldexp(1.0L, static_cast<int>(j));
          for (std::size_t i = depth - 1; i >= j; --i) t[i] = (f * t[i] - t[i - 1]) / (f - 1.0L);
        }
        value = static_cast<double>(t[depth - 1]);
      }
      (side < 0 ? lim.left : lim.right) = value;
    }
    if (!lim.left || !lim.right) {
      lim.note = "no samples on one side of the zero";
      lim.obstruction = false;
    } else {
      const double l = *lim.left, r = *lim.right;
      lim.obstruction = !(std::isfinite(l) && std::isfinite(r) && l > 0 && r > 0) || std::fabs(l - r) > 1e-3;
      if (lim.obstruction) lim.note = "no continuous positive tensor extends across the zero";
    }
    out.obstruction = out.obstruction || lim.obstruction;
    out.limits.push_back(std::move(lim));
  }
  return out;
}

}  // namespace gradcert
