#include <cmath>
#include <cstdio>
#include <limits>

#include "gradcert/errors.hpp"
#include "gradcert/fixtures.hpp"
#include "gradcert/linalg.hpp"
#include "report_json.hpp"

namespace gradcert::cli {

namespace {

Point witness_point(const Error& e, std::size_t dim) {
  Point p = Point::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < dim && i < e.witness().size(); ++i) p(i) = e.witness()[i];
  return p;
}

Verdict error_verdict(const Error& e, std::size_t dim) {
  Witness w{witness_point(e, dim), {}};
  for (std::size_t i = dim; i < e.witness().size(); ++i)
    w.values.emplace_back("direction_" + std::to_string(i - dim + 1), e.witness()[i]);
  return Verdict::fail(std::move(w), {e.what()});
}

void put(Json& report, const std::string& name, const Verdict& v) { report["verdicts"][name] = to_json(v); }

void put_critical(Json& report, const ScalarField& phi, const std::vector<Point>& points,
                  const CriticalTolerances& tol) {
  for (const auto& p : points) {
    try {
      report["critical_points"].push_back(to_json(classify(phi, p, tol)));
    } catch (const Error& e) {
      report["critical_points"].push_back({{"location", to_json(p)}, {"kind", nullptr}, {"note", e.what()}});
    }
  }
}

Verdict forced_tensor_verdict(const ForcedTensor1D& f) {
  for (const auto& lim : f.limits)
    if (lim.obstruction) {
      NamedValues vals;
      vals.emplace_back("left_limit", lim.left.value_or(std::nan("")));
      vals.emplace_back("right_limit", lim.right.value_or(std::nan("")));
      return Verdict::fail(Witness{lim.zero, vals}, {"forced tensor phi'/X has no positive continuous extension"});
    }
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& [x, g] : f.samples) margin = std::min(margin, g);
  for (const auto& lim : f.limits) {
    if (!lim.left || !lim.right) return Verdict::inconclusive({lim.note});
    margin = std::min({margin, *lim.left, *lim.right});
  }
  if (!(margin > 0.0) || !std::isfinite(margin)) return Verdict::inconclusive({"forced tensor is not positive on the samples"});
  return Verdict::pass(margin, {"forced tensor phi'/X extends positively across the zeros"});
}

void run_pair_checks(Json& report, const ScalarField& phi, const VectorField& x, const std::optional<TensorField>& g,
                     const Chart& chart, const CheckOptions& opts) {
  const Condition2Result c2 = check_condition2(phi, x, chart, opts);
  put(report, "zero_sets", c2.condition1.zeros.verdict);
  put(report, "condition1", c2.condition1.verdict);
  put(report, "condition2", c2.verdict);
  for (const auto& prof : c2.profiles) report["decay_profiles"].push_back(to_json(prof));
  if (!c2.condition1.zeros.critical.non_isolated)
    put_critical(report, phi, c2.condition1.zeros.critical.points, opts.critical);

  if (g) {
    const Certificate cert = check_certificate(phi, x, *g, chart, std::nullopt, opts);
    report["certificate"] = to_json(cert);
    put(report, "condition3", cert.verdict);
    if (cert.verdict.passed()) {
      put(report, "condition4", is_riemannian(*g, chart, opts));
    } else {
      Verdict v = cert.verdict;
      v.notes.push_back("the tensor does not witness condition (3)");
      put(report, "condition4", v);
    }
  } else if (phi.dim() == 1) {
    try {
      put(report, "condition3", forced_tensor_verdict(forced_tensor_1d(phi, x, chart, opts)));
    } catch (const Error& e) {
      put(report, "condition3", Verdict::inconclusive({e.what()}));
    }
  }
}

void run_certify(Json& report, const ScalarField& phi, const VectorField& x, const Chart& chart,
                 const CheckOptions& opts) {
  try {
    const CertifyResult res = certify(phi, x, chart, {}, opts);
    for (const auto& rep : res.critical_points) {
      Json cp = to_json(rep.point);
      cp["status"] = std::string(to_string(rep.status));
      cp["radius"] = rep.radius ? Json(*rep.radius) : Json(nullptr);
      cp["note"] = rep.note;
      report["critical_points"].push_back(cp);
    }
    if (res.certificate) report["certificate"] = to_json(*res.certificate);
    if (res.certificate && res.status != Status::Inconclusive) {
      put(report, "certify", res.certificate->verdict);
    } else {
      std::vector<std::string> notes = res.notes;
      for (const auto& rep : res.critical_points)
        if (!rep.note.empty()) notes.push_back(rep.note);
      put(report, "certify", Verdict::inconclusive(notes));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::Condition1Fails) throw;
    put(report, "certify", error_verdict(e, phi.dim()));
  }
}

void put_weinstein(Json& report, const std::string& prefix, const WeinsteinReport& w) {
  put(report, prefix + "closed", w.closed);
  put(report, prefix + "nondegenerate", w.nondegenerate);
  put(report, prefix + "liouville", w.liouville);
  put(report, prefix + "condition3", w.condition3);
  if (w.certificate) report["certificate"] = to_json(*w.certificate);
}

ProblemSpec fixture_spec(const std::string& source, std::vector<std::string> vars, const Chart& chart,
                         const RunOptions& run) {
  ProblemSpec spec;
  spec.source = source;
  spec.dim = chart.dim;
  spec.vars = std::move(vars);
  spec.chart = chart;
  apply(run, spec);
  return spec;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

CommandResult cmd_check(const ProblemSpec& spec) {
  spec.require("phi");
  spec.require("X");
  Json r = empty_report("check", spec.source, &spec);
  std::optional<TensorField> g;
  if (spec.g) g = TensorField(spec.dim, *spec.g);
  run_pair_checks(r, *spec.phi, *spec.x, g, spec.chart, spec.options);
  return finish(std::move(r));
}

CommandResult cmd_certify(const ProblemSpec& spec) {
  spec.require("phi");
  spec.require("X");
  Json r = empty_report("certify", spec.source, &spec);
  run_certify(r, *spec.phi, *spec.x, spec.chart, spec.options);
  return finish(std::move(r));
}

CommandResult cmd_deform(const ProblemSpec& spec) {
  for (const char* key : {"omega", "X", "phi", "g", "phi_tilde"}) spec.require(key);
  Json r = empty_report("deform", spec.source, &spec);
  const TensorField g(spec.dim, *spec.g);
  const WeinsteinStructure w{TwoForm(spec.dim, *spec.omega), *spec.x, *spec.phi, g};
  try {
    const WeinsteinReport input = check_weinstein(w, spec.chart, spec.options);
    put_weinstein(r, "input.", input);
    if (input.status() != Status::Pass) {
      put(r, "deformation", Verdict::inconclusive({"input is not a verified Weinstein structure"}));
      return finish(std::move(r));
    }
    const HomotopyResult h = homotopy(w, g, *spec.phi_tilde, spec.steps.value_or(2), spec.chart);
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& step : h.steps) {
      Json d = to_json(step.diagnostics);
      d["status"] = "pass";
      r["deformation"].push_back(d);
      margin = std::min(margin, step.diagnostics.g_margin);
    }
    if (h.failed_t) {
      Json d = to_json(*h.failure);
      d["status"] = "fail";
      d["message"] = h.failure_message;
      r["deformation"].push_back(d);
      const Point at = h.failure->witness.value_or(Point::Zero(spec.dim));
      put(r, "deformation",
          Verdict::fail(Witness{at, {{"t", *h.failed_t}, {"g_margin", h.failure->g_margin},
                                     {"nondegeneracy", h.failure->nondegeneracy}}},
                        {h.failure_message, "passing prefix: " + std::to_string(h.steps.size()) + " steps"}));
    } else {
      put(r, "deformation", Verdict::pass(margin));
    }
  } catch (const Error& e) {
    put(r, "deformation", error_verdict(e, spec.dim));
  }
  return finish(std::move(r));
}

CommandResult cmd_stein(const ProblemSpec& spec) {
  spec.require("J");
  spec.require("phi");
  Json r = empty_report("stein", spec.source, &spec);
  try {
    const SteinResult s = stein_to_weinstein(*spec.j, *spec.phi, spec.chart);
    put(r, "almost_complex", Verdict::below(s.almost_complex_residual, 1e-10, Point::Zero(spec.dim), "j_squared_residual"));
    put(r, "j_convexity", Verdict::pass(s.j_convexity_margin));
    put_weinstein(r, "weinstein.", check_weinstein(s.structure, spec.chart, spec.options));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NotAlmostComplex) put(r, "almost_complex", error_verdict(e, spec.dim));
    else if (e.code() == ErrorCode::NotJConvex) put(r, "j_convexity", error_verdict(e, spec.dim));
    else throw;
  }
  return finish(std::move(r));
}

CommandResult cmd_fixture(const std::string& name, std::optional<std::size_t> n, const RunOptions& run) {
  const std::string source = "fixture:" + name;
  auto pair_run = [&](fixtures::Pair f) {
    const ProblemSpec spec = fixture_spec(source, f.vars, f.chart, run);
    Json r = empty_report("fixture", source, &spec);
    run_pair_checks(r, f.phi, f.x, f.g, spec.chart, spec.options);
    Json scratch = empty_report("fixture", source, &spec);
    run_certify(scratch, f.phi, f.x, spec.chart, spec.options);
    r["verdicts"]["certify"] = scratch["verdicts"]["certify"];
    if (!scratch["critical_points"].empty()) r["critical_points"] = scratch["critical_points"];
    if (!scratch["certificate"].is_null()) r["certificate"] = scratch["certificate"];
    return finish(std::move(r));
  };
  if (name == "cubic-quartic") return pair_run(fixtures::cubic_quartic());
  if (name == "bump") return pair_run(fixtures::bump());
  if (name == "eliashberg") return pair_run(fixtures::eliashberg());
  if (name == "rotated-gradient") return pair_run(fixtures::rotated_gradient());
  if (name == "radial" || name == "cotangent") {
    if (name == "cotangent" && n && *n == 0) throw ConfigError("cotangent fixture needs n >= 1");
    const fixtures::Weinstein f = name == "radial" ? fixtures::radial_plane() : fixtures::cotangent(n.value_or(1));
    const ProblemSpec spec = fixture_spec(source, f.vars, f.chart, run);
    Json r = empty_report("fixture", source, &spec);
    put_weinstein(r, "", check_weinstein(f.structure, spec.chart, spec.options));
    return finish(std::move(r));
  }
  if (name == "embryonic") {
    const auto nf = fixtures::embryonic_shear();
    const ProblemSpec spec = fixture_spec(source, {"w", "z"}, Chart::cube(2, -0.5, 0.5), run);
    Json r = empty_report("fixture", source, &spec);
    try {
      const EmbryonicCertificate ec = construct_certificate_embryonic(nf, 0.5, spec.chart.n, spec.options);
      r["certificate"] = to_json(ec.certificate);
      put(r, "embryonic_certificate", ec.certificate.verdict);
    } catch (const Error& e) {
      put(r, "embryonic_certificate", error_verdict(e, 2));
    }
    return finish(std::move(r));
  }
  std::string known;
  for (const auto& s : fixtures::names()) known += (known.empty() ? "" : ", ") + s;
  throw ConfigError("unknown fixture '" + name + "' (known: " + known + ")");
}

std::string grid_export(const ProblemSpec& spec, const std::string& field) {
  const std::size_t m = spec.dim;
  if (m > 3) throw Error(ErrorCode::UnsupportedDim, "grid export supports dimension <= 3");
  std::vector<std::string> header = spec.vars;
  std::function<std::optional<Vector>(const Point&)> value;
  if (field == "phi") {
    spec.require("phi");
    header.push_back("value");
    value = [&](const Point& p) -> std::optional<Vector> { return Vector::Constant(1, (*spec.phi)(p)); };
  } else if (field == "X") {
    spec.require("X");
    for (const auto& v : spec.vars) header.push_back("X_" + v);
    value = [&](const Point& p) -> std::optional<Vector> { return (*spec.x)(p); };
  } else if (field == "ratio") {
    spec.require("phi");
    spec.require("X");
    header.push_back("value");
    value = [&](const Point& p) -> std::optional<Vector> {
      try {
        return Vector::Constant(1, lyapunov_ratio(*spec.phi, *spec.x, p));
      } catch (const Error&) {
        return std::nullopt;
      }
    };
  } else if (field == "dphi_x") {
    spec.require("phi");
    spec.require("X");
    header.push_back("value");
    const VectorField grad = gradient(*spec.phi);
    value = [&, grad](const Point& p) -> std::optional<Vector> {
      return Vector::Constant(1, grad(p).dot((*spec.x)(p)));
    };
  } else if (field == "g_margin") {
    spec.require("g");
    header.push_back("value");
    const TensorField g(m, *spec.g);
    value = [g](const Point& p) -> std::optional<Vector> {
      return Vector::Constant(1, linalg::min_sym_eigenvalue(g(p)));
    };
  } else {
    throw ConfigError("unknown export field '" + field + "' (known: phi, X, ratio, dphi_x, g_margin)");
  }

  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += "\n";
  for (const auto& p : grid_points(spec.chart)) {
    std::optional<Vector> v;
    try {
      v = value(p);
    } catch (const EvalError&) {
      continue;
    }
    if (!v || !v->allFinite()) continue;
    std::string row;
    for (Eigen::Index i = 0; i < p.size(); ++i) row += (i ? "," : "") + format_number(p(i));
    for (Eigen::Index i = 0; i < v->size(); ++i) row += "," + format_number((*v)(i));
    out += row + "\n";
  }
  return out;
}

}  // namespace gradcert::cli
