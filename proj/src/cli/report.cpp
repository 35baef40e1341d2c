#include <cmath>

#include "report_json.hpp"

namespace gradcert::cli {

namespace {

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace

Json to_json(const Point& p) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(number(p(i)));
  return a;
}

Json to_json(const Verdict& v) {
  Json j;
  j["status"] = std::string(to_string(v.status));
  j["margin"] = v.margin ? number(*v.margin) : Json(nullptr);
  if (v.witness) {
    Json w;
    w["point"] = to_json(v.witness->point);
    Json vals = Json::object();
    for (const auto& [k, x] : v.witness->values) vals[k] = number(x);
    w["values"] = vals;
    j["witness"] = w;
  } else {
    j["witness"] = nullptr;
  }
  Json vals = Json::object();
  for (const auto& [k, x] : v.values) vals[k] = number(x);
  j["values"] = vals;
  j["notes"] = v.notes;
  j["caveat"] = Verdict::kCaveat;
  return j;
}

Json to_json(const CriticalPoint& cp) {
  Json j;
  j["location"] = to_json(cp.location);
  j["kind"] = std::string(to_string(cp.kind));
  j["index"] = cp.kind == CriticalKind::Morse ? Json(cp.index) : Json(nullptr);
  Json eig = Json::array();
  for (double e : cp.hessian_eigenvalues) eig.push_back(number(e));
  j["eigenvalues"] = eig;
  if (cp.kind == CriticalKind::Embryonic) {
    j["kernel_direction"] = to_json(*cp.kernel_direction);
    j["third_derivative"] = number(cp.third_derivative);
  }
  return j;
}

Json to_json(const Certificate& cert) {
  Json j;
  j["residual"] = number(cert.residual);
  j["positivity_margin"] = number(cert.positivity_margin);
  j["scale"] = number(cert.scale);
  j["samples"] = cert.samples;
  if (cert.ball) {
    j["region"] = {{"type", "ball"}, {"center", to_json(cert.ball->center)}, {"radius", number(cert.ball->radius)}};
  } else {
    j["region"] = {{"type", "chart"}};
  }
  j["status"] = std::string(to_string(cert.verdict.status));
  return j;
}

Json to_json(const DecayProfile& prof) {
  Json j;
  j["center"] = to_json(prof.center);
  Json radii = Json::array();
  for (double r : prof.radii) radii.push_back(number(r));
  j["radii"] = radii;
  Json inf = Json::array();
  for (const auto& v : prof.infima) inf.push_back(v ? number(*v) : Json(nullptr));
  j["infima"] = inf;
  j["samples"] = prof.samples;
  j["decay_detected"] = prof.decay_detected;
  return j;
}

Json to_json(const DeformationDiagnostics& d) {
  Json j;
  j["t"] = number(d.t);
  j["lambda_consistency"] = number(d.lambda_consistency);
  j["closedness"] = number(d.closedness);
  j["nondegeneracy"] = number(d.nondegeneracy);
  j["liouville"] = number(d.liouville);
  j["interior"] = number(d.interior);
  j["gradient"] = number(d.gradient);
  j["g_margin"] = number(d.g_margin);
  j["witness"] = d.witness ? to_json(*d.witness) : Json(nullptr);
  return j;
}

Json empty_report(const std::string& command, const std::string& source, const ProblemSpec* spec) {
  Json task;
  task["command"] = command;
  task["source"] = source;
  if (spec) {
    task["dim"] = spec->dim;
    task["vars"] = spec->vars;
    task["domain"] = {{"lo", spec->chart.lo}, {"hi", spec->chart.hi}};
    task["grid_n"] = grid_resolution(spec->chart);
    task["grid_reduced"] = grid_is_reduced(spec->chart);
    task["seed"] = spec->options.seed;
  }
  Json r;
  r["task"] = task;
  r["verdicts"] = Json::object();
  r["critical_points"] = Json::array();
  r["certificate"] = nullptr;
  r["deformation"] = Json::array();
  r["decay_profiles"] = Json::array();
  return r;
}

int exit_code(Status s) {
  switch (s) {
    case Status::Pass: return 0;
    case Status::Fail: return 1;
    case Status::Inconclusive: return 3;
  }
  return 3;
}

CommandResult finish(Json report) {
  Status s = Status::Pass;
  for (const auto& [name, v] : report["verdicts"].items()) {
    const std::string st = v["status"];
    if (st == "fail") s = worst(s, Status::Fail);
    if (st == "inconclusive") s = worst(s, Status::Inconclusive);
  }
  CommandResult out;
  out.exit_code = exit_code(s);
  out.report = std::move(report);
  return out;
}

std::string dump(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace gradcert::cli
