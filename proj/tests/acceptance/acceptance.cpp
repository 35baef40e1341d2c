// Acceptance suite: one PASS/FAIL line per criterion. Tolerances are fixed
// here; the CLI is exercised as a subprocess and its JSON inspected.

#include <array>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "gradcert/cli.hpp"
#include "gradcert/errors.hpp"
#include "gradcert/fixtures.hpp"
#include "gradcert/linalg.hpp"
#include "gradcert/weinstein.hpp"

using namespace gradcert;
using Json = cli::Json;

namespace {

std::string g_cli;
std::string g_data;
std::vector<std::pair<std::string, std::string>> g_runs;  // invocation, stdout

struct Run {
  std::string out;
  int code = -1;
  Json json;
};

Run run(const std::string& args) {
  Run r;
  const std::string cmd = g_cli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  try {
    r.json = Json::parse(r.out);
  } catch (const std::exception&) {
    r.json = nullptr;
  }
  g_runs.emplace_back(args, r.out);
  return r;
}

std::string spec(const std::string& name) { return "--spec " + g_data + "/" + name; }

class Criterion {
 public:
  explicit Criterion(std::string name) : name_(std::move(name)) {}

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass_ = false;
      failures_.push_back(what);
    }
  }
  void note(const std::string& s) { notes_.push_back(s); }

  bool report() const {
    std::cout << (pass_ ? "PASS " : "FAIL ") << name_;
    if (!failures_.empty()) {
      std::cout << " | failed:";
      for (const auto& f : failures_) std::cout << " [" << f << "]";
    }
    if (!notes_.empty()) {
      std::cout << " |";
      for (const auto& n : notes_) std::cout << " " << n << ";";
    }
    std::cout << "\n";
    return pass_;
  }

 private:
  std::string name_;
  bool pass_ = true;
  std::vector<std::string> failures_;
  std::vector<std::string> notes_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

const Json& verdict(const Run& r, const std::string& name) {
  static const Json missing = Json::object();
  if (!r.json.is_object() || !r.json["verdicts"].contains(name)) return missing;
  return r.json["verdicts"][name];
}

bool status_is(const Run& r, const std::string& name, const std::string& status) {
  const Json& v = verdict(r, name);
  return v.contains("status") && v["status"] == status;
}

double sym_min(const Matrix& m) { return linalg::min_sym_eigenvalue(m); }

Point sample_ball(std::mt19937_64& rng, const Point& c, double r) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Point p(c.size());
  do {
    for (Eigen::Index i = 0; i < c.size(); ++i) p(i) = u(rng);
  } while (p.norm() > 1.0);
  return c + r * p;
}

// ---------------------------------------------------------------------------

bool ac1() {
  Criterion c("AC1 hierarchy suite");
  const Run cq = run("fixture cubic-quartic");
  c.require(status_is(cq, "condition1", "pass"), "x^3/x^4 condition1 pass");
  c.require(status_is(cq, "condition2", "fail"), "x^3/x^4 condition2 fail");
  double worst_rel = 0.0;
  bool profile_ok = cq.json.is_object() && cq.json["decay_profiles"].size() == 1;
  if (profile_ok) {
    const Json& prof = cq.json["decay_profiles"][0];
    for (int k = 2; k <= 8; ++k) {
      const double r = std::ldexp(1.0, -k);
      bool found = false;
      for (std::size_t i = 0; i + 1 < prof["radii"].size(); ++i) {
        if (std::abs(prof["radii"][i + 1].get<double>() - r) > 1e-15) continue;
        if (prof["infima"][i].is_null()) break;
        const double oracle = 3 * std::pow(r, 6) / (std::pow(r, 8) + 9 * std::pow(r, 4));
        worst_rel = std::max(worst_rel, std::abs(prof["infima"][i].get<double>() - oracle) / oracle);
        found = true;
      }
      profile_ok = profile_ok && found;
    }
  }
  c.require(profile_ok && worst_rel <= 0.25, "annulus infima within 25% of 3r^6/(r^8+9r^4), k=2..8");
  c.note("max rel dev " + fmt(worst_rel));

  const Run bump = run("fixture bump");
  const Json& c2 = verdict(bump, "condition2");
  const double margin = c2.contains("margin") && c2["margin"].is_number() ? c2["margin"].get<double>() : -1.0;
  c.require(status_is(bump, "condition2", "pass") && margin >= 0.35 && margin <= 0.55,
            "bump condition2 pass with margin in [0.35, 0.55]");
  c.note("bump margin " + fmt(margin));
  const Json& c3 = verdict(bump, "condition3");
  bool limits_ok = status_is(bump, "condition3", "fail") && c3["witness"].is_object();
  double left = NAN, right = NAN;
  if (limits_ok) {
    const Json& vals = c3["witness"]["values"];
    limits_ok = vals["left_limit"].is_number() && vals["right_limit"].is_number();
    if (limits_ok) {
      left = vals["left_limit"];
      right = vals["right_limit"];
      limits_ok = std::abs(left - 1.0) <= 1e-3 && std::abs(right - 2.0) <= 1e-3;
    }
  }
  c.require(limits_ok, "bump one-sided limits 1 and 2 (+-1e-3) with obstruction flagged");
  c.note("limits " + fmt(left) + ", " + fmt(right));

  const Run eli = run("fixture eliashberg");
  c.require(status_is(eli, "condition1", "pass") && status_is(eli, "condition2", "pass"),
            "Eliashberg condition1 and condition2 pass");
  c.require(status_is(eli, "certify", "inconclusive"), "Eliashberg certify inconclusive");
  bool origin = false;
  if (eli.json.is_object())
    for (const auto& cp : eli.json["critical_points"])
      if (cp.contains("status") && cp["status"] == "inconclusive" &&
          std::hypot(cp["location"][0].get<double>(), cp["location"][1].get<double>()) < 1e-6)
        origin = true;
  c.require(origin, "inconclusive at the origin");
  return c.report();
}

bool ac2() {
  Criterion c("AC2 delta extraction dphi(X) >= delta(|X|^2+|dphi|^2)");
  struct Case {
    std::string name;
    ScalarField phi;
    VectorField x;
    TensorField g;
    Point center;
    double radius;
    Chart chart;
  };
  std::vector<Case> cases;
  const auto rot = fixtures::rotated_gradient();
  const auto morse = construct_certificate_morse(rot.phi, rot.x, Point::Zero(2), 0.5, rot.chart);
  cases.push_back({"rotated-gradient (Morse ball)", rot.phi, rot.x, morse.g, Point::Zero(2), 0.5, rot.chart});
  const auto global = certify(rot.phi, rot.x, rot.chart);
  if (global.certificate)
    cases.push_back({"rotated-gradient (global)", rot.phi, rot.x, global.certificate->g, Point::Zero(2), 1.5, rot.chart});
  else
    c.require(false, "rotated-gradient global certificate exists");
  const auto emb = construct_certificate_embryonic(fixtures::embryonic_shear(), 0.5);
  cases.push_back({"embryonic", emb.phi, emb.x, emb.certificate.g, Point::Zero(2), 0.5, Chart::cube(2, -0.5, 0.5)});
  for (const auto& w : {fixtures::radial_plane(), fixtures::cotangent(1), fixtures::cotangent(2)})
    cases.push_back({w.name, w.structure.phi, w.structure.x, *w.structure.g, Point::Zero(w.structure.dim()),
                     2.0, w.chart});

  std::mt19937_64 rng(2);
  for (const auto& k : cases) {
    double worst = INFINITY;
    int tested = 0;
    while (tested < 200) {
      const Point p = sample_ball(rng, k.center, k.radius);
      if (!k.chart.contains(p)) continue;
      if (k.name.find("Morse") != std::string::npos || k.name == "embryonic")
        if ((p - k.center).norm() > k.radius) continue;
      const Matrix m = k.g(p);
      const double a = sym_min(m);
      const double b = linalg::max_singular_value(m);
      const double delta = a / (1 + b * b);
      const Vector xv = k.x(p);
      const Vector gv = gradient(k.phi)(p);
      worst = std::min(worst, gv.dot(xv) - delta * (xv.squaredNorm() + gv.squaredNorm()));
      ++tested;
    }
    c.require(worst >= -1e-12, k.name + " slack >= -1e-12");
    c.note(k.name + " min slack " + fmt(worst));
  }
  return c.report();
}

bool ac3() {
  Criterion c("AC3 Morse local certificate (rotated gradient)");
  const auto f = fixtures::rotated_gradient();
  const Certificate cert = construct_certificate_morse(f.phi, f.x, Point::Zero(2), 0.5, f.chart);
  c.require(cert.ball && cert.ball->radius == 0.5, "ball radius 0.5");
  c.require(cert.residual < 1e-9, "residual < 1e-9");
  c.require(cert.positivity_margin >= 0.5, "positivity margin >= 0.5");
  const double at_origin = sym_min(cert.g(Point::Zero(2)));
  c.require(std::abs(at_origin - 0.8) < 1e-12, "margin at origin equals 0.8");
  c.note("residual " + fmt(cert.residual) + ", margin " + fmt(cert.positivity_margin) + ", origin " + fmt(at_origin));
  return c.report();
}

bool ac4() {
  Criterion c("AC4 embryonic certificate (a2 = z)");
  const Run r = run("fixture embryonic");
  c.require(r.code == 0 && status_is(r, "embryonic_certificate", "pass"), "CLI fixture embryonic passes");
  const auto ec = construct_certificate_embryonic(fixtures::embryonic_shear(), 0.5);
  const Certificate& cert = ec.certificate;
  c.require(cert.residual < 1e-10, "residual < 1e-10");
  c.require(cert.positivity_margin >= 1 - 0.25 - 1e-6, "margin >= 0.75 - 1e-6");
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    const Point p = sample_ball(rng, Point::Zero(2), 0.5);
    worst = std::max(worst, std::abs(sym_min(cert.g(p)) - (1 - std::abs(p(1)) / 2)));
  }
  c.require(worst < 1e-12, "eigenvalue oracle 1 - |z|/2");
  c.note("residual " + fmt(cert.residual) + ", margin " + fmt(cert.positivity_margin) + ", oracle dev " + fmt(worst));
  return c.report();
}

bool ac5() {
  Criterion c("AC5 global certificate pipeline and blend convexity");
  const Run r = run("certify " + spec("rotated_gradient.conf"));
  c.require(r.code == 0 && status_is(r, "certify", "pass"), "CLI certify passes");
  const auto f = fixtures::rotated_gradient();
  const CertifyResult res = certify(f.phi, f.x, f.chart);
  c.require(res.status == Status::Pass && res.certificate.has_value(), "certify returns a certificate");
  if (res.certificate) {
    const Certificate again = check_certificate(f.phi, f.x, res.certificate->g, f.chart);
    c.require(again.verdict.passed() && again.residual < 1e-8 && again.positivity_margin > 0,
              "check_certificate: residual < 1e-8, margin > 0");
    c.note("residual " + fmt(again.residual) + ", margin " + fmt(again.positivity_margin));
  }

  std::mt19937_64 rng(100);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.0);
  const Chart chart = Chart::cube(2, -1, 1, 9);
  int passed = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double a1 = 1.0 + 0.5 * u(rng), a2 = 0.5 * u(rng), rot = 0.3 * u(rng);
    const ScalarField phi(2, Expr::constant(a1) * Expr::variable(0) + Expr::constant(a2) * Expr::variable(1));
    const VectorField x(2, std::vector<Expr>{Expr::constant(a1) + Expr::constant(rot) * Expr::variable(1),
                                             Expr::constant(a2) - Expr::constant(rot) * Expr::variable(0)});
    std::array<TensorField, 2> g;
    for (auto& gi : g) {
      Matrix l(2, 2), k(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          l(i, j) = n(rng);
          k(i, j) = n(rng);
        }
      const Matrix extra = l * l.transpose() + (k - k.transpose());
      gi = TensorField(2, [phi, x, extra](const Point& p) -> Matrix {
        const Vector xv = x(p);
        const Matrix proj = Matrix::Identity(2, 2) - xv * xv.transpose() / xv.squaredNorm();
        return regular_tensor(gradient(phi)(p), xv) + proj.transpose() * extra * proj;
      });
    }
    const Expr chi = Expr::constant(0.5) + Expr::constant(0.5) * sin(Expr::constant(2 * u(rng)) * Expr::variable(0) +
                                                                     Expr::constant(2 * u(rng)) * Expr::variable(1));
    try {
      const Certificate b = blend_certificates(
          phi, x, {{g[0], ScalarField(2, chi)}, {g[1], ScalarField(2, Expr::constant(1.0) - chi)}}, chart);
      if (b.verdict.passed() && b.residual < 1e-10 && b.positivity_margin > 0) ++passed;
    } catch (const Error&) {
    }
  }
  c.require(passed == 100, "blend convexity on 100 random piece pairs");
  c.note("blend pairs passing " + std::to_string(passed) + "/100");
  return c.report();
}

bool ac6() {
  Criterion c("AC6 lift of phi_t = x^2/2 + t x through g = identity");
  const Chart chart = Chart::cube(1, -2, 2, 41);
  const TensorField id(1, ExprMatrix::identity(1));
  double worst = 0.0;
  bool morse = true;
  for (int k = 0; k <= 10; ++k) {
    const double t = k / 10.0;
    const ScalarField phi(1, pow(Expr::variable(0), 2) / Expr::constant(2.0) + Expr::constant(t) * Expr::variable(0));
    const VectorField x = solve_vector_field(phi, id, chart);
    for (const auto& p : grid_points(chart)) worst = std::max(worst, std::abs(x(p)(0) - (p(0) + t)));
    const ZeroSet zs = find_zeros(gradient(phi), chart);
    morse = morse && zs.points.size() == 1 && std::abs(zs.points[0](0) + t) < 1e-12 &&
            classify(phi, zs.points[0]).kind == CriticalKind::Morse;
  }
  c.require(worst < 1e-12, "X_t = x + t to 1e-12");
  c.require(morse, "single Morse critical point at -t");
  c.note("max residual " + fmt(worst));
  return c.report();
}

bool ac7() {
  Criterion c("AC7 Weinstein deformation on the radial plane");
  const auto f = fixtures::radial_plane();
  const WeinsteinStructure& w = f.structure;
  const WeinsteinReport rep = check_weinstein(w, f.chart);
  c.require(rep.closedness_residual < 1e-10 && rep.liouville_residual && *rep.liouville_residual < 1e-10 &&
                rep.status() == Status::Pass,
            "check_weinstein residuals < 1e-10");

  const Run scale = run("deform " + spec("radial_scale.conf"));
  c.require(scale.code == 0, "CLI deform with phi~ = 1.1 phi exits 0");
  const DeformationResult d = deform(w, *w.g, ScalarField(2, Expr::constant(1.1) * w.phi.expr()), f.chart);
  double dev = 0.0;
  const OneForm lambda = w.lambda();
  for (const auto& p : grid_points(f.chart)) {
    dev = std::max(dev, (d.lambda(p) - 1.1 * lambda(p)).cwiseAbs().maxCoeff());
    dev = std::max(dev, (d.structure.omega(p) - 1.1 * w.omega(p)).cwiseAbs().maxCoeff());
    dev = std::max(dev, ((*d.structure.g)(p) - 1.1 * (*w.g)(p)).cwiseAbs().maxCoeff());
    dev = std::max(dev, (d.structure.x(p) - w.x(p)).cwiseAbs().maxCoeff());
  }
  c.require(dev < 1e-10, "scaling oracle to 1e-10");
  c.note("scaling dev " + fmt(dev));

  const Run bump = run("deform " + spec("radial_bump.conf"));
  bool all_pass = bump.json.is_object() && bump.json["deformation"].size() == 11;
  double final_margin = NAN, final_liouville = NAN;
  if (bump.json.is_object()) {
    for (const auto& step : bump.json["deformation"]) all_pass = all_pass && step["status"] == "pass";
    if (!bump.json["deformation"].empty()) {
      const Json& last = bump.json["deformation"].back();
      if (last["t"] == 1.0 && last["g_margin"].is_number()) {
        final_margin = last["g_margin"];
        final_liouville = last["liouville"];
      }
    }
  }
  c.require(all_pass, "homotopy with 11 steps all pass");
  c.require(final_liouville < 1e-8, "bump deformation Liouville residual < 1e-8");
  c.require(final_margin > 0.3, "bump deformation g~ margin > 0.3");
  c.note("bump g~ margin " + fmt(final_margin) + " (g~ = Laplacian(phi~) Id, 1 - 0.8 at the origin)");
  c.note("bump Liouville " + fmt(final_liouville));
  return c.report();
}

bool ac8() {
  Criterion c("AC8 Stein to Weinstein");
  const Run ok = run("stein " + spec("stein_standard.conf"));
  c.require(ok.code == 0, "CLI stein on (x^2+y^2)/2 exits 0");
  const Chart chart = Chart::cube(2, -1, 1, 33);
  ExprMatrix j(2, 2);
  j(0, 1) = Expr::constant(-1.0);
  j(1, 0) = Expr::constant(1.0);
  const std::vector<std::string> xy{"x", "y"};
  const SteinResult s = stein_to_weinstein(j, ScalarField(2, parse("(x^2 + y^2)/2", xy)), chart);
  const ExprMatrix& o = s.structure.omega.entries();
  c.require(o(0, 1).is_constant(-2.0) && o(1, 0).is_constant(2.0) && o(0, 0).is_constant(0.0) &&
                o(1, 1).is_constant(0.0),
            "Omega entries +-2 symbolically");
  double worst = 0.0;
  for (const auto& p : grid_points(chart)) worst = std::max(worst, (s.structure.x(p) - 0.5 * p).cwiseAbs().maxCoeff());
  c.require(worst < 1e-12, "X_phi = (x/2, y/2) to 1e-12");
  c.note("X residual " + fmt(worst));
  const Run saddle = run("stein " + spec("stein_saddle.conf"));
  c.require(saddle.code == 1 && status_is(saddle, "j_convexity", "fail"), "CLI stein on x^2 - y^2 fails J-convexity");
  bool raised = false;
  try {
    stein_to_weinstein(j, ScalarField(2, parse("x^2 - y^2", xy)), chart);
  } catch (const Error& e) {
    raised = e.code() == ErrorCode::NotJConvex;
  }
  c.require(raised, "x^2 - y^2 raises NotJConvex");
  return c.report();
}

bool ac9() {
  Criterion c("AC9 cotangent bundles");
  for (int n : {1, 2}) {
    const Run r = run("fixture cotangent " + std::to_string(n));
    c.require(r.code == 0, "CLI fixture cotangent " + std::to_string(n) + " exits 0");
    const auto f = fixtures::cotangent(n);
    const WeinsteinReport rep = check_weinstein(f.structure, f.chart);
    c.require(rep.status() == Status::Pass && rep.liouville_residual && *rep.liouville_residual < 1e-10,
              "n = " + std::to_string(n) + " passes with Liouville residual < 1e-10");
    c.note("n=" + std::to_string(n) + " Liouville " + fmt(rep.liouville_residual.value_or(NAN)));
  }
  return c.report();
}

double fd(const Expr& e, std::array<double, 2> p, std::size_t var) {
  auto central = [&](double h) {
    auto q = p;
    q[var] = p[var] + h;
    const double up = eval(e, q);
    q[var] = p[var] - h;
    return (up - eval(e, q)) / (2.0 * h);
  };
  const double d1 = central(1e-3), d2 = central(5e-4), d4 = central(2.5e-4);
  const double r1 = (4 * d2 - d1) / 3, r2 = (4 * d4 - d2) / 3;
  return (16 * r2 - r1) / 15;
}

bool ac10() {
  Criterion c("AC10 calculus bedrock");
  const std::vector<std::string> xy{"x", "y"};
  const std::vector<std::string> corpus{
      "x^2*y + 3*x - 7", "sin(x)*cos(y)", "exp(x*y)", "ln(x + y)", "sqrt(x^2 + y^2)", "x/y",
      "(x + 1)/(y^2 + 1)", "x^5 - 4*x^3*y^2 + y^4", "exp(-1/x^2)", "sin(x^2 + y)^3",
      "cos(exp(x)) + sin(ln(y))", "x^(-2) + y^(-3)", "sqrt(1 + x*y)*ln(1 + x^2)", "(x - y)^4/(1 + x^2*y^2)",
      "-x^2 - -y", "exp(sin(x))*cos(x*y)^2", "x*ln(x) - y*ln(y)", "sgncase(x - 1; exp(x)*y, exp(1)*y, exp(x)*y)",
      "1/(x + y)^2 + x^7*y", "sin(x)/x + sqrt(y)"};
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.3, 1.4);
  double worst = 0.0;
  for (const auto& src : corpus) {
    const Expr e = parse(src, xy);
    for (int k = 0; k < 50; ++k) {
      const std::array<double, 2> p{u(rng), u(rng)};
      for (std::size_t v = 0; v < 2; ++v) {
        const double exact = eval(diff(e, v), p);
        worst = std::max(worst, std::abs(exact - fd(e, p, v)) / std::max(1.0, std::abs(exact)));
      }
    }
  }
  c.require(worst < 1e-6, "symbolic vs finite difference, 20 x 50, rel err < 1e-6");
  c.note("max rel err " + fmt(worst));

  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> pw(0, 3);
  double dd = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 3 + trial % 2;
    std::vector<Expr> comps;
    for (std::size_t i = 0; i < m; ++i) {
      Expr f;
      for (int t = 0; t < 4; ++t) {
        Expr term = Expr::constant(coef(rng));
        for (std::size_t j = 0; j < m; ++j) term = term * pow(Expr::variable(j), pw(rng));
        f = f + (t == 0 ? sin(Expr::variable(trial % m)) * term : term);
      }
      comps.push_back(f);
    }
    const auto three = exterior_derivative_2(exterior_derivative_1(OneForm(m, comps)));
    for (int k = 0; k < 5; ++k) {
      Point p(m);
      for (std::size_t i = 0; i < m; ++i) p(i) = coef(rng);
      for (const auto& comp : three) dd = std::max(dd, std::abs(eval(comp.value, as_span(p))));
    }
  }
  c.require(dd < 1e-12, "d o d = 0 on 50 random one-forms to 1e-12");
  c.note("max |dd| " + fmt(dd));
  return c.report();
}

bool ac11() {
  Criterion c("AC11 determinism of CLI reports");
  const auto first = g_runs;
  std::size_t identical = 0;
  for (const auto& [args, out] : first) {
    const Run again = run(args);
    if (again.out == out && !out.empty()) ++identical;
    else c.require(false, "byte-identical: " + args);
  }
  c.note(std::to_string(identical) + "/" + std::to_string(first.size()) + " invocations byte-identical");
  return c.report();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::cerr << "usage: acceptance <gradcert-cli> <data-dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_data = argv[2];
  int failed = 0;
  for (auto* criterion : {ac1, ac2, ac3, ac4, ac5, ac6, ac7, ac8, ac9, ac10, ac11}) {
    bool ok = false;
    try {
      ok = criterion();
    } catch (const std::exception& e) {
      std::cout << "FAIL (exception) " << e.what() << "\n";
    }
    failed += !ok;
  }
  std::cout << (11 - failed) << "/11 criteria pass\n";
  return failed == 0 ? 0 : 1;
}
