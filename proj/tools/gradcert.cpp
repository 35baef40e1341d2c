#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "gradcert/cli.hpp"
#include "gradcert/errors.hpp"
#include "gradcert/expr.hpp"

namespace {

using namespace gradcert;

void write_atomic(const std::string& path, const std::string& text) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw cli::ConfigError("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out.flush()) throw cli::ConfigError("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, target);
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty()) {
    std::cout << text << std::flush;
  } else {
    write_atomic(out_path, text);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gradient-like vector field checks, certificates and Weinstein deformations"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_path;
  cli::RunOptions run;
  std::string field;
  std::string fixture_name;
  std::optional<std::size_t> fixture_n;

  auto common = [&](CLI::App* sub, bool needs_spec) {
    auto* opt = sub->add_option("--spec", spec_path, "problem file");
    if (needs_spec) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "write the report here instead of stdout");
    sub->add_option("--grid-n", run.grid_n, "lattice points per axis");
    sub->add_option("--seed", run.seed, "seed for randomized sampling");
  };

  auto* check = app.add_subcommand("check", "verify conditions (1)-(4)");
  auto* certify = app.add_subcommand("certify", "assemble a global tensor certificate");
  auto* deform = app.add_subcommand("deform", "deform a Weinstein structure to a new Lyapunov function");
  auto* stein = app.add_subcommand("stein", "Weinstein structure of a J-convex function");
  auto* fixture = app.add_subcommand("fixture", "run a built-in fixture");
  auto* exporter = app.add_subcommand("export", "CSV grid of a field");
  for (auto* sub : {check, certify, deform, stein, exporter}) common(sub, true);
  common(fixture, false);
  fixture->add_option("name", fixture_name, "fixture name")->required();
  fixture->add_option("n", fixture_n, "cotangent degrees of freedom");
  exporter->add_option("--field", field, "phi, X, ratio, dphi_x or g_margin")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fixture->parsed()) {
      const auto res = cli::cmd_fixture(fixture_name, fixture_n, run);
      emit(out_path, cli::dump(res.report));
      return res.exit_code;
    }
    cli::ProblemSpec spec = cli::load_problem(spec_path);
    cli::apply(run, spec);
    if (exporter->parsed()) {
      emit(out_path, cli::grid_export(spec, field));
      return 0;
    }
    cli::CommandResult res;
    if (check->parsed()) res = cli::cmd_check(spec);
    else if (certify->parsed()) res = cli::cmd_certify(spec);
    else if (deform->parsed()) res = cli::cmd_deform(spec);
    else res = cli::cmd_stein(spec);
    emit(out_path, cli::dump(res.report));
    return res.exit_code;
  } catch (const cli::ConfigError& e) {
    std::cerr << "gradcert: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "gradcert: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "gradcert: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "gradcert: " << e.what() << "\n";
    return 2;
  }
}
