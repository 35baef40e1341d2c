#pragma once

// Batch front end: problem files, command dispatch, JSON reports and CSV
// grid export.
//
// Problem files are line-oriented `key = value` documents. `[section]`
// headers prefix the keys that follow (`[domain]` then `lo = ...` is
// `domain.lo`). Values are numbers, double-quoted expressions, bare words,
// or bracketed comma-separated arrays, which may span lines. `#` starts a
// comment outside quotes.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "gradcert/fields.hpp"
#include "gradcert/gradlike.hpp"
#include "gradcert/verdict.hpp"

namespace gradcert::cli {

using Json = nlohmann::ordered_json;

/// Malformed problem file or missing/invalid key. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProblemSpec {
  std::string source;
  std::size_t dim = 0;
  std::vector<std::string> vars;
  Chart chart;
  std::optional<ScalarField> phi;
  std::optional<VectorField> x;
  std::optional<ExprMatrix> g;
  std::optional<ExprMatrix> omega;
  std::optional<ExprMatrix> j;
  std::optional<ScalarField> phi_tilde;
  std::optional<std::size_t> steps;
  double radius = 0.5;
  CheckOptions options;

  /// Throws ConfigError naming the key when it is absent.
  void require(std::string_view key) const;
};

ProblemSpec parse_problem(std::string_view text, const std::string& source = "<input>");
ProblemSpec load_problem(const std::string& path);

struct RunOptions {
  std::optional<std::size_t> grid_n;
  std::optional<std::uint64_t> seed;
};

/// Applies --grid-n and --seed overrides.
void apply(const RunOptions& run, ProblemSpec& spec);

struct CommandResult {
  Json report;
  int exit_code = 0;
};

CommandResult cmd_check(const ProblemSpec& spec);
CommandResult cmd_certify(const ProblemSpec& spec);
CommandResult cmd_deform(const ProblemSpec& spec);
CommandResult cmd_stein(const ProblemSpec& spec);
CommandResult cmd_fixture(const std::string& name, std::optional<std::size_t> n, const RunOptions& run);

/// CSV rows `vars..., value` (scalar fields) or `vars..., <m components>`
/// over the chart grid; non-finite rows are dropped. Fields: phi, X,
/// ratio, dphi_x, g_margin. Throws Error(UnsupportedDim) for m > 3.
std::string grid_export(const ProblemSpec& spec, const std::string& field);

/// 0 pass, 1 fail, 3 inconclusive.
int exit_code(Status worst_status);

/// Serialized report: two-space indent, trailing newline.
std::string dump(const Json& report);

// Report fragments.
Json to_json(const Verdict& v);
Json to_json(const Point& p);

}  // namespace gradcert::cli
