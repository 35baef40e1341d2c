#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gradcert/fields.hpp"

namespace gradcert {

enum class Status { Pass, Fail, Inconclusive };

std::string_view to_string(Status s);

/// Worst of two statuses under the order pass < inconclusive < fail.
Status worst(Status a, Status b);

using NamedValues = std::vector<std::pair<std::string, double>>;

struct Witness {
  Point point;
  NamedValues values;
};

/// Tri-state outcome of a grid check. A pass only speaks about the sampled
/// points; it carries kCaveat and a positive margin. A fail carries a witness.
struct Verdict {
  static constexpr const char* kCaveat = "grid-verified, not a proof";

  Status status = Status::Inconclusive;
  std::optional<Witness> witness;
  std::optional<double> margin;
  NamedValues values;  // diagnostics (residuals, counts)
  std::vector<std::string> notes;

  static Verdict pass(double margin, std::vector<std::string> notes = {});
  static Verdict fail(Witness witness, std::vector<std::string> notes = {});
  static Verdict inconclusive(std::vector<std::string> notes = {});

  /// Pass with margin = tol - value when value < tol, else a fail at `where`.
  static Verdict below(double value, double tol, const Point& where, const std::string& what);

  bool passed() const { return status == Status::Pass; }
};

}  // namespace gradcert
