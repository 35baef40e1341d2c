#include "gradcert/verdict.hpp"

#include <cmath>
#include <stdexcept>

namespace gradcert {

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

Status worst(Status a, Status b) {
  if (a == Status::Fail || b == Status::Fail) return Status::Fail;
  if (a == Status::Inconclusive || b == Status::Inconclusive) return Status::Inconclusive;
  return Status::Pass;
}

Verdict Verdict::pass(double margin, std::vector<std::string> notes) {
  if (!(margin > 0)) throw std::logic_error("a passing verdict needs a positive margin");
  Verdict v;
  v.status = Status::Pass;
  v.margin = margin;
  v.notes = std::move(notes);
  return v;
}

Verdict Verdict::fail(Witness witness, std::vector<std::string> notes) {
  Verdict v;
  v.status = Status::Fail;
  v.witness = std::move(witness);
  v.notes = std::move(notes);
  return v;
}

Verdict Verdict::inconclusive(std::vector<std::string> notes) {
  Verdict v;
  v.status = Status::Inconclusive;
  v.notes = std::move(notes);
  return v;
}

Verdict Verdict::below(double value, double tol, const Point& where, const std::string& what) {
  Verdict v = value < tol ? pass(tol - value) : fail(Witness{where, {{what, value}}});
  v.values.emplace_back(what, value);
  v.values.emplace_back("tolerance", tol);
  return v;
}

}  // namespace gradcert
