#pragma once

#include "gradcert/cli.hpp"
#include "gradcert/weinstein.hpp"

namespace gradcert::cli {

Json to_json(const CriticalPoint& cp);
Json to_json(const Certificate& cert);
Json to_json(const DecayProfile& prof);
Json to_json(const DeformationDiagnostics& d);

/// Skeleton with every top-level key present.
Json empty_report(const std::string& command, const std::string& source, const ProblemSpec* spec);

/// Sets exit_code from the worst verdict status in report["verdicts"].
CommandResult finish(Json report);

}  // namespace gradcert::cli
