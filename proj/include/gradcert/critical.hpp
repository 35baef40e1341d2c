#pragma once

// Zeros of vector fields and classification of critical points.

#include <optional>
#include <vector>

#include "gradcert/fields.hpp"
#include "gradcert/verdict.hpp"

namespace gradcert {

struct CriticalTolerances {
  double newton_tol = 1e-10;  // |F| at an accepted zero
  int max_iterations = 50;
  double step_tol = 1e-8;     // last Newton step at an accepted zero
  double dedup_tol = 1e-6;
  double match_tol = 1e-5;
  double eig_zero_rel = 1e-6;  // relative to max(max |eigenvalue|, 1)
  double third_tol = 1e-8;
};

struct ZeroSet {
  std::vector<Point> points;  // canonical (lexicographic) order
  /// Set when a cluster is wider than 10x the dedup tolerance or when
  /// neighbouring zeros are joined by a segment on which F vanishes.
  bool non_isolated = false;
};

/// Multi-start Newton on F from every grid point, with the exact symbolic
/// Jacobian. Rank-deficient Jacobians use the minimum-norm step; starts with
/// a vanishing Jacobian, evaluation errors or no convergence are skipped.
ZeroSet find_zeros(const VectorField& f, const Chart& chart, const CriticalTolerances& tol = {});

enum class CriticalKind { Morse, Embryonic, Degenerate };

std::string_view to_string(CriticalKind k);

struct CriticalPoint {
  Point location;
  CriticalKind kind = CriticalKind::Degenerate;
  int index = 0;                           // Morse: count of negative eigenvalues
  std::optional<Vector> kernel_direction;  // Embryonic
  double third_derivative = 0.0;           // Embryonic
  std::vector<double> hessian_eigenvalues;  // ascending
};

/// Throws NotCritical when |grad phi(p)| >= tol.newton_tol.
CriticalPoint classify(const ScalarField& phi, const Point& p, const CriticalTolerances& tol = {});

struct ZeroSetMatch {
  Verdict verdict;
  ZeroSet critical;  // zeros of grad phi
  ZeroSet zeros;     // zeros of X
  std::vector<Point> unmatched_critical;
  std::vector<Point> unmatched_zeros;
};

/// Compares Crit(phi) with Zero(X) by two-sided matching at tol.match_tol.
/// Non-isolated zero sets make the verdict inconclusive.
ZeroSetMatch zero_sets_match(const ScalarField& phi, const VectorField& x, const Chart& chart,
                             const CriticalTolerances& tol = {});

}  // namespace gradcert
