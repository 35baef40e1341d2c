#pragma once

#include <optional>
#include <vector>

#include "gradcert/fields.hpp"

namespace gradcert::detail {

/// dphi(X) and |X|^2 + |dphi|^2 at a point, both divided by s^2 where s is
/// the largest component of grad phi and X. Long double evaluation is used
/// when the double values underflow and X is symbolic.
struct PairSample {
  long double dot = 0.0L;
  long double denom = 0.0L;
  long double scale = 0.0L;
  bool grad_zero = false;
  bool x_zero = false;

  bool both_zero() const { return grad_zero && x_zero; }
  long double ratio() const { return dot / denom; }
  long double raw_dot() const { return dot * scale * scale; }
};

class PairEvaluator {
 public:
  PairEvaluator(const ScalarField& phi, const VectorField& x);

  PairSample operator()(const Point& p) const;
  Vector grad(const Point& p) const;

 private:
  std::vector<Expr> grad_;
  VectorField x_;
};

}  // namespace gradcert::detail
