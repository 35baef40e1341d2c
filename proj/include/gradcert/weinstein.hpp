#pragma once

// Weinstein structures (omega, X, phi): validation, the deformation
// lambda~ = dphi~ o A^{-1} through the connection operator A, homotopies,
// and the Stein to Weinstein construction.

#include <optional>
#include <string>
#include <vector>

#include "gradcert/errors.hpp"
#include "gradcert/fields.hpp"
#include "gradcert/gradlike.hpp"
#include "gradcert/verdict.hpp"

namespace gradcert {

struct WeinsteinStructure {
  TwoForm omega;
  VectorField x;
  ScalarField phi;
  std::optional<TensorField> g;

  std::size_t dim() const { return phi.dim(); }
  /// Liouville form i_X omega.
  OneForm lambda() const { return interior_product(x, omega); }
};

struct WeinsteinReport {
  Verdict closed;         // |d omega| < 1e-10
  Verdict nondegenerate;  // min |det Omega| > 0
  Verdict liouville;      // |L_X omega - omega| < 1e-8
  Verdict condition3;     // supplied certificate, else the certify pipeline
  double closedness_residual = 0.0;
  double nondegeneracy_margin = 0.0;
  std::optional<double> liouville_residual;
  std::optional<Certificate> certificate;
  std::optional<CertifyResult> certify;
  std::vector<std::string> notes;

  Status status() const;
};

/// Throws OddDimension for odd m. Exhaustion of phi is not checked.
WeinsteinReport check_weinstein(const WeinsteinStructure& w, const Chart& chart,
                                const CheckOptions& opts = {});

/// A with omega(., A .) = g(., .), i.e. A = -Omega^{-1} M^T. Symbolic when
/// omega and g are symbolic and m <= 4.
class ConnectionOperator {
 public:
  ConnectionOperator(TwoForm omega, TensorField g, std::optional<ExprMatrix> symbolic);

  std::size_t dim() const { return omega_.dim(); }
  bool is_symbolic() const { return symbolic_.has_value(); }
  const ExprMatrix& entries() const;
  Matrix operator()(const Point& p) const;
  /// A^{-1} = -M^{-T} Omega.
  Matrix inverse(const Point& p) const;

 private:
  TwoForm omega_;
  TensorField g_;
  std::optional<ExprMatrix> symbolic_;
};

/// Throws Degenerate when omega is degenerate or g is not positive on the grid.
ConnectionOperator connection_operator(const TwoForm& omega, const TensorField& g, const Chart& chart);

struct DeformationDiagnostics {
  double t = 1.0;
  double lambda_consistency = 0.0;  // input: |i_X omega - dphi o A^{-1}|
  double closedness = 0.0;          // |d omega~|
  double nondegeneracy = 0.0;       // min |det Omega~|
  double liouville = 0.0;           // |d(i_X~ omega~) - omega~|
  double interior = 0.0;            // |i_X~ omega~ - lambda~|
  double gradient = 0.0;            // |g~(X~, .) - dphi~|
  double g_margin = 0.0;            // positivity margin of g~
  std::optional<Point> witness;
};

struct DeformationResult {
  WeinsteinStructure structure;  // certificate g~ attached
  OneForm lambda;                // lambda~
  DeformationDiagnostics diagnostics;
};

/// Raised by deform when the deformed data fail a diagnostic.
class DeformationError : public Error {
 public:
  DeformationError(const std::string& what, DeformationDiagnostics diagnostics);
  const DeformationDiagnostics& diagnostics() const { return diagnostics_; }

 private:
  DeformationDiagnostics diagnostics_;
};

inline constexpr double kDeformTol = 1e-8;

/// Throws DeformationError (code NotCloseEnough) when omega~ is degenerate,
/// g~ is not positive, or an identity fails by more than kDeformTol.
DeformationResult deform(const WeinsteinStructure& w, const TensorField& g, const ScalarField& phi_tilde,
                         const Chart& chart);

struct HomotopyResult {
  std::vector<DeformationResult> steps;  // passing prefix
  std::optional<double> failed_t;
  std::optional<DeformationDiagnostics> failure;
  std::string failure_message;

  bool passed() const { return !failed_t; }
};

/// deform at phi_t = (1 - t) phi + t phi~ for t = k / (steps - 1), stopping
/// at the first failure. Requires steps >= 2.
HomotopyResult homotopy(const WeinsteinStructure& w, const TensorField& g, const ScalarField& phi_tilde,
                        std::size_t steps, const Chart& chart);

struct SteinResult {
  WeinsteinStructure structure;  // certificate g_phi attached
  OneForm alpha;                 // dphi o J
  double almost_complex_residual = 0.0;
  double j_convexity_margin = 0.0;
};

/// omega_phi = -d(dphi o J), g_phi = omega_phi(., J .), X_phi from
/// g_phi(X_phi, .) = dphi. Throws NotAlmostComplex or NotJConvex.
SteinResult stein_to_weinstein(const ExprMatrix& j, const ScalarField& phi, const Chart& chart);

}  // namespace gradcert
