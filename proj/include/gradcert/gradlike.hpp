#pragma once

// Checks of the four gradient-like conditions for a pair (X, phi) on a box
// chart, and explicit construction of positive (2,0)-tensor certificates:
//
//   (1) dphi(X) > 0 outside Zero(X) = Crit(phi)
//   (2) dphi(X) >= delta (|X|^2 + |dphi|^2) for a positive function delta
//   (3) dphi = g(X, .) for a positive, not necessarily symmetric, tensor g
//   (4) X = grad_g phi for a Riemannian metric g
//
// (4) => (3) => (2) => (1). Every check samples a grid; a pass is never a
// proof.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gradcert/critical.hpp"
#include "gradcert/fields.hpp"
#include "gradcert/verdict.hpp"

namespace gradcert {

struct CheckOptions {
  CriticalTolerances critical;
  double delta_floor = 1e-4;
  double residual_tol = 1e-8;  // relative to max(1, max |grad phi|)
  double symmetry_tol = 1e-10;
  double partition_tol = 1e-10;
  double decay_factor = 1e-3;
  double decay_r0 = 0.5;
  int decay_levels = 8;  // K: radii r0 * 2^-k for k = 0..K
  int annulus_samples = 64;
  std::uint64_t seed = 0;  // annulus directions in dimension >= 3
  double certify_radius = 0.5;
};

struct Ball {
  Point center;
  double radius = 0.0;
};

/// Sample points of a region: the chart lattice, or for a ball a lattice of
/// the same resolution on its bounding cube, clipped to the ball and chart.
std::vector<Point> region_points(const Chart& chart, const std::optional<Ball>& ball);

// ---------------------------------------------------------------------------
// Conditions (1) and (2)

struct Condition1Result {
  Verdict verdict;
  ZeroSetMatch zeros;
  std::vector<Point> common_zeros;
};

Condition1Result check_condition1(const ScalarField& phi, const VectorField& x,
                                  const Chart& chart, const CheckOptions& opts = {});

/// dphi(X) / (|X|^2 + |dphi|^2) with Euclidean norms. Throws ZeroDenominator
/// when X and dphi both vanish at p.
double lyapunov_ratio(const ScalarField& phi, const VectorField& x, const Point& p);

/// Annulus infima of the Lyapunov ratio around one zero.
struct DecayProfile {
  Point center;
  std::vector<double> radii;                  // r0 * 2^-k, k = 0..K
  std::vector<std::optional<double>> infima;  // annulus k: radii[k+1] <= |z - c| <= radii[k]
  std::vector<Point> argmin;                  // sample attaining each infimum
  std::vector<int> samples;                   // valid samples per annulus
  bool decay_detected = false;
};

struct Condition2Result {
  Verdict verdict;
  Condition1Result condition1;
  std::optional<double> grid_infimum;
  std::vector<DecayProfile> profiles;
};

Condition2Result check_condition2(const ScalarField& phi, const VectorField& x,
                                  const Chart& chart, const CheckOptions& opts = {});

// ---------------------------------------------------------------------------
// Condition (3) and (4)

/// A tensor field witnessing dphi = g(X, .) on a region, with its measured
/// residual max |M X - grad phi|_inf and positivity margin
/// min lambda_min((M + M^T) / 2).
struct Certificate {
  TensorField g;
  std::optional<Ball> ball;  // empty: the whole chart
  double residual = 0.0;
  double positivity_margin = 0.0;
  double scale = 1.0;  // max(1, max |grad phi|_inf)
  std::size_t samples = 0;
  Verdict verdict;
};

Certificate check_certificate(const ScalarField& phi, const VectorField& x, const TensorField& g,
                              const Chart& chart, const std::optional<Ball>& ball = std::nullopt,
                              const CheckOptions& opts = {});

Verdict is_riemannian(const TensorField& g, const Chart& chart, const CheckOptions& opts = {});

struct DeltaBound {
  double a = 0.0;      // lambda_min of the symmetric part
  double b = 0.0;      // operator norm of M
  double delta = 0.0;  // a / (1 + b^2)
  double slack = 0.0;  // dphi(X) - delta (|X|^2 + |dphi|^2) at p
};

/// Lyapunov function extracted from a certificate at p. Throws NotPositive
/// when the symmetric part of M(p) is not positive definite.
DeltaBound delta_from_certificate(const ScalarField& phi, const VectorField& x,
                                  const TensorField& g, const Point& p);

/// The vector field determined by phi and a positive tensor: M(p) X = grad phi.
/// Symbolic when g is constant (adjugate, m <= 4), otherwise numeric.
/// Throws SingularTensor when g is not positive on the chart grid.
VectorField solve_vector_field(const ScalarField& phi, const TensorField& g, const Chart& chart);

// ---------------------------------------------------------------------------
// Certificate construction

/// Local certificate at a Morse critical point p. With the Hadamard factors
///   X(z) = A(z)(z - p),   grad phi(z) = H(z)(z - p),
///   A = int_0^1 DX(p + t(z - p)) dt,   H = int_0^1 Hess phi(p + t(z - p)) dt,
/// M(z) = H(z) A(z)^{-1} solves M X = grad phi. The radius is halved (up to
/// six times) until M is positive on the ball.
Certificate construct_certificate_morse(const ScalarField& phi, const VectorField& x,
                                        const Point& p, double radius, const Chart& chart,
                                        const CheckOptions& opts = {});

/// Input of the embryonic construction, in normal-form coordinates
/// Z = (w, z) in R^{m-1} x R:
///   phi = <B w, w>/2 + c z^3/3,   X = (A(Z) w, a1(Z) z^2 + a2(Z) . w).
struct EmbryonicNormalForm {
  Matrix b;        // (m-1) x (m-1), symmetric invertible
  double c = 1.0;  // > 0
  ExprMatrix a;    // (m-1) x (m-1), A(0) invertible
  Expr a1;         // a1(0) = 1
  std::vector<Expr> a2;  // m-1 entries, a2(0) = 0

  std::size_t dim() const { return b.rows() + 1; }
  ScalarField phi() const;
  VectorField x() const;
};

struct EmbryonicCertificate {
  ScalarField phi;
  VectorField x;
  Certificate certificate;
};

/// Lower block-triangular tensor
///   [ B A^{-1}                 0        ]
///   [ -g22 a2 A^{-1}     g22 = c / a1   ]
/// on a ball around the origin, shrunk until positive.
EmbryonicCertificate construct_certificate_embryonic(const EmbryonicNormalForm& nf, double radius,
                                                     std::size_t n = 33,
                                                     const CheckOptions& opts = {});

/// M0 = grad phi grad phi^T / s + P^T P with s = dphi(X) and
/// P = I - X grad phi^T / s. Symmetric positive definite with M0 X = grad phi.
/// Throws NotTransverse when s <= 0.
Matrix regular_tensor(const Vector& grad_phi, const Vector& x);
Matrix construct_certificate_regular(const ScalarField& phi, const VectorField& x, const Point& p);

struct BlendPiece {
  TensorField g;
  ScalarField cutoff;
};

/// Partition-of-unity blend M = sum chi_i M_i. Each piece is validated on
/// the grid points where its cutoff is positive.
Certificate blend_certificates(const ScalarField& phi, const VectorField& x,
                               const std::vector<BlendPiece>& pieces, const Chart& chart,
                               const CheckOptions& opts = {});

/// 1 on |z - c| <= r/2, 0 on |z - c| >= r, quintic smoothstep in between.
ScalarField ball_cutoff(std::size_t dim, const Point& center, double radius);

struct LocalCertificate {
  Point center;
  Certificate certificate;
};

struct CriticalReport {
  CriticalPoint point;
  Status status = Status::Inconclusive;
  std::optional<double> radius;
  std::string note;
};

struct CertifyResult {
  Status status = Status::Inconclusive;
  std::optional<Certificate> certificate;
  std::vector<CriticalReport> critical_points;
  Condition1Result condition1;
  std::vector<std::string> notes;
};

/// Global certificate: Morse pieces at critical points, the regular tensor
/// elsewhere, blended by smoothstep cutoffs. Embryonic and degenerate points
/// need a supplied local certificate, otherwise the result is inconclusive.
/// Throws Condition1Fails (witness attached) when condition (1) fails.
CertifyResult certify(const ScalarField& phi, const VectorField& x, const Chart& chart,
                      const std::vector<LocalCertificate>& local = {},
                      const CheckOptions& opts = {});

// ---------------------------------------------------------------------------
// One-dimensional obstruction

struct OneSidedLimits {
  Point zero;
  std::optional<double> left;   // +-inf when the quotient diverges
  std::optional<double> right;
  bool obstruction = false;
  std::string note;
};

struct ForcedTensor1D {
  std::vector<std::pair<double, double>> samples;  // (x, phi'/X) off zeros
  std::vector<OneSidedLimits> limits;
  bool obstruction = false;
};

/// In dimension 1, g = phi'/X is forced off Zero(X). Limits at each zero are
/// Richardson-extrapolated from x = z +- r0 2^-k; an obstruction to (3) is
/// flagged when they differ by more than 1e-3, diverge, or are not positive.
ForcedTensor1D forced_tensor_1d(const ScalarField& phi, const VectorField& x, const Chart& chart,
                                const CheckOptions& opts = {});

}  // namespace gradcert
