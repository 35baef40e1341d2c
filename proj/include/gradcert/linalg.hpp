#pragma once

// Small dense helpers on top of Eigen.

#include <Eigen/Dense>

namespace gradcert::linalg {

inline Eigen::MatrixXd sym_part(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

/// Smallest eigenvalue of the symmetric part: the positivity margin of the
/// bilinear form v -> <M v, v> on unit vectors.
double min_sym_eigenvalue(const Eigen::MatrixXd& m);

/// Eigenvector for min_sym_eigenvalue.
Eigen::VectorXd min_sym_eigenvector(const Eigen::MatrixXd& m);

double max_singular_value(const Eigen::MatrixXd& m);

/// max_ij |M - M^T|.
double asymmetry(const Eigen::MatrixXd& m);

}  // namespace gradcert::linalg
