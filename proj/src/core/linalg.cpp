#include "gradcert/linalg.hpp"

namespace gradcert::linalg {

double min_sym_eigenvalue(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym_part(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

Eigen::VectorXd min_sym_eigenvector(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym_part(m));
  return es.eigenvectors().col(0);
}

double max_singular_value(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

double asymmetry(const Eigen::MatrixXd& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

}  // namespace gradcert::linalg
