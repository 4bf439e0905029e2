#include "rotorphonon/eigensolve.hpp"

namespace rotorphonon {

EigenResult symmetric_eigen(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw validation_error("symmetric eigensolve needs a square matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success)
    throw numerical_error("symmetric eigensolve did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

}  // namespace rotorphonon
