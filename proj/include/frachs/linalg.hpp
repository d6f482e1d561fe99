#pragma once

#include <Eigen/Dense>

namespace frachs {

/// Cholesky factorization of a symmetric matrix after the diagonal scaling
/// D^{−1/2} A D^{−1/2}, D = diag(A). Assembled matrices on log grids have
/// diagonals spanning dozens of orders of magnitude; the scaling keeps the
/// factorization well conditioned.
class ScaledCholesky {
 public:
  /// Throws PreconditionError if A is not positive definite.
  explicit ScaledCholesky(const Eigen::MatrixXd& A);

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  Eigen::Index size() const { return scale_.size(); }

 private:
  Eigen::VectorXd scale_;  // D^{−1/2}
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

struct IterativeSolve {
  Eigen::VectorXd x;
  int iterations;
  double relative_residual;
};

/// Conjugate gradients on the Jacobi-scaled system D A D, D = diag(A)^{−1/2},
/// for symmetric positive definite A. Throws NumericalError if the scaled
/// `rel_tol` is not reached in `max_iter` steps.
IterativeSolve conjugate_gradient(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                                  double rel_tol = 1e-12, int max_iter = 20000);

/// Smallest eigenvalue of the pencil (A, diag(w)), w > 0.
double smallest_generalized_eigenvalue(const Eigen::MatrixXd& A, const Eigen::VectorXd& w);

}  // namespace frachs
