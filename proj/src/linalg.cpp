#include "frachs/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>
#include <sstream>

#include "frachs/errors.hpp"

namespace frachs {

ScaledCholesky::ScaledCholesky(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw DomainError("ScaledCholesky: matrix must be square");
  const Eigen::VectorXd d = A.diagonal();
  if ((d.array() <= 0.0).any()) {
    throw PreconditionError("ScaledCholesky: non-positive diagonal, matrix is not positive definite");
  }
  scale_ = d.array().rsqrt();
  const Eigen::MatrixXd S = scale_.asDiagonal() * A * scale_.asDiagonal();
  llt_.compute(S);
  if (llt_.info() != Eigen::Success) {
    throw PreconditionError("ScaledCholesky: matrix is not positive definite");
  }
}

Eigen::VectorXd ScaledCholesky::solve(const Eigen::VectorXd& b) const {
  if (b.size() != scale_.size()) throw DomainError("ScaledCholesky::solve: size mismatch");
  const Eigen::VectorXd y = llt_.solve(scale_.cwiseProduct(b));
  return scale_.cwiseProduct(y);
}

IterativeSolve conjugate_gradient(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double rel_tol,
                                  int max_iter) {
  if (A.rows() != b.size()) throw DomainError("conjugate_gradient: size mismatch");
  if ((A.diagonal().array() <= 0.0).any()) {
    throw PreconditionError("conjugate_gradient: non-positive diagonal entry");
  }
  // Symmetric Jacobi scaling done explicitly, so that the stopping test sees
  // the balanced residual rather than the rows with the largest entries.
  const Eigen::VectorXd d = A.diagonal().array().rsqrt();
  const Eigen::MatrixXd As = d.asDiagonal() * A * d.asDiagonal();
  const Eigen::VectorXd bs = d.cwiseProduct(b);
  Eigen::ConjugateGradient<Eigen::MatrixXd, Eigen::Lower | Eigen::Upper, Eigen::IdentityPreconditioner> cg;
  cg.setTolerance(rel_tol);
  cg.setMaxIterations(max_iter);
  cg.compute(As);
  const Eigen::VectorXd y = cg.solve(bs);
  const Eigen::VectorXd x = d.cwiseProduct(y);
  const double bn = bs.norm();
  const double rel = bn == 0.0 ? (As * y).norm() : (As * y - bs).norm() / bn;
  if (cg.info() != Eigen::Success || !x.allFinite()) {
    std::ostringstream os;
    os << "conjugate_gradient: no convergence after " << cg.iterations()
       << " iterations, relative residual " << rel;
    throw NumericalError(os.str(), rel);
  }
  return {x, static_cast<int>(cg.iterations()), rel};
}

double smallest_generalized_eigenvalue(const Eigen::MatrixXd& A, const Eigen::VectorXd& w) {
  if (A.rows() != w.size()) throw DomainError("smallest_generalized_eigenvalue: size mismatch");
  const Eigen::VectorXd s = w.array().rsqrt();
  const Eigen::MatrixXd S = s.asDiagonal() * A * s.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("smallest_generalized_eigenvalue: eigensolver failed");
  return es.eigenvalues()[0];
}

}  // namespace frachs
