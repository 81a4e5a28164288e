#ifndef ACCRETA_CG_HPP
#define ACCRETA_CG_HPP

#include <cmath>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace accreta {

template <typename Scalar>
struct CgResult {
  int iterations = 0;
  /// Final ||b - A x|| / ||b|| (0 for b = 0).
  Scalar relative_residual = 0;
  bool converged = false;
};

/**
 * Unpreconditioned conjugate gradients for symmetric positive definite A,
 * starting from the contents of x. Stops at ||r|| <= tol ||b||.
 */
template <typename Scalar>
CgResult<Scalar> conjugate_gradient(const Eigen::SparseMatrix<Scalar>& A,
                                    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& b,
                                    Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x, Scalar tol, int max_iter) {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  CgResult<Scalar> result;
  const Scalar b_norm = b.norm();
  if (b_norm == Scalar(0)) {
    x.setZero();
    result.converged = true;
    return result;
  }
  Vector r = b - A * x;
  Scalar rr = r.squaredNorm();
  const Scalar threshold = tol * b_norm;
  if (std::sqrt(rr) <= threshold) {
    result.relative_residual = std::sqrt(rr) / b_norm;
    result.converged = true;
    return result;
  }
  Vector p = r;
  Vector q(b.size());
  for (int it = 1; it <= max_iter; ++it) {
    q.noalias() = A * p;
    const Scalar alpha = rr / p.dot(q);
    x += alpha * p;
    r -= alpha * q;
    const Scalar rr_new = r.squaredNorm();
    result.iterations = it;
    if (std::sqrt(rr_new) <= threshold) {
      // Recompute the true residual so drift in the recursion cannot fake convergence.
      r = b - A * x;
      rr = r.squaredNorm();
      if (std::sqrt(rr) <= threshold) {
        result.converged = true;
        break;
      }
      p = r;
      continue;
    }
    p = r + (rr_new / rr) * p;
    rr = rr_new;
  }
  result.relative_residual = std::sqrt((b - A * x).squaredNorm()) / b_norm;
  result.converged = result.converged || result.relative_residual <= tol;
  return result;
}

}  // namespace accreta

#endif  // ACCRETA_CG_HPP
