#pragma once

#include <Eigen/Dense>

namespace walshprod {

struct NormResult {
  double value = 0.0;  // largest singular value
  int iterations = 0;
  bool converged = false;
  double residual = 0.0;  // last relative change of the eigenvalue estimate
};

/// Spectral norm by power iteration on the smaller of M^T M and M M^T.
///
/// Starts from the normalized all-ones vector. If the iterate collapses to
/// zero the iteration restarts from e_1 (then e_2, ...). A second run from a
/// fixed low-discrepancy vector guards against a start vector orthogonal to
/// the top singular space; the larger estimate is returned.
/// Throws std::invalid_argument on non-finite entries or tol <= 0.
NormResult operator_norm(const Eigen::MatrixXd& m, double tol = 1e-12, int max_iter = 10000);

}  // namespace walshprod
