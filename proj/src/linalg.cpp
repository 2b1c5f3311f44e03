#include "walshprod/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace walshprod {

namespace {

struct PowerRun {
  double eigenvalue = 0.0;
  int iterations = 0;
  bool converged = false;
  bool collapsed = false;
  double residual = 0.0;
};

PowerRun power_iterate(const Eigen::MatrixXd& gram, Eigen::VectorXd v, double tol, int max_iter,
                       double floor) {
  PowerRun run;
  v.normalize();
  double previous = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Eigen::VectorXd w = gram * v;
    const double norm = w.norm();
    run.iterations = it;
    if (norm <= floor) {
      run.collapsed = true;
      return run;
    }
    const double lambda = v.dot(w);
    v = w / norm;
    run.eigenvalue = lambda;
    run.residual = std::abs(lambda - previous) / std::max(std::abs(lambda), floor);
    if (it > 1 && run.residual <= tol) {
      run.converged = true;
      return run;
    }
    previous = lambda;
  }
  return run;
}

}  // namespace

NormResult operator_norm(const Eigen::MatrixXd& m, double tol, int max_iter) {
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  if (!m.allFinite()) throw std::invalid_argument("operator_norm: matrix has non-finite entries");

  NormResult result;
  if (m.size() == 0) {
    result.converged = true;
    return result;
  }
  const Eigen::MatrixXd gram = m.rows() <= m.cols() ? Eigen::MatrixXd(m * m.transpose())
                                                    : Eigen::MatrixXd(m.transpose() * m);
  const double scale = gram.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    result.converged = true;
    return result;
  }
  const Eigen::Index k = gram.rows();
  const double floor = scale * 1e-300 > 0.0 ? scale * 1e-300 : std::numeric_limits<double>::min();

  PowerRun best;
  bool have = false;
  Eigen::VectorXd start = Eigen::VectorXd::Ones(k);
  for (Eigen::Index restart = 0; restart <= k; ++restart) {
    PowerRun run = power_iterate(gram, start, tol, max_iter, floor);
    result.iterations += run.iterations;
    if (!run.collapsed) {
      best = run;
      have = true;
      break;
    }
    if (restart == k) break;
    start = Eigen::VectorXd::Unit(k, restart);
  }

  // Confirmation run from a fractional-golden-ratio sequence, which is
  // orthogonal to no structured eigenvector we are likely to meet.
  Eigen::VectorXd generic(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    const double frac = std::fmod(static_cast<double>(i + 1) * 0.6180339887498949, 1.0);
    generic[i] = 0.5 + frac;
  }
  PowerRun check = power_iterate(gram, generic, tol, max_iter, floor);
  result.iterations += check.iterations;
  if (!check.collapsed && (!have || check.eigenvalue > best.eigenvalue * (1.0 + 1e-10))) {
    best = check;
    have = true;
  }

  if (have) {
    result.value = std::sqrt(std::max(best.eigenvalue, 0.0));
    result.converged = best.converged;
    result.residual = best.residual;
  }
  return result;
}

}  // namespace walshprod
