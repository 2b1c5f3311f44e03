#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include <Eigen/SVD>

#include "walshprod/linalg.hpp"
#include "walshprod/rng.hpp"

using walshprod::CounterRng;
using walshprod::operator_norm;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  const CounterRng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = 2.0 * rng.uniform01(static_cast<std::uint64_t>(i * cols + j)) - 1.0;
  }
  return m;
}

double svd_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues().size() == 0 ? 0.0 : svd.singularValues()(0);
}

}  // namespace

TEST(OperatorNorm, Examples) {
  Eigen::MatrixXd d(2, 2);
  d << 3, 0, 0, 1;
  EXPECT_NEAR(operator_norm(d).value, 3.0, 1e-12);
  EXPECT_EQ(operator_norm(Eigen::MatrixXd::Zero(3, 4)).value, 0.0);
  Eigen::MatrixXd nil(2, 2);
  nil << 0, 2, 0, 0;
  EXPECT_NEAR(operator_norm(nil).value, 2.0, 1e-12);
  EXPECT_NEAR(operator_norm((3.0 / 16) * Eigen::MatrixXd::Identity(3, 3)).value, 0.1875, 1e-15);
}

TEST(OperatorNorm, Errors) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Ones(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(operator_norm(m), std::invalid_argument);
  m(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(operator_norm(m), std::invalid_argument);
  EXPECT_THROW(operator_norm(Eigen::MatrixXd::Ones(2, 2), 0.0), std::invalid_argument);
}

TEST(OperatorNorm, StartOrthogonalToTopSpace) {
  // Top singular vector (1,-1)/sqrt2 is orthogonal to the all-ones start.
  Eigen::MatrixXd m(2, 2);
  m << 2, -2, -2, 2;
  m += 0.5 * Eigen::MatrixXd::Ones(2, 2);
  EXPECT_NEAR(operator_norm(m).value, svd_norm(m), 1e-10);
  Eigen::MatrixXd h(4, 4);
  h << 1, 1, 1, 1, 1, -1, 1, -1, 1, 1, -1, -1, 1, -1, -1, 1;
  h.row(0) *= 0.5;  // all-ones start sees only the weakest direction
  EXPECT_NEAR(operator_norm(h).value, svd_norm(h), 1e-10);
}

TEST(OperatorNorm, AgreesWithSvd) {
  for (int t = 0; t < 40; ++t) {
    const int rows = 1 + t % 7;
    const int cols = 1 + (3 * t) % 9;
    const Eigen::MatrixXd m = random_matrix(rows, cols, static_cast<std::uint64_t>(t));
    const auto r = operator_norm(m);
    EXPECT_NEAR(r.value, svd_norm(m), 1e-9 * std::max(1.0, r.value));
    EXPECT_TRUE(r.converged);
    EXPECT_LE(r.residual, 1e-12);
  }
}

TEST(OperatorNorm, TransposeAndScaling) {
  for (int t = 0; t < 30; ++t) {
    const Eigen::MatrixXd m = random_matrix(3 + t % 5, 2 + t % 4, 100 + static_cast<std::uint64_t>(t));
    const double v = operator_norm(m).value;
    EXPECT_NEAR(operator_norm(m.transpose()).value, v, 1e-10 * v);
    for (double c : {-3.0, 0.5, 1e3}) EXPECT_NEAR(operator_norm(c * m).value, std::abs(c) * v, 1e-10 * std::abs(c) * v);
  }
}

TEST(OperatorNorm, SandwichBounds) {
  for (int t = 0; t < 50; ++t) {
    const Eigen::MatrixXd m = random_matrix(2 + t % 6, 2 + t % 5, 500 + static_cast<std::uint64_t>(t));
    const double v = operator_norm(m).value;
    const double max_col = m.colwise().norm().maxCoeff();
    const double one = m.cwiseAbs().colwise().sum().maxCoeff();
    const double inf = m.cwiseAbs().rowwise().sum().maxCoeff();
    EXPECT_GE(v, max_col * (1 - 1e-12));
    EXPECT_LE(v, std::sqrt(one * inf) * (1 + 1e-12));
  }
}

TEST(OperatorNorm, RepeatedTopSingularValue) {
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(5, 5) * 2.5;
  const auto r = operator_norm(m);
  EXPECT_NEAR(r.value, 2.5, 1e-14);
  EXPECT_TRUE(r.converged);
}
