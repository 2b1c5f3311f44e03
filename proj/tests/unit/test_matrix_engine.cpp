#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "walshprod/errors.hpp"
#include "walshprod/linalg.hpp"
#include "walshprod/matrix_engine.hpp"

using namespace walshprod;

namespace {

// All 2^d cube points as a dataset, row i = point with negatives given by bits of i.
Dataset full_cube(int d) {
  std::vector<SignVector> rows;
  for (std::uint32_t code = 0; code < (1U << d); ++code) {
    SubsetMask neg(d);
    for (int c = 0; c < d; ++c) {
      if ((code >> c) & 1U) neg.insert(c);
    }
    rows.push_back(SignVector::from_negatives(neg));
  }
  return Dataset::from_rows(rows);
}

ProductSpec disjoint_spec(int n) {
  const SetFamily s(6, {SubsetMask(6, {0}), SubsetMask(6, {1}), SubsetMask(6, {2})});
  const SetFamily sp(6, {SubsetMask(6, {3, 4}), SubsetMask(6, {3, 5}), SubsetMask(6, {4, 5})});
  const double w = 1.0 / std::sqrt(static_cast<double>(n));
  return ProductSpec(n, {WeightedFamily::uniform(s, w), WeightedFamily::uniform(sp, w),
                         WeightedFamily::uniform(s, w)});
}

}  // namespace

TEST(ProductSpec, Validation) {
  const SetFamily f = all_subsets_of_size(3, {1});
  EXPECT_THROW(ProductSpec(0, {WeightedFamily::uniform(f, 1), WeightedFamily::uniform(f, 1)}),
               std::invalid_argument);
  EXPECT_THROW(ProductSpec(4, {WeightedFamily::uniform(f, 1)}), std::invalid_argument);
  const SetFamily g(3, {SubsetMask(3, {0}), SubsetMask(3, {0, 1})});
  EXPECT_THROW(ProductSpec(4, {WeightedFamily::uniform(f, 1), WeightedFamily::uniform(g, 1)}),
               TrivialIntersectionViolation);
  const ProductSpec p(4, {WeightedFamily::uniform(f, 1), WeightedFamily::uniform(f, 1)});
  EXPECT_EQ(p.m(), 1);
  EXPECT_EQ(p.pattern().to_string(), "{1=2}");
  EXPECT_EQ(p.hash(), ProductSpec(4, {WeightedFamily::uniform(f, 1), WeightedFamily::uniform(f, 1)}).hash());
  EXPECT_NE(p.hash(), p.with_n(5).hash());
  EXPECT_NE(p.hash(),
            ProductSpec(4, {WeightedFamily::uniform(f, 1), WeightedFamily::uniform(f, 0.5)}).hash());
}

TEST(BuildX, EmptyMonomialIsOnes) {
  const Dataset data = Dataset::sample(10, 4, 3);
  const Eigen::MatrixXd x = build_X(all_subsets_of_size(4, {0}), data);
  ASSERT_EQ(x.cols(), 1);
  EXPECT_TRUE((x.array() == 1.0).all());
}

TEST(BuildX, SingletonsReproduceData) {
  const Dataset data = Dataset::sample(20, 5, 9);
  const Eigen::MatrixXd x = build_X(all_subsets_of_size(5, {1}), data);
  for (int i = 0; i < 20; ++i) {
    for (int c = 0; c < 5; ++c) EXPECT_EQ(x(i, c), data.row(i)[c]);
  }
  EXPECT_THROW(build_X(all_subsets_of_size(4, {1}), data), DimensionMismatch);
}

TEST(BuildX, EmpiricalOrthonormality) {
  const int n = 20000;
  const Dataset data = Dataset::sample(n, 6, 21);
  const Eigen::MatrixXd x = build_X(all_subsets_of_size(6, {1}), data);
  const Eigen::MatrixXd g = x.transpose() * x / n;
  const double tol = 3.0 / std::sqrt(static_cast<double>(n));
  EXPECT_LT((g - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), tol);
}

TEST(BuildA, Scaling) {
  const Dataset data = Dataset::sample(30, 4, 1);
  const SetFamily f = all_subsets_of_size(4, {1, 2});
  EXPECT_EQ(build_A(WeightedFamily::uniform(f, 1.0), data), build_X(f, data));
  const Eigen::MatrixXd half = build_A(WeightedFamily::uniform(f, 0.5), data);
  EXPECT_TRUE((half.array().abs() == 0.5).all());
  std::vector<double> w;
  for (std::size_t k = 0; k < f.size(); ++k) w.push_back(0.1 * static_cast<double>(k + 1));
  const Eigen::MatrixXd a = build_A(WeightedFamily(f, w), data);
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    EXPECT_NEAR(a.col(c).norm(), w[static_cast<std::size_t>(c)] * std::sqrt(30.0), 1e-12);
  }
}

TEST(RealizeM, FullCubeGivesIdentity) {
  for (int d = 2; d <= 6; ++d) {
    const int n = 1 << d;
    const SetFamily f = all_subsets_of_size(d, {1, 2});
    const double w = 1.0 / std::sqrt(static_cast<double>(n));
    const ProductSpec spec(n, {WeightedFamily::uniform(f, w), WeightedFamily::uniform(f, w)});
    const Eigen::MatrixXd m = realize_M(spec, full_cube(d));
    const auto k = static_cast<Eigen::Index>(f.size());
    EXPECT_LT((m - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(RealizeM, ZeroWeightsGiveZero) {
  const SetFamily a = all_subsets_of_size(4, {1});
  const SetFamily b = all_subsets_of_size(4, {2});
  const ProductSpec spec(8, {WeightedFamily::uniform(a, 0.0), WeightedFamily::uniform(b, 1.0),
                             WeightedFamily::uniform(a, 1.0)});
  EXPECT_TRUE((realize_M(spec, Dataset::sample(8, 4, 2)).array() == 0.0).all());
}

TEST(RealizeM, AssociationOrdersAgree) {
  const SetFamily a = all_subsets_of_size(5, {1});
  const SetFamily b = all_subsets_of_size(5, {2});
  const SetFamily c = all_subsets_of_size(5, {3});
  for (int n : {3, 17, 60}) {
    const ProductSpec spec(n, {WeightedFamily::uniform(a, 0.3), WeightedFamily::uniform(b, 0.2),
                               WeightedFamily::uniform(c, 0.7), WeightedFamily::uniform(b, 0.4)});
    const Dataset data = Dataset::sample(n, 5, static_cast<std::uint64_t>(n));
    const Eigen::MatrixXd g = realize_M(spec, data, Association::Gram);
    const Eigen::MatrixXd f = realize_M(spec, data, Association::Feature);
    EXPECT_LE((g - f).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, g.cwiseAbs().maxCoeff()));
    std::vector<std::uint64_t> points;
    for (const auto& row : data.rows()) {
      std::uint64_t code = 0;
      for (int cc : row.negatives().coordinates()) code |= std::uint64_t{1} << cc;
      points.push_back(code);
    }
    const Eigen::MatrixXd ref = oracle::direct_M(spec, points);
    EXPECT_LE((g - ref).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
  }
}

TEST(RealizeM, RejectsWrongSampleCount) {
  const SetFamily a = all_subsets_of_size(3, {1});
  const ProductSpec spec(4, {WeightedFamily::uniform(a, 1), WeightedFamily::uniform(a, 1)});
  EXPECT_THROW(realize_M(spec, Dataset::sample(5, 3, 1)), DimensionMismatch);
}

TEST(MonteCarlo, DisjointFamiliesNorm) {
  const int n = 16;
  const ProductSpec spec = disjoint_spec(n);
  const MCEstimate est = mc_expected_M(spec, 2000, 7);
  const double norm = operator_norm(est.mean.values).value;
  const double se = est.std_error.norm();
  EXPECT_LE(std::abs(norm - 3.0 / n), 3.0 * se);
}

TEST(MonteCarlo, DisjointFamiliesAverageToZero) {
  const SetFamily a = all_subsets_of_size(4, {1});
  const SetFamily b = all_subsets_of_size(4, {2});
  const ProductSpec spec(10, {WeightedFamily::uniform(a, 1.0), WeightedFamily::uniform(b, 1.0)});
  const MCEstimate est = mc_expected_M(spec, 2000, 3);
  int outside = 0;
  for (Eigen::Index i = 0; i < est.mean.values.size(); ++i) {
    if (std::abs(est.mean.values(i)) > 3.0 * est.std_error(i)) ++outside;
  }
  // 24 entries; at 3 sigma the chance of more than two misses is negligible.
  EXPECT_LE(outside, 2);
}

TEST(MonteCarlo, SameFamilyUnitWeightsOverN) {
  const SetFamily a = all_subsets_of_size(4, {1, 2});
  const int n = 12;
  const ProductSpec spec(n, {WeightedFamily::uniform(a, 1.0), WeightedFamily::uniform(a, 1.0)});
  const MCEstimate est = mc_expected_M(spec, 1000, 5);
  const Eigen::MatrixXd mean = est.mean.values / n;
  const auto k = static_cast<Eigen::Index>(a.size());
  // diagonal is exactly n for every dataset
  EXPECT_LT((mean.diagonal() - Eigen::VectorXd::Ones(k)).cwiseAbs().maxCoeff(), 1e-12);
  int outside = 0;
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      if (i != j && std::abs(est.mean.values(i, j)) > 3.0 * est.std_error(i, j)) ++outside;
    }
  }
  EXPECT_LE(outside, 3);
}

TEST(MonteCarlo, Deterministic) {
  const ProductSpec spec = disjoint_spec(8);
  const MCEstimate a = mc_expected_M(spec, 50, 99);
  const MCEstimate b = mc_expected_M(spec, 50, 99);
  EXPECT_EQ(a.mean.values, b.mean.values);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_NE(a.mean.values, mc_expected_M(spec, 50, 100).mean.values);
  EXPECT_EQ(a.mean.method, Method::MonteCarlo);
  EXPECT_EQ(a.mean.trials, std::optional<int>(50));
  EXPECT_THROW(mc_expected_M(spec, 1, 1), std::invalid_argument);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeResult) {
  const ProductSpec spec = disjoint_spec(8);
  const MCEstimate one = mc_expected_M(spec, 600, 12, 1);
  for (int threads : {2, 3, 8}) {
    const MCEstimate many = mc_expected_M(spec, 600, 12, threads);
    EXPECT_EQ(one.mean.values, many.mean.values);
    EXPECT_EQ(one.std_error, many.std_error);
  }
}

TEST(MonteCarlo, CompensatedPathIsDeterministicAndAgrees) {
  const ProductSpec spec = disjoint_spec(2000);
  // n * trials = 1e6 + 2000 crosses the compensated-summation threshold.
  const MCEstimate a = mc_expected_M(spec, 501, 4, 1);
  const MCEstimate b = mc_expected_M(spec, 501, 4, 4);
  EXPECT_EQ(a.mean.values, b.mean.values);
  EXPECT_LE((a.mean.values - 3.0 / 2000 * Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff(),
            5.0 * a.std_error.maxCoeff());
}

TEST(MonteCarlo, StdErrorShrinksBySqrtTwo) {
  const ProductSpec spec = disjoint_spec(8);
  const MCEstimate small = mc_expected_M(spec, 4000, 31);
  const MCEstimate large = mc_expected_M(spec, 8000, 32);
  const double ratio = small.std_error.mean() / large.std_error.mean();
  EXPECT_NEAR(ratio, std::sqrt(2.0), 0.1 * std::sqrt(2.0));
}
