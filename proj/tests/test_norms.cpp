#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "cspca/error.hpp"
#include "cspca/norms.hpp"
#include "test_util.hpp"

using namespace cspca;

TEST(L21Norm, Examples) {
  EXPECT_EQ(l21_norm(Eigen::Matrix3d::Identity()), 3.0);
  Eigen::MatrixXd a(2, 2);
  a << 3, 4, 0, 0;
  EXPECT_EQ(l21_norm(a), 5.0);
}

TEST(L21Norm, MatchesRowLoop) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd a = testutil::gaussian(4, 6, seed);
    double expect = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      double ss = 0.0;
      for (Eigen::Index j = 0; j < a.cols(); ++j) ss += a(i, j) * a(i, j);
      expect += std::sqrt(ss);
    }
    EXPECT_NEAR(l21_norm(a), expect, 1e-12 * expect);
  }
}

TEST(TraceNorm, Examples) {
  EXPECT_NEAR(trace_norm(Eigen::Matrix2d::Identity()), 2.0, 1e-15);
  EXPECT_NEAR(trace_norm(Eigen::Vector2d(3, 4).asDiagonal().toDenseMatrix()), 7.0, 1e-14);
  EXPECT_NEAR(trace_norm(Eigen::Vector2d(-3, 4).asDiagonal().toDenseMatrix()), 7.0, 1e-14);
}

TEST(TraceNorm, MatchesEigenvaluesOfAAt) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd a = testutil::gaussian(5, 5, 100 + seed);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a * a.transpose());
    const double expect = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    EXPECT_NEAR(trace_norm(a), expect, 1e-10 * expect);
  }
}

TEST(Norms, RejectNonFinite) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Ones(2, 2);
  a(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(l21_norm(a), Error);
  EXPECT_THROW(trace_norm(a), Error);
}

TEST(ResidualLoss, Examples) {
  const DataMatrix x(testutil::gaussian(3, 5, 1));
  EXPECT_EQ(residual_l21_loss(ProjectionMatrix::identity(3), x), 0.0);
  Eigen::MatrixXd v(2, 2);
  v << 3, 0, 4, 0;
  EXPECT_EQ(residual_l21_loss(ProjectionMatrix(Eigen::MatrixXd::Zero(2, 2)), DataMatrix(v)), 5.0);
}

TEST(ResidualLoss, MatchesPerSampleLoop) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd w = testutil::gaussian(4, 4, seed);
    const Eigen::MatrixXd v = testutil::gaussian(4, 9, 50 + seed);
    double expect = 0.0;
    for (Eigen::Index s = 0; s < v.cols(); ++s) {
      double ss = 0.0;
      for (Eigen::Index j = 0; j < 4; ++j) {
        double r = -v(j, s);
        for (Eigen::Index i = 0; i < 4; ++i) r += w(i, j) * v(i, s);
        ss += r * r;
      }
      expect += std::sqrt(ss);
    }
    EXPECT_NEAR(residual_l21_loss(ProjectionMatrix(w), DataMatrix(v)), expect, 1e-12 * expect);
  }
}

TEST(ResidualLoss, DimensionMismatch) {
  EXPECT_THROW(residual_l21_loss(ProjectionMatrix::identity(3), DataMatrix(Eigen::MatrixXd::Ones(2, 4))), Error);
}

TEST(Objective, IdentityAndZero) {
  const DataMatrix x(testutil::gaussian(4, 6, 3));
  const auto at_i = evaluate_objective(ProjectionMatrix::identity(4), x, 1.0, 1.0);
  EXPECT_EQ(at_i.loss, 0.0);
  EXPECT_NEAR(at_i.total, 8.0, 1e-13);
  const auto at_0 = evaluate_objective(ProjectionMatrix(Eigen::MatrixXd::Zero(4, 4)), x, 1.0, 1.0);
  EXPECT_NEAR(at_0.total, x.values().colwise().norm().sum(), 1e-12);
}

TEST(Objective, RecomposesFromParts) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ProjectionMatrix w(testutil::gaussian(5, 5, seed));
    const DataMatrix x(testutil::gaussian(5, 12, 20 + seed));
    const double alpha = 0.3 + seed, beta = 2.0 / (seed + 1);
    const auto f = evaluate_objective(w, x, alpha, beta);
    const double expect = residual_l21_loss(w, x) + alpha * l21_norm(w.values()) + beta * trace_norm(w.values());
    EXPECT_NEAR(f.total, expect, 1e-12 * expect);
    EXPECT_EQ(f.alpha, alpha);
    EXPECT_EQ(f.beta, beta);
  }
}

TEST(Objective, RequiresPositivePenalties) {
  const DataMatrix x(testutil::gaussian(2, 3, 0));
  EXPECT_THROW(evaluate_objective(ProjectionMatrix::identity(2), x, 0.0, 1.0), Error);
  EXPECT_THROW(evaluate_objective(ProjectionMatrix::identity(2), x, 1.0, -1.0), Error);
}

TEST(ProjectionMatrix, Validation) {
  EXPECT_THROW(ProjectionMatrix(Eigen::MatrixXd::Ones(2, 3)), Error);
  EXPECT_THROW(ProjectionMatrix(Eigen::MatrixXd()), Error);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Ones(2, 2);
  bad(0, 1) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(ProjectionMatrix{bad}, Error);
}
