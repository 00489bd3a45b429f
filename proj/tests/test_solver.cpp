#include <gtest/gtest.h>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "cspca/error.hpp"
#include "cspca/solver.hpp"
#include "test_util.hpp"

using namespace cspca;

namespace {

SolverConfig config(double alpha, double beta) {
  SolverConfig c;
  c.alpha = alpha;
  c.beta = beta;
  return c;
}

}  // namespace

TEST(Residual, Examples) {
  const DataMatrix x(testutil::gaussian(3, 4, 1));
  EXPECT_EQ(compute_residual(ProjectionMatrix::identity(3), x), Eigen::MatrixXd::Zero(4, 3));
  const Eigen::MatrixXd e = compute_residual(ProjectionMatrix(Eigen::MatrixXd::Zero(3, 3)), x);
  for (Eigen::Index i = 0; i < 4; ++i) {
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_EQ(e(i, j), -x.values()(j, i));
  }
}

TEST(Residual, MatchesTripleLoop) {
  const Eigen::MatrixXd w = testutil::gaussian(4, 4, 2);
  const DataMatrix x(testutil::gaussian(4, 6, 3));
  const Eigen::MatrixXd e = compute_residual(ProjectionMatrix(w), x);
  for (Eigen::Index s = 0; s < 6; ++s) {
    for (Eigen::Index j = 0; j < 4; ++j) {
      double v = -x.values()(j, s);
      for (Eigen::Index i = 0; i < 4; ++i) v += w(i, j) * x.values()(i, s);
      EXPECT_NEAR(e(s, j), v, 1e-13);
    }
  }
}

TEST(D1, Examples) {
  Eigen::MatrixXd e(2, 2);
  e << 3, 4, 0, 0;
  const Eigen::VectorXd d1 = compute_D1(e, 1e-8);
  EXPECT_DOUBLE_EQ(d1(0), 0.1);
  EXPECT_DOUBLE_EQ(d1(1), 5e7);
  Eigen::MatrixXd unit(3, 2);
  unit << 1, 0, 0, 1, 0.6, 0.8;
  EXPECT_TRUE(compute_D1(unit, 1e-8).isApprox(Eigen::Vector3d::Constant(0.5)));
}

TEST(D1D2, MatchLoopOracle) {
  Eigen::MatrixXd e = testutil::gaussian(7, 3, 4);
  e.row(2).setZero();
  const Eigen::VectorXd d1 = compute_D1(e, 1e-6);
  Eigen::MatrixXd w = testutil::gaussian(5, 5, 5);
  w.row(3).setZero();
  const Eigen::VectorXd d2 = compute_D2(ProjectionMatrix(w), 1e-6);
  auto oracle = [](const Eigen::MatrixXd& m, Eigen::Index i) {
    double ss = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) ss += m(i, j) * m(i, j);
    return 1.0 / (2.0 * std::max(std::sqrt(ss), 1e-6));
  };
  for (Eigen::Index i = 0; i < 7; ++i) EXPECT_NEAR(d1(i), oracle(e, i), 1e-12 * oracle(e, i));
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_NEAR(d2(i), oracle(w, i), 1e-12 * oracle(w, i));
}

TEST(D2, Examples) {
  EXPECT_TRUE(compute_D2(ProjectionMatrix::identity(4), 1e-8).isApprox(Eigen::Vector4d::Constant(0.5)));
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(4, 4);
  w.row(3).setZero();
  EXPECT_DOUBLE_EQ(compute_D2(ProjectionMatrix(w), 1e-8)(3), 5e7);
}

TEST(D3, Examples) {
  EXPECT_TRUE(compute_D3(ProjectionMatrix::identity(3), 1e-8).isApprox(0.5 * Eigen::Matrix3d::Identity(), 1e-14));
  Eigen::MatrixXd expect = Eigen::Vector2d(0.25, 1.0 / 6.0).asDiagonal();
  EXPECT_TRUE(compute_D3(ProjectionMatrix(Eigen::Vector2d(2, 3).asDiagonal().toDenseMatrix()), 1e-8).isApprox(expect, 1e-14));
}

TEST(D3, MultipliesBackToIdentity) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Eigen::MatrixXd w = testutil::gaussian(5, 5, 10 + seed) + 3.0 * Eigen::MatrixXd::Identity(5, 5);
    // (W W^T)^{1/2} = U S U^T from the SVD of W.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeFullU);
    const Eigen::MatrixXd root = svd.matrixU() * svd.singularValues().asDiagonal() * svd.matrixU().transpose();
    const Eigen::MatrixXd prod = compute_D3(ProjectionMatrix(w), 1e-8) * (2.0 * root);
    EXPECT_LE((prod - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(UpdateW, ZeroPenaltyWeightsGiveIdentity) {
  const DataMatrix x(testutil::gaussian(4, 10, 6));
  const Eigen::VectorXd d1 = Eigen::VectorXd::Constant(10, 0.5);
  const auto w = update_W(x, d1, Eigen::VectorXd::Zero(4), Eigen::MatrixXd::Zero(4, 4), 1.0, 1.0);
  EXPECT_LE((w.values() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(UpdateW, HugePenaltiesShrinkToZero) {
  const DataMatrix x(testutil::gaussian(4, 10, 7));
  const auto w = update_W(x, Eigen::VectorXd::Constant(10, 0.5), Eigen::VectorXd::Constant(4, 0.5),
                          0.5 * Eigen::MatrixXd::Identity(4, 4), 1e12, 1e12);
  EXPECT_LE(w.values().norm(), 1e-6);
}

TEST(UpdateW, MatchesGeneralLinearSolve) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DataMatrix x(testutil::gaussian(6, 15, 30 + seed));
    const Eigen::VectorXd d1 = testutil::gaussian(15, 1, 40 + seed).cwiseAbs().array() + 0.1;
    const Eigen::VectorXd d2 = testutil::gaussian(6, 1, 50 + seed).cwiseAbs().array() + 0.1;
    const Eigen::MatrixXd g = testutil::gaussian(6, 6, 60 + seed);
    const Eigen::MatrixXd d3 = g * g.transpose() + Eigen::MatrixXd::Identity(6, 6);
    const double alpha = 0.7, beta = 1.3;
    const auto w = update_W(x, d1, d2, d3, alpha, beta);
    const Eigen::MatrixXd a = x.values() * d1.asDiagonal() * x.values().transpose();
    const Eigen::MatrixXd m = a + alpha * Eigen::MatrixXd(d2.asDiagonal()) + beta * d3;
    const Eigen::MatrixXd expect = m.partialPivLu().solve(a);
    EXPECT_LE((w.values() - expect).cwiseAbs().maxCoeff(), 1e-10 * std::max(1.0, expect.cwiseAbs().maxCoeff()));
    EXPECT_LE((m * w.values() - a).norm(), 1e-8 * a.norm());
  }
}

TEST(Solve, DuplicateColumnsBeatIdentity) {
  Eigen::MatrixXd v(3, 2);
  v.col(0) = Eigen::Vector3d(1.0, -2.0, 0.5);
  v.col(1) = v.col(0);
  const DataMatrix x(v);
  const auto res = solve(x, config(1e-6, 1e-6));
  const double at_solution = res.trace.objectives.back().total;
  const double at_identity = evaluate_objective(ProjectionMatrix::identity(3), x, 1e-6, 1e-6).total;
  EXPECT_NEAR(at_identity, 6e-6, 1e-18);
  EXPECT_LE(at_solution, at_identity);
  EXPECT_LE(res.trace.objectives.back().loss, 1e-5);
}

TEST(Solve, IdentityAndRandomInitAgree) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const DataMatrix x(testutil::centered_gaussian(6, 30, 70 + seed));
    auto c = config(1.0, 1.0);
    c.max_iter = 200;
    const double a = solve(x, c).trace.objectives.back().total;
    c.init = init::RandomGaussian{7};
    const double b = solve(x, c).trace.objectives.back().total;
    EXPECT_NEAR(a, b, 1e-5 * std::abs(a));
  }
}

TEST(Solve, ZeroToleranceRunsToLimit) {
  const DataMatrix x(testutil::centered_gaussian(4, 20, 8));
  auto c = config(1.0, 1.0);
  c.tol = 0.0;
  c.max_iter = 5;
  const auto res = solve(x, c);
  EXPECT_EQ(res.trace.iterations, 5);
  EXPECT_EQ(res.trace.objectives.size(), 6u);
  EXPECT_EQ(res.trace.stop_reason, StopReason::MaxIterations);
  EXPECT_FALSE(res.trace.converged);
}

TEST(Solve, MonotoneDescentOnRandomProblems) {
  cspca::Rng rng(2024);
  const double penalties[] = {0.01, 1.0, 100.0};
  for (int t = 0; t < 24; ++t) {
    const auto d = static_cast<Eigen::Index>(3 + rng.below(18));
    const auto n = static_cast<Eigen::Index>(5 + rng.below(46));
    const DataMatrix x(testutil::centered_gaussian(d, n, 1000 + t));
    auto c = config(penalties[rng.below(3)], penalties[rng.below(3)]);
    c.max_iter = 200;
    const auto res = solve(x, c);
    const auto& f = res.trace.objectives;
    for (std::size_t i = 1; i < f.size(); ++i) {
      EXPECT_LE(f[i].total, f[i - 1].total + 1e-9 * std::max(1.0, std::abs(f[i - 1].total)))
          << "problem " << t << " (d=" << d << ", n=" << n << ") iteration " << i;
    }
    if (res.trace.converged) {
      EXPECT_LE(stationarity_residual(res.w, x, c.alpha, c.beta, c.epsilon), 1e-5) << "problem " << t;
    }
  }
}

TEST(Solve, StationaryAtConvergence) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const DataMatrix x(testutil::centered_gaussian(5, 25, 300 + seed));
    const auto res = solve(x, config(seed % 2 ? 0.5 : 5.0, seed % 3 ? 2.0 : 0.2));
    ASSERT_TRUE(res.trace.converged) << "seed " << seed;
    EXPECT_LE(res.trace.stationarity, 1e-5);
    EXPECT_NEAR(res.trace.stationarity, stationarity_residual(res.w, x, res.config_echo.alpha, res.config_echo.beta, 1e-8),
                1e-15);
  }
}

TEST(Solve, PenaltyMonotonicity) {
  const DataMatrix x(testutil::centered_gaussian(6, 30, 99));
  auto c = config(1.0, 1.0);
  c.tol = 1e-12;
  c.stationarity_tol = 1e-9;
  c.max_iter = 500;
  double prev = std::numeric_limits<double>::infinity();
  for (double alpha : {0.5, 2.0, 8.0}) {
    c.alpha = alpha;
    const double l21 = l21_norm(solve(x, c).w.values());
    EXPECT_LE(l21, prev + 1e-8) << "alpha " << alpha;
    prev = l21;
  }
  c.alpha = 1.0;
  prev = std::numeric_limits<double>::infinity();
  for (double beta : {0.5, 2.0, 8.0}) {
    c.beta = beta;
    const double tn = trace_norm(solve(x, c).w.values());
    EXPECT_LE(tn, prev + 1e-8) << "beta " << beta;
    prev = tn;
  }
}

TEST(Solve, DeterministicTrace) {
  const DataMatrix x(testutil::centered_gaussian(5, 20, 12));
  auto c = config(1.0, 1.0);
  c.init = init::RandomGaussian{3};
  const auto a = solve(x, c), b = solve(x, c);
  EXPECT_EQ(a.w.values(), b.w.values());
  ASSERT_EQ(a.trace.objectives.size(), b.trace.objectives.size());
  for (std::size_t i = 0; i < a.trace.objectives.size(); ++i) {
    EXPECT_EQ(a.trace.objectives[i].total, b.trace.objectives[i].total);
  }
}

TEST(Solve, HookFaultShowsInTrace) {
  const DataMatrix x(testutil::centered_gaussian(4, 20, 13));
  auto c = config(1.0, 1.0);
  c.init = init::ScaledIdentity{2.0};  // W = I is optimal here; start away from it so updates happen
  const auto res = solve(x, c, [](int, Eigen::MatrixXd& w) { w.array() += 1.0; });
  bool rose = false;
  for (std::size_t i = 1; i < res.trace.objectives.size(); ++i) {
    rose = rose || res.trace.objectives[i].total > res.trace.objectives[i - 1].total;
  }
  EXPECT_TRUE(rose);
}

TEST(SolverConfig, Validation) {
  const DataMatrix x(testutil::centered_gaussian(3, 10, 14));
  auto bad = [&](auto mutate) {
    auto c = config(1.0, 1.0);
    mutate(c);
    EXPECT_THROW(solve(x, c), Error);
  };
  bad([](SolverConfig& c) { c.alpha = 0.0; });
  bad([](SolverConfig& c) { c.beta = -1.0; });
  bad([](SolverConfig& c) { c.epsilon = 0.0; });
  bad([](SolverConfig& c) { c.max_iter = 0; });
  bad([](SolverConfig& c) { c.tol = -1.0; });
}

TEST(InitSpec, DescribeAndShape) {
  EXPECT_EQ(describe(init::Identity{}), "identity");
  EXPECT_EQ(describe(init::ScaledIdentity{0.5}), "diag:0.5");
  EXPECT_EQ(describe(init::Constant{2.0}), "const:2");
  EXPECT_EQ(describe(init::RandomGaussian{7}), "random:7");
  EXPECT_EQ(initial_weights(init::Constant{2.0}, 3), Eigen::MatrixXd::Constant(3, 3, 2.0));
  EXPECT_EQ(initial_weights(init::ScaledIdentity{0.5}, 2), 0.5 * Eigen::MatrixXd::Identity(2, 2));
  EXPECT_EQ(initial_weights(init::RandomGaussian{7}, 4), initial_weights(init::RandomGaussian{7}, 4));
}
