#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "cspca/error.hpp"
#include "cspca/features.hpp"
#include "test_util.hpp"

using namespace cspca;

namespace {

ProjectionMatrix row_two_dominant(Eigen::Index d) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
  w(2, 0) = 3.0;
  w(2, 1) = 4.0;
  return ProjectionMatrix(w);
}

}  // namespace

TEST(ScoreFeatures, IdentityTiesByIndex) {
  const auto r = score_features(ProjectionMatrix::identity(5));
  EXPECT_EQ(r.order, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  for (double s : r.scores) EXPECT_EQ(s, 1.0);
  EXPECT_EQ(r.tie_rule, "score-desc,index-asc");
}

TEST(ScoreFeatures, DominantRow) {
  const auto r = score_features(row_two_dominant(5));
  EXPECT_EQ(r.order.front(), 2u);
  EXPECT_EQ(r.scores[2], 5.0);
  EXPECT_EQ(select_top_k(r, 1), std::vector<std::size_t>{2});
}

TEST(ScoreFeatures, MatchesLoopAndStableSort) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Eigen::MatrixXd w = testutil::gaussian(8, 8, seed);
    w.row(5) = w.row(1);  // force a tie
    const auto r = score_features(ProjectionMatrix(w));
    std::vector<double> expect(8);
    for (Eigen::Index i = 0; i < 8; ++i) {
      double ss = 0.0;
      for (Eigen::Index j = 0; j < 8; ++j) ss += w(i, j) * w(i, j);
      expect[i] = std::sqrt(ss);
      EXPECT_NEAR(r.scores[i], expect[i], 1e-14 * expect[i]);
    }
    std::vector<std::pair<double, std::size_t>> pairs;
    for (std::size_t i = 0; i < 8; ++i) pairs.emplace_back(-r.scores[i], i);
    std::sort(pairs.begin(), pairs.end());
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(r.order[i], pairs[i].second);
  }
}

TEST(SelectTopK, AllAndBruteForce) {
  const auto r = rank_by_scores({0.3, 0.9, 0.3, 0.1, 0.9});
  EXPECT_EQ(select_top_k(r, 5), (std::vector<std::size_t>{1, 4, 0, 2, 3}));
  EXPECT_THROW(select_top_k(r, 0), Error);
  EXPECT_THROW(select_top_k(r, 6), Error);
  cspca::Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    std::vector<double> s(12);
    for (auto& v : s) v = static_cast<double>(rng.below(5));
    const auto ranked = rank_by_scores(s);
    const std::size_t k = 1 + rng.below(12);
    std::vector<std::size_t> idx(12);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return s[a] != s[b] ? s[a] > s[b] : a < b; });
    idx.resize(k);
    EXPECT_EQ(select_top_k(ranked, k), idx);
  }
}

TEST(Project, Examples) {
  const Eigen::VectorXd x = testutil::gaussian(4, 1, 1);
  EXPECT_EQ(project(ProjectionMatrix::identity(4), x), x);
  EXPECT_EQ(project(ProjectionMatrix(Eigen::MatrixXd::Zero(4, 4)), x), Eigen::VectorXd::Zero(4));
  const Eigen::MatrixXd w = testutil::gaussian(4, 4, 2);
  const Eigen::VectorXd mean = testutil::gaussian(4, 1, 3);
  const Eigen::VectorXd got = project(ProjectionMatrix(w), x, mean);
  for (Eigen::Index j = 0; j < 4; ++j) {
    double v = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) v += w(i, j) * (x(i) - mean(i));
    EXPECT_NEAR(got(j), v, 1e-14);
  }
  EXPECT_THROW(project(ProjectionMatrix::identity(3), x), Error);
}

TEST(RestrictToFeatures, Examples) {
  const DataMatrix x(testutil::gaussian(3, 6, 4), {"a", "b", "c"});
  EXPECT_EQ(restrict_to_features(x, {0, 1, 2}).values(), x.values());
  const auto first = restrict_to_features(x, {0});
  EXPECT_EQ(first.values(), x.values().row(0));
  EXPECT_EQ(first.feature_names(), std::vector<std::string>{"a"});
  const auto mixed = restrict_to_features(x, {2, 0});
  EXPECT_EQ(mixed.values().row(0), x.values().row(2));
  EXPECT_EQ(mixed.values().row(1), x.values().row(0));
  EXPECT_THROW(restrict_to_features(x, {}), Error);
  EXPECT_THROW(restrict_to_features(x, {3}), Error);
}

TEST(MaxVariance, Examples) {
  Eigen::MatrixXd v(2, 2);
  v << 0, 2, 5, 5;
  const auto r = max_variance_ranking(DataMatrix(v));
  EXPECT_EQ(r.scores[0], 2.0);
  EXPECT_EQ(r.scores[1], 0.0);
  const Eigen::MatrixXd g = testutil::gaussian(5, 17, 8);
  const auto rg = max_variance_ranking(DataMatrix(g));
  for (Eigen::Index i = 0; i < 5; ++i) {
    double mean = 0.0;
    for (Eigen::Index j = 0; j < 17; ++j) mean += g(i, j);
    mean /= 17.0;
    double ss = 0.0;
    for (Eigen::Index j = 0; j < 17; ++j) ss += (g(i, j) - mean) * (g(i, j) - mean);
    EXPECT_NEAR(rg.scores[i], ss / 16.0, 1e-13);
  }
}
