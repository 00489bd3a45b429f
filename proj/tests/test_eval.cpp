#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <set>

#include "cspca/dataio.hpp"
#include "cspca/error.hpp"
#include "cspca/eval.hpp"
#include "test_util.hpp"

using namespace cspca;

namespace {

std::vector<int> random_labels(cspca::Rng& rng, std::size_t n, int c) {
  std::vector<int> v(n);
  for (auto& x : v) x = static_cast<int>(rng.below(static_cast<std::uint64_t>(c)));
  return v;
}

// Best match count over every injective map from predicted to true labels.
double brute_force_accuracy(const std::vector<int>& pred, int cp, const std::vector<int>& truth, int ct) {
  const int m = std::max(cp, ct);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t best = 0;
  do {
    std::size_t hit = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) hit += perm[pred[i]] == truth[i];
    best = std::max(best, hit);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(pred.size());
}

}  // namespace

TEST(Accuracy, Examples) {
  const ClusterLabels truth({0, 0, 0, 1, 1, 1}, 2);
  EXPECT_EQ(accuracy(truth, truth), 1.0);
  EXPECT_EQ(accuracy(ClusterLabels({1, 1, 1, 0, 0, 0}, 2), truth), 1.0);
  EXPECT_DOUBLE_EQ(accuracy(ClusterLabels({0, 1, 0, 1, 0, 1}, 2), truth), 4.0 / 6.0);
}

TEST(Accuracy, MatchesBruteForce) {
  cspca::Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    const int cp = 2 + static_cast<int>(rng.below(4));
    const int ct = 2 + static_cast<int>(rng.below(4));
    const std::size_t n = 5 + rng.below(40);
    const auto pred = random_labels(rng, n, cp);
    const auto truth = random_labels(rng, n, ct);
    EXPECT_EQ(accuracy(ClusterLabels(pred, cp), ClusterLabels(truth, ct)), brute_force_accuracy(pred, cp, truth, ct));
  }
}

TEST(Metrics, RelabelingInvariant) {
  cspca::Rng rng(6);
  for (int t = 0; t < 50; ++t) {
    const int c = 2 + static_cast<int>(rng.below(4));
    const std::size_t n = 10 + rng.below(50);
    const auto pred = random_labels(rng, n, c);
    const auto truth = random_labels(rng, n, c);
    std::vector<int> perm(c);
    std::iota(perm.begin(), perm.end(), 0);
    rng.shuffle(perm);
    std::vector<int> relabeled(n);
    for (std::size_t i = 0; i < n; ++i) relabeled[i] = perm[pred[i]];
    const ClusterLabels p(pred, c), q(relabeled, c), g(truth, c);
    EXPECT_EQ(accuracy(p, g), accuracy(q, g));
    EXPECT_NEAR(nmi(p, g), nmi(q, g), 1e-14);
    EXPECT_GE(accuracy(p, g), 0.0);
    EXPECT_LE(accuracy(p, g), 1.0);
    EXPECT_GE(nmi(p, g), 0.0);
    EXPECT_LE(nmi(p, g), 1.0 + 1e-12);
    if (std::set<int>(pred.begin(), pred.end()).size() >= 2) EXPECT_NEAR(nmi(p, p), 1.0, 1e-12);
  }
}

TEST(Nmi, HandCases) {
  const ClusterLabels truth({0, 0, 1, 1}, 2);
  EXPECT_EQ(nmi(truth, truth), 1.0);
  EXPECT_EQ(nmi(ClusterLabels({0, 1, 0, 1}, 2), truth), 0.0);
  EXPECT_EQ(nmi(ClusterLabels({1, 1, 0, 0}, 2), truth), 1.0);
}

TEST(Nmi, IndependentLabelsNearZero) {
  cspca::Rng rng(7);
  const auto a = random_labels(rng, 1000, 2);
  const auto b = random_labels(rng, 1000, 2);
  EXPECT_LT(nmi(ClusterLabels(a, 2), ClusterLabels(b, 2)), 0.1);
}

TEST(Nmi, DegeneratePartitions) {
  const ClusterLabels one({0, 0, 0}, 1);
  EXPECT_EQ(nmi(one, one), 1.0);
  EXPECT_EQ(nmi(one, ClusterLabels({0, 1, 1}, 2)), 0.0);
}

TEST(Labels, FromRawAndValidation) {
  const auto l = ClusterLabels::from_raw({7, -2, 7, 10});
  EXPECT_EQ(l.labels, (std::vector<int>{1, 0, 1, 2}));
  EXPECT_EQ(l.c, 3);
  EXPECT_THROW(ClusterLabels({0, 2}, 2), Error);
  EXPECT_THROW(accuracy(ClusterLabels({0, 1}, 2), ClusterLabels({0, 1, 1}, 2)), Error);
}

TEST(Assignment, MatchesBruteForceOnRectangular) {
  cspca::Rng rng(8);
  for (int t = 0; t < 30; ++t) {
    const int r = 1 + static_cast<int>(rng.below(5));
    const int c = 1 + static_cast<int>(rng.below(5));
    Eigen::MatrixXd w(r, c);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = static_cast<double>(rng.below(20));
    const auto match = max_weight_assignment(w);
    double got = 0.0;
    std::set<int> used;
    for (int i = 0; i < r; ++i) {
      if (match[i] >= 0) {
        EXPECT_TRUE(used.insert(match[i]).second);
        got += w(i, match[i]);
      }
    }
    const int m = std::max(r, c);
    std::vector<int> perm(m);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 0.0;
    do {
      double s = 0.0;
      for (int i = 0; i < r; ++i) {
        if (perm[i] < c) s += w(i, perm[i]);
      }
      best = std::max(best, s);
    } while (std::next_permutation(perm.begin(), perm.end()));
    EXPECT_EQ(got, best);
  }
}

TEST(Kmeans, SeparatedBlobs) {
  Eigen::MatrixXd v = testutil::gaussian(2, 40, 9);
  std::vector<int> truth(40);
  for (int i = 0; i < 40; ++i) {
    truth[i] = i % 2;
    v(0, i) += truth[i] ? 10.0 : 0.0;
  }
  const DataMatrix x(v);
  const auto a = kmeans(x, 2, 3);
  EXPECT_EQ(accuracy(a, ClusterLabels(truth, 2)), 1.0);
  EXPECT_EQ(kmeans(x, 2, 3).labels, a.labels);
}

TEST(Kmeans, EachPointOwnCluster) {
  const DataMatrix x(testutil::gaussian(3, 6, 10));
  const auto l = kmeans(x, 6, 1);
  EXPECT_EQ(std::set<int>(l.labels.begin(), l.labels.end()).size(), 6u);
  EXPECT_THROW(kmeans(x, 7, 1), Error);
  EXPECT_THROW(kmeans(x, 0, 1), Error);
}

TEST(Kmeans, DuplicatePointsNoEmptyCluster) {
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(2, 8);
  v.col(7) << 5.0, 5.0;
  const auto l = kmeans(DataMatrix(v), 3, 2);
  for (int k = 0; k < 3; ++k) EXPECT_NE(std::count(l.labels.begin(), l.labels.end(), k), 0);
}

TEST(EvaluateSelection, SeparableDataIsPerfect) {
  SyntheticSpec spec;
  spec.outlier_fraction = 0.0;
  spec.noise_scale = 0.0;
  spec.n_noise = 0;
  spec.cluster_separation = 20.0;
  spec.seed = 12;
  const auto data = generate_synthetic(spec);
  const ClusterLabels truth(data.labels, 3);
  std::vector<std::size_t> all(data.x.features());
  std::iota(all.begin(), all.end(), 0);
  const auto rep = evaluate_selection(data.x, all, truth, 3, 30, 0);
  EXPECT_EQ(rep.runs, 30);
  EXPECT_EQ(rep.seeds.size(), 30u);
  const auto one = evaluate_selection(data.x, all, truth, 3, 1, 4);
  EXPECT_EQ(one.acc_std, 0.0);
  const auto again = evaluate_selection(data.x, all, truth, 3, 30, 0);
  EXPECT_EQ(again.acc_mean, rep.acc_mean);
  EXPECT_EQ(again.nmi_mean, rep.nmi_mean);
  spec.n_clusters = 2;
  const auto two = generate_synthetic(spec);
  const auto rep2 = evaluate_selection(two.x, std::vector<std::size_t>{0, 1, 2, 3, 4}, ClusterLabels(two.labels, 2), 2, 30, 0);
  EXPECT_EQ(rep2.acc_mean, 1.0);
  EXPECT_EQ(rep2.acc_std, 0.0);
  EXPECT_EQ(rep2.nmi_mean, 1.0);
}
