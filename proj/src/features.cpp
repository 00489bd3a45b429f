#include "cspca/features.hpp"

#include <algorithm>
#include <numeric>

#include "cspca/error.hpp"

namespace cspca {

FeatureRanking rank_by_scores(std::vector<double> scores) {
  FeatureRanking ranking;
  ranking.order.resize(scores.size());
  std::iota(ranking.order.begin(), ranking.order.end(), std::size_t{0});
  std::stable_sort(ranking.order.begin(), ranking.order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  ranking.scores = std::move(scores);
  return ranking;
}

FeatureRanking score_features(const ProjectionMatrix& w) {
  const Eigen::VectorXd norms = w.values().rowwise().norm();
  return rank_by_scores(std::vector<double>(norms.data(), norms.data() + norms.size()));
}

std::vector<std::size_t> select_top_k(const FeatureRanking& ranking, std::size_t k) {
  if (k < 1 || k > ranking.order.size()) {
    fail(ErrorKind::InvalidArgument,
         "number of selected features " + std::to_string(k) + " outside [1, " + std::to_string(ranking.order.size()) + "]");
  }
  return {ranking.order.begin(), ranking.order.begin() + static_cast<std::ptrdiff_t>(k)};
}

Eigen::VectorXd project(const ProjectionMatrix& w, const Eigen::Ref<const Eigen::VectorXd>& x,
                        const std::optional<Eigen::VectorXd>& mean) {
  if (x.size() != w.dim()) {
    fail(ErrorKind::Dimension, "sample has " + std::to_string(x.size()) + " entries, W expects " + std::to_string(w.dim()));
  }
  if (mean) {
    if (mean->size() != w.dim()) fail(ErrorKind::Dimension, "mean vector length does not match W");
    return w.values().transpose() * (x - *mean);
  }
  return w.values().transpose() * x;
}

DataMatrix restrict_to_features(const DataMatrix& x, const std::vector<std::size_t>& selected) {
  if (selected.empty()) fail(ErrorKind::InvalidArgument, "feature selection is empty");
  Eigen::MatrixXd rows(static_cast<Eigen::Index>(selected.size()), x.samples());
  std::vector<std::string> names;
  for (std::size_t r = 0; r < selected.size(); ++r) {
    const auto idx = selected[r];
    if (idx >= static_cast<std::size_t>(x.features())) {
      fail(ErrorKind::InvalidArgument,
           "selected feature " + std::to_string(idx) + " out of range for " + std::to_string(x.features()) + " features");
    }
    rows.row(static_cast<Eigen::Index>(r)) = x.values().row(static_cast<Eigen::Index>(idx));
    if (!x.feature_names().empty()) names.push_back(x.feature_names()[idx]);
  }
  return DataMatrix(std::move(rows), std::move(names));
}

FeatureRanking max_variance_ranking(const DataMatrix& x) {
  const Eigen::VectorXd mean = x.values().rowwise().mean();
  const Eigen::VectorXd var =
      (x.values().colwise() - mean).rowwise().squaredNorm() / static_cast<double>(x.samples() - 1);
  return rank_by_scores(std::vector<double>(var.data(), var.data() + var.size()));
}

}  // namespace cspca
