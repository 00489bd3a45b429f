#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cspca/dataio.hpp"
#include "cspca/norms.hpp"

namespace cspca {

inline constexpr const char* kTieRule = "score-desc,index-asc";

struct FeatureRanking {
  std::vector<double> scores;     // indexed by feature
  std::vector<std::size_t> order; // feature indices, best first
  std::string tie_rule = kTieRule;
};

/// Orders features by score descending; equal scores keep ascending index.
FeatureRanking rank_by_scores(std::vector<double> scores);

/// Score of feature i is ||w^i||_2, the norm of row i of W.
FeatureRanking score_features(const ProjectionMatrix& w);

/// The first k entries of `ranking.order`, in ranked order.
std::vector<std::size_t> select_top_k(const FeatureRanking& ranking, std::size_t k);

/// W^T (x - mean), or W^T x without a mean.
Eigen::VectorXd project(const ProjectionMatrix& w, const Eigen::Ref<const Eigen::VectorXd>& x,
                        const std::optional<Eigen::VectorXd>& mean = std::nullopt);

/// Rows of X at `selected`, in the given order. Feature names follow.
DataMatrix restrict_to_features(const DataMatrix& x, const std::vector<std::size_t>& selected);

/// Scores features by their sample variance (n - 1 normalization).
FeatureRanking max_variance_ranking(const DataMatrix& x);

}  // namespace cspca
