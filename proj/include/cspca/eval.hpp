#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "cspca/dataio.hpp"

namespace cspca {

struct ClusterLabels {
  std::vector<int> labels;  // each in [0, c)
  int c = 0;

  ClusterLabels() = default;
  ClusterLabels(std::vector<int> labels, int c);

  /// Maps arbitrary ids onto 0..c-1 in ascending id order.
  static ClusterLabels from_raw(const std::vector<long long>& raw);

  std::size_t size() const noexcept { return labels.size(); }
};

/// Lloyd's algorithm started from c distinct sample columns drawn with the
/// seed. Stops when assignments repeat or after max_iter sweeps. Empty
/// clusters are moved onto the point farthest from its own centroid.
ClusterLabels kmeans(const DataMatrix& x, int c, std::uint64_t seed, int max_iter = 100);

/// Maximum-weight assignment on a (rectangular allowed) weight matrix.
/// Returns, for each row, the matched column or -1 when the row is padding.
std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights);

/// Fraction of samples whose predicted cluster maps onto their true class
/// under the best one-to-one mapping.
double accuracy(const ClusterLabels& pred, const ClusterLabels& truth);

/// I(P,Q) / sqrt(H(P) H(Q)) in natural logs.
double nmi(const ClusterLabels& pred, const ClusterLabels& truth);

struct EvalReport {
  double acc_mean = 0.0;
  double acc_std = 0.0;
  double nmi_mean = 0.0;
  double nmi_std = 0.0;
  int runs = 0;
  std::vector<std::uint64_t> seeds;
};

/// Clusters X restricted to `selected` once per seed base_seed..base_seed+runs-1
/// and reports mean and population std of ACC and NMI.
EvalReport evaluate_selection(const DataMatrix& x, const std::vector<std::size_t>& selected,
                              const ClusterLabels& truth, int c, int runs, std::uint64_t base_seed,
                              int kmeans_max_iter = 100);

}  // namespace cspca
