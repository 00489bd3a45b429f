#include "cspca/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "cspca/error.hpp"
#include "cspca/features.hpp"
#include "cspca/random.hpp"

namespace cspca {

ClusterLabels::ClusterLabels(std::vector<int> l, int count) : labels(std::move(l)), c(count) {
  if (c < 1) fail(ErrorKind::InvalidArgument, "cluster count must be positive");
  for (int v : labels) {
    if (v < 0 || v >= c) fail(ErrorKind::Data, "label " + std::to_string(v) + " outside [0, " + std::to_string(c) + ")");
  }
}

ClusterLabels ClusterLabels::from_raw(const std::vector<long long>& raw) {
  if (raw.empty()) fail(ErrorKind::Data, "label vector is empty");
  std::map<long long, int> ids;
  for (auto v : raw) ids.emplace(v, 0);
  int next = 0;
  for (auto& [id, mapped] : ids) mapped = next++;
  std::vector<int> out;
  out.reserve(raw.size());
  for (auto v : raw) out.push_back(ids.at(v));
  return ClusterLabels(std::move(out), next);
}

ClusterLabels kmeans(const DataMatrix& x, int c, std::uint64_t seed, int max_iter) {
  const auto n = x.samples();
  if (c < 1 || c > n) {
    fail(ErrorKind::InvalidArgument,
         "cluster count " + std::to_string(c) + " outside [1, " + std::to_string(n) + "]");
  }
  if (max_iter < 1) fail(ErrorKind::InvalidArgument, "k-means max_iter must be positive");
  const Eigen::MatrixXd& v = x.values();
  Rng rng(seed);
  const auto start = rng.sample_without_replacement(static_cast<std::size_t>(n), static_cast<std::size_t>(c));
  Eigen::MatrixXd centers(v.rows(), c);
  for (int k = 0; k < c; ++k) centers.col(k) = v.col(static_cast<Eigen::Index>(start[k]));

  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int k = 0; k < c; ++k) {
        const double d = (v.col(i) - centers.col(k)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = k;
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    if (!changed) break;

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(v.rows(), c);
    std::vector<int> counts(c, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.col(assign[i]) += v.col(i);
      ++counts[assign[i]];
    }
    for (int k = 0; k < c; ++k) {
      if (counts[k] > 0) centers.col(k) = sums.col(k) / counts[k];
    }
    for (int k = 0; k < c; ++k) {
      if (counts[k] > 0) continue;
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (counts[assign[i]] <= 1) continue;
        const double d = (v.col(i) - centers.col(assign[i])).squaredNorm();
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far < 0) break;
      --counts[assign[far]];
      assign[far] = k;
      counts[k] = 1;
      centers.col(k) = v.col(far);
    }
  }
  return ClusterLabels(std::move(assign), c);
}

std::vector<int> max_weight_assignment(const Eigen::MatrixXd& weights) {
  const int rows = static_cast<int>(weights.rows());
  const int cols = static_cast<int>(weights.cols());
  if (rows == 0) return {};
  if (!weights.allFinite()) fail(ErrorKind::Numerical, "assignment weights are not finite");
  const int m = std::max(rows, cols);
  const double top = weights.size() ? weights.maxCoeff() : 0.0;
  // Square cost matrix; padding entries cost the same as a zero-weight match.
  Eigen::MatrixXd cost = Eigen::MatrixXd::Constant(m, m, top);
  cost.topLeftCorner(rows, cols) = top - weights.array();

  // Shortest augmenting path Hungarian method, 1-based potentials.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(m + 1, 0.0), p_v(m + 1, 0.0);
  std::vector<int> match(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= m; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<bool> used(m + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - p_v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          p_v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> result(rows, -1);
  for (int j = 1; j <= m; ++j) {
    const int i = match[j] - 1;
    if (i < rows && j - 1 < cols) result[i] = j - 1;
  }
  return result;
}

namespace {

Eigen::MatrixXd contingency(const ClusterLabels& pred, const ClusterLabels& truth) {
  if (pred.size() != truth.size()) {
    fail(ErrorKind::Dimension, "label vectors differ in length: " + std::to_string(pred.size()) + " vs " +
                                   std::to_string(truth.size()));
  }
  if (pred.size() == 0) fail(ErrorKind::Data, "label vectors are empty");
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(pred.c, truth.c);
  for (std::size_t i = 0; i < pred.size(); ++i) table(pred.labels[i], truth.labels[i]) += 1.0;
  return table;
}

double entropy(const Eigen::VectorXd& counts, double n) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < counts.size(); ++i) {
    if (counts[i] > 0) {
      const double p = counts[i] / n;
      h -= p * std::log(p);
    }
  }
  return h;
}

}  // namespace

double accuracy(const ClusterLabels& pred, const ClusterLabels& truth) {
  const Eigen::MatrixXd table = contingency(pred, truth);
  const auto match = max_weight_assignment(table);
  double hit = 0.0;
  for (std::size_t r = 0; r < match.size(); ++r) {
    if (match[r] >= 0) hit += table(static_cast<Eigen::Index>(r), match[r]);
  }
  return hit / static_cast<double>(pred.size());
}

double nmi(const ClusterLabels& pred, const ClusterLabels& truth) {
  const Eigen::MatrixXd table = contingency(pred, truth);
  const double n = static_cast<double>(pred.size());
  const Eigen::VectorXd rows = table.rowwise().sum();
  const Eigen::VectorXd cols = table.colwise().sum().transpose();
  const double hp = entropy(rows, n);
  const double hq = entropy(cols, n);
  if (hp <= 0.0 || hq <= 0.0) {
    // Degenerate partitions: identical ones share all information.
    for (Eigen::Index i = 0; i < table.rows(); ++i) {
      for (Eigen::Index j = 0; j < table.cols(); ++j) {
        if (table(i, j) > 0 && (table(i, j) != rows[i] || table(i, j) != cols[j])) return 0.0;
      }
    }
    return 1.0;
  }
  double mi = 0.0;
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    for (Eigen::Index j = 0; j < table.cols(); ++j) {
      const double nij = table(i, j);
      if (nij > 0) mi += nij / n * std::log(n * nij / (rows[i] * cols[j]));
    }
  }
  return std::clamp(mi / std::sqrt(hp * hq), 0.0, 1.0);
}

EvalReport evaluate_selection(const DataMatrix& x, const std::vector<std::size_t>& selected,
                              const ClusterLabels& truth, int c, int runs, std::uint64_t base_seed,
                              int kmeans_max_iter) {
  if (runs < 1) fail(ErrorKind::InvalidArgument, "number of runs must be positive");
  if (truth.size() != static_cast<std::size_t>(x.samples())) {
    fail(ErrorKind::Dimension, "label count " + std::to_string(truth.size()) + " does not match sample count " +
                                   std::to_string(x.samples()));
  }
  const DataMatrix sub = restrict_to_features(x, selected);
  EvalReport report;
  report.runs = runs;
  std::vector<double> accs, nmis;
  for (int r = 0; r < runs; ++r) {
    const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(r);
    report.seeds.push_back(seed);
    const ClusterLabels pred = kmeans(sub, c, seed, kmeans_max_iter);
    accs.push_back(accuracy(pred, truth));
    nmis.push_back(nmi(pred, truth));
  }
  auto stats = [](const std::vector<double>& v, double& mean, double& sd) {
    mean = 0.0;
    for (double a : v) mean += a;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double a : v) ss += (a - mean) * (a - mean);
    sd = std::sqrt(ss / static_cast<double>(v.size()));
  };
  stats(accs, report.acc_mean, report.acc_std);
  stats(nmis, report.nmi_mean, report.nmi_std);
  return report;
}

}  // namespace cspca
