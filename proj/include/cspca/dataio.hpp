#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace cspca {

/// Data matrix in column-per-sample layout: d rows (features) by n columns
/// (samples). Construction validates shape (d >= 1, n >= 2) and finiteness.
class DataMatrix {
 public:
  DataMatrix() = default;
  explicit DataMatrix(Eigen::MatrixXd values, std::vector<std::string> feature_names = {});

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::Index features() const noexcept { return values_.rows(); }
  Eigen::Index samples() const noexcept { return values_.cols(); }

  /// Empty when the source carried no names.
  const std::vector<std::string>& feature_names() const noexcept { return names_; }
  /// Name of feature i, or "f<i>" when no names are attached.
  std::string feature_name(Eigen::Index i) const;

 private:
  Eigen::MatrixXd values_;
  std::vector<std::string> names_;
};

enum class SampleLayout { Rows, Columns };

DataMatrix load_csv(const std::filesystem::path& path, bool has_header, SampleLayout samples_as);

/// Writes `values` (column-per-sample) as CSV in the requested on-disk
/// orientation, with a header row when names are given. Floats are written in
/// shortest round-trip form so load_csv recovers them bit-for-bit.
void save_matrix(const Eigen::MatrixXd& values, const std::vector<std::string>& feature_names,
                 const std::filesystem::path& path, SampleLayout samples_as);

struct CenteredData {
  DataMatrix data;
  Eigen::VectorXd mean;
};

CenteredData center_features(const DataMatrix& x);

/// Reads integer class labels from the first column of a CSV (header
/// optional, detected when the first cell is not an integer).
std::vector<long long> load_labels(const std::filesystem::path& path);

struct SyntheticSpec {
  std::size_t n_samples = 200;
  std::size_t n_informative = 5;
  std::size_t n_noise = 50;
  std::size_t n_clusters = 3;
  double cluster_separation = 8.0;
  double noise_scale = 0.5;
  double outlier_fraction = 0.1;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  DataMatrix x;
  std::vector<int> labels;
  std::vector<std::size_t> informative;
};

/// Gaussian blobs (unit within-cluster variance) in n_informative features,
/// i.i.d. N(0, noise_scale^2) noise features, and round(outlier_fraction * n)
/// sample columns replaced by Laplace draws scaled by 10x the mean
/// per-feature standard deviation. Feature rows are then randomly permuted;
/// `informative` lists where the informative ones landed, ascending.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Shortest decimal string that parses back to exactly `v`.
std::string format_double(double v);

/// Parses a full cell as a double; false on any trailing garbage.
bool parse_double(std::string_view cell, double& out);

/// Writes `contents` to `path` through a sibling temporary file and a rename,
/// so a failed write never leaves a partial destination behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace cspca
