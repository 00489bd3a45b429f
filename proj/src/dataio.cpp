#include "cspca/dataio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <system_error>

#include "cspca/error.hpp"
#include "cspca/random.hpp"

namespace cspca {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  if (in.bad()) fail(ErrorKind::Io, "read error on '" + path.string() + "'");
  if (!lines.empty() && lines.front().rfind("\xEF\xBB\xBF", 0) == 0) lines.front().erase(0, 3);
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

}  // namespace

DataMatrix::DataMatrix(Eigen::MatrixXd values, std::vector<std::string> feature_names)
    : values_(std::move(values)), names_(std::move(feature_names)) {
  if (values_.rows() < 1) fail(ErrorKind::Data, "data matrix needs at least one feature");
  if (values_.cols() < 2) fail(ErrorKind::Data, "data matrix needs at least two samples");
  if (!values_.allFinite()) fail(ErrorKind::Data, "data matrix contains NaN or Inf");
  if (!names_.empty() && static_cast<Eigen::Index>(names_.size()) != values_.rows()) {
    fail(ErrorKind::Data, "feature name count " + std::to_string(names_.size()) + " does not match " +
                              std::to_string(values_.rows()) + " features");
  }
}

std::string DataMatrix::feature_name(Eigen::Index i) const {
  if (!names_.empty()) return names_[static_cast<std::size_t>(i)];
  return "f" + std::to_string(i);
}

bool parse_double(std::string_view cell, double& out) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto* first = cell.data();
  const auto* last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) fail(ErrorKind::Io, "cannot format number");
  return std::string(buf, ptr);
}

DataMatrix load_csv(const std::filesystem::path& path, bool has_header, SampleLayout samples_as) {
  const auto lines = read_lines(path);
  std::size_t first = 0;
  std::vector<std::string> header;
  if (has_header) {
    if (lines.empty()) fail(ErrorKind::Data, "'" + path.string() + "' is empty");
    for (auto cell : split_cells(lines[0])) header.emplace_back(cell);
    first = 1;
  }
  const std::size_t records = lines.size() - first;
  if (records == 0) fail(ErrorKind::Data, "'" + path.string() + "' has no data rows");

  const std::size_t width = split_cells(lines[first]).size();
  if (has_header && header.size() != width) {
    fail(ErrorKind::Parse, "header has " + std::to_string(header.size()) + " columns but row " +
                               std::to_string(first + 1) + " has " + std::to_string(width));
  }
  Eigen::MatrixXd table(static_cast<Eigen::Index>(records), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < records; ++r) {
    const auto cells = split_cells(lines[first + r]);
    const std::size_t line_no = first + r + 1;
    if (cells.size() != width) {
      fail(ErrorKind::Parse, "ragged row at line " + std::to_string(line_no) + ": expected " +
                                 std::to_string(width) + " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      if (!parse_double(cells[c], v) || !std::isfinite(v)) {
        fail(ErrorKind::Parse, "non-numeric cell '" + std::string(cells[c]) + "' at (" +
                                   std::to_string(line_no) + "," + std::to_string(c + 1) + ")");
      }
      table(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
    }
  }

  if (samples_as == SampleLayout::Rows) {
    if (table.rows() < 2) fail(ErrorKind::Data, "need at least two samples, found " + std::to_string(table.rows()));
    return DataMatrix(table.transpose(), std::move(header));
  }
  if (table.cols() < 2) fail(ErrorKind::Data, "need at least two samples, found " + std::to_string(table.cols()));
  // Column-per-sample files have one feature per row; a header names samples,
  // not features, so it is dropped.
  return DataMatrix(std::move(table));
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write '" + path.string() + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      fail(ErrorKind::Io, "write failed for '" + path.string() + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot move output into place at '" + path.string() + "'");
  }
}

void save_matrix(const Eigen::MatrixXd& values, const std::vector<std::string>& feature_names,
                 const std::filesystem::path& path, SampleLayout samples_as) {
  std::ostringstream out;
  const bool rows_are_samples = samples_as == SampleLayout::Rows;
  if (!feature_names.empty()) {
    if (!rows_are_samples) fail(ErrorKind::InvalidArgument, "feature names require samples-as-rows output");
    for (std::size_t i = 0; i < feature_names.size(); ++i) out << (i ? "," : "") << feature_names[i];
    out << '\n';
  }
  const Eigen::Index out_rows = rows_are_samples ? values.cols() : values.rows();
  const Eigen::Index out_cols = rows_are_samples ? values.rows() : values.cols();
  for (Eigen::Index r = 0; r < out_rows; ++r) {
    for (Eigen::Index c = 0; c < out_cols; ++c) {
      if (c) out << ',';
      out << format_double(rows_are_samples ? values(c, r) : values(r, c));
    }
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

CenteredData center_features(const DataMatrix& x) {
  Eigen::VectorXd mean = x.values().rowwise().mean();
  Eigen::MatrixXd centered = x.values().colwise() - mean;
  return {DataMatrix(std::move(centered), x.feature_names()), std::move(mean)};
}

std::vector<long long> load_labels(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  std::vector<long long> labels;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto cells = split_cells(lines[i]);
    const auto cell = cells.front();
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
      double d = 0.0;
      if (parse_double(cell, d) && std::floor(d) == d && std::abs(d) < 9e15) {
        labels.push_back(static_cast<long long>(d));
        continue;
      }
      if (i == 0) continue;  // header
      fail(ErrorKind::Parse, "label '" + std::string(cell) + "' at line " + std::to_string(i + 1) +
                                 " is not an integer");
    }
    labels.push_back(v);
  }
  if (labels.empty()) fail(ErrorKind::Data, "'" + path.string() + "' holds no labels");
  return labels;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_informative < 1) fail(ErrorKind::InvalidArgument, "n_informative must be positive");
  if (spec.n_clusters < 2) fail(ErrorKind::InvalidArgument, "n_clusters must be at least 2");
  if (spec.n_samples < spec.n_clusters || spec.n_samples < 2) {
    fail(ErrorKind::InvalidArgument, "n_samples must be at least n_clusters and at least 2");
  }
  if (!(spec.cluster_separation > 0.0)) fail(ErrorKind::InvalidArgument, "cluster_separation must be positive");
  if (!(spec.noise_scale >= 0.0)) fail(ErrorKind::InvalidArgument, "noise_scale must be nonnegative");
  if (!(spec.outlier_fraction >= 0.0 && spec.outlier_fraction < 1.0)) {
    fail(ErrorKind::InvalidArgument, "outlier_fraction must lie in [0, 1)");
  }

  Rng rng(spec.seed);
  const auto ni = static_cast<Eigen::Index>(spec.n_informative);
  const auto d = static_cast<Eigen::Index>(spec.n_informative + spec.n_noise);
  const auto n = static_cast<Eigen::Index>(spec.n_samples);
  const auto c = static_cast<Eigen::Index>(spec.n_clusters);

  // Every informative feature separates the clusters equally well: its center
  // coordinates are a shuffled set of evenly spaced levels.
  Eigen::MatrixXd centers(ni, c);
  std::vector<double> levels(spec.n_clusters);
  for (std::size_t k = 0; k < spec.n_clusters; ++k) {
    levels[k] = static_cast<double>(k) - 0.5 * static_cast<double>(spec.n_clusters - 1);
  }
  for (Eigen::Index j = 0; j < ni; ++j) {
    auto row = levels;
    rng.shuffle(row);
    for (Eigen::Index k = 0; k < c; ++k) centers(j, k) = row[static_cast<std::size_t>(k)];
  }
  double min_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index a = 0; a < c; ++a) {
    for (Eigen::Index b = a + 1; b < c; ++b) min_dist = std::min(min_dist, (centers.col(a) - centers.col(b)).norm());
  }
  if (min_dist == 0.0) {
    // Only possible with a single informative feature and a level collision,
    // which shuffling a set of distinct levels cannot produce.
    fail(ErrorKind::Numerical, "degenerate cluster centers");
  }
  centers *= spec.cluster_separation / min_dist;

  SyntheticData out;
  out.labels.resize(spec.n_samples);
  Eigen::MatrixXd values(d, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int label = static_cast<int>(i % c);
    out.labels[static_cast<std::size_t>(i)] = label;
    for (Eigen::Index j = 0; j < ni; ++j) values(j, i) = centers(j, label) + rng.normal();
    for (Eigen::Index j = ni; j < d; ++j) values(j, i) = spec.noise_scale * rng.normal();
  }

  // Scatter the informative rows so that index order says nothing about them.
  std::vector<std::size_t> position(static_cast<std::size_t>(d));
  std::iota(position.begin(), position.end(), std::size_t{0});
  rng.shuffle(position);

  const auto n_outliers = static_cast<std::size_t>(std::llround(spec.outlier_fraction * static_cast<double>(n)));
  if (n_outliers > 0) {
    const Eigen::VectorXd mean = values.rowwise().mean();
    const Eigen::VectorXd stddev =
        ((values.colwise() - mean).rowwise().squaredNorm() / static_cast<double>(n - 1)).cwiseSqrt();
    const double scale = 10.0 * stddev.mean();
    for (auto idx : rng.sample_without_replacement(spec.n_samples, n_outliers)) {
      for (Eigen::Index j = 0; j < d; ++j) values(j, static_cast<Eigen::Index>(idx)) = scale * rng.laplace();
    }
  }

  Eigen::MatrixXd placed(d, n);
  for (Eigen::Index j = 0; j < d; ++j) placed.row(static_cast<Eigen::Index>(position[j])) = values.row(j);
  out.informative.assign(position.begin(), position.begin() + static_cast<std::ptrdiff_t>(ni));
  std::sort(out.informative.begin(), out.informative.end());
  out.x = DataMatrix(std::move(placed));
  return out;
}

}  // namespace cspca
