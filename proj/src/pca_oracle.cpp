#include "cspca/pca_oracle.hpp"

#include <Eigen/SVD>

#include "cspca/error.hpp"

namespace cspca {

namespace {

void check_rank(const DataMatrix& x, Eigen::Index k) {
  const Eigen::Index limit = std::min(x.features(), x.samples());
  if (k < 1 || k > limit) {
    fail(ErrorKind::InvalidArgument,
         "k=" + std::to_string(k) + " outside [1, " + std::to_string(limit) + "]");
  }
}

}  // namespace

PcaModel classical_pca(const DataMatrix& x, Eigen::Index k) {
  check_rank(x, k);
  Eigen::BDCSVD<Eigen::MatrixXd> svd(x.values(), Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) fail(ErrorKind::Numerical, "SVD of X failed");

  PcaModel model;
  model.k = k;
  model.components = svd.matrixU().leftCols(k);
  model.right_vectors = svd.matrixV().leftCols(k);
  model.singular_values = svd.singularValues().head(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    Eigen::Index arg = 0;
    model.components.col(j).cwiseAbs().maxCoeff(&arg);
    if (model.components(arg, j) < 0.0) {
      model.components.col(j) *= -1.0;
      model.right_vectors.col(j) *= -1.0;
    }
  }
  return model;
}

ProjectionMatrix lowrank_regression_fit(const DataMatrix& x, Eigen::Index k) {
  const PcaModel model = classical_pca(x, k);
  return ProjectionMatrix(model.components * model.components.transpose());
}

EquivalenceReport check_equivalence(const DataMatrix& x, Eigen::Index k) {
  const PcaModel model = classical_pca(x, k);
  const ProjectionMatrix w(model.components * model.components.transpose());

  const Eigen::MatrixXd pca_projection =
      model.components * model.singular_values.asDiagonal() * model.right_vectors.transpose();
  const Eigen::MatrixXd regression_projection = w.values().transpose() * x.values();

  EquivalenceReport report;
  report.pca_projection_error = (pca_projection - x.values()).norm();
  report.regression_projection_error = (regression_projection - x.values()).norm();
  report.max_deviation = (regression_projection - pca_projection).cwiseAbs().maxCoeff();
  return report;
}

}  // namespace cspca
