#pragma once

#include <Eigen/Dense>

#include "cspca/dataio.hpp"

namespace cspca {

/// Square d x d projection matrix W; row i belongs to input feature i.
class ProjectionMatrix {
 public:
  ProjectionMatrix() = default;
  explicit ProjectionMatrix(Eigen::MatrixXd values);

  static ProjectionMatrix identity(Eigen::Index d);

  const Eigen::MatrixXd& values() const noexcept { return values_; }
  Eigen::Index dim() const noexcept { return values_.rows(); }

 private:
  Eigen::MatrixXd values_;
};

struct ObjectiveValue {
  double loss = 0.0;           // sum_i ||W^T x_i - x_i||_2
  double l21_penalty = 0.0;    // ||W||_{2,1}
  double trace_penalty = 0.0;  // ||W||_*
  double total = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

/// Sum of the Euclidean norms of the rows of `a`.
double l21_norm(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// Sum of singular values.
double trace_norm(const Eigen::Ref<const Eigen::MatrixXd>& a);

/// sum over samples of ||W^T x_i - x_i||_2, i.e. the l2,1 norm of (W^T X - X)^T.
double residual_l21_loss(const ProjectionMatrix& w, const DataMatrix& x);

ObjectiveValue evaluate_objective(const ProjectionMatrix& w, const DataMatrix& x, double alpha,
                                  double beta);

}  // namespace cspca
