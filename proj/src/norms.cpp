#include "cspca/norms.hpp"

#include <Eigen/SVD>

#include "cspca/error.hpp"

namespace cspca {

ProjectionMatrix::ProjectionMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) {
    fail(ErrorKind::Dimension, "projection matrix must be square, got " + std::to_string(values_.rows()) + "x" +
                                   std::to_string(values_.cols()));
  }
  if (values_.rows() < 1) fail(ErrorKind::Dimension, "projection matrix must be nonempty");
  if (!values_.allFinite()) fail(ErrorKind::Numerical, "projection matrix contains NaN or Inf");
}

ProjectionMatrix ProjectionMatrix::identity(Eigen::Index d) {
  return ProjectionMatrix(Eigen::MatrixXd::Identity(d, d));
}

double l21_norm(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  if (!a.allFinite()) fail(ErrorKind::Numerical, "l21_norm: non-finite input");
  return a.rowwise().norm().sum();
}

double trace_norm(const Eigen::Ref<const Eigen::MatrixXd>& a) {
  if (!a.allFinite()) fail(ErrorKind::Numerical, "trace_norm: non-finite input");
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  if (svd.info() != Eigen::Success) fail(ErrorKind::Numerical, "trace_norm: SVD failed");
  return svd.singularValues().sum();
}

double residual_l21_loss(const ProjectionMatrix& w, const DataMatrix& x) {
  if (w.dim() != x.features()) {
    fail(ErrorKind::Dimension, "W is " + std::to_string(w.dim()) + "x" + std::to_string(w.dim()) + " but X has " +
                                   std::to_string(x.features()) + " features");
  }
  const Eigen::MatrixXd r = w.values().transpose() * x.values() - x.values();
  return r.colwise().norm().sum();
}

ObjectiveValue evaluate_objective(const ProjectionMatrix& w, const DataMatrix& x, double alpha, double beta) {
  if (!(alpha > 0.0) || !(beta > 0.0)) fail(ErrorKind::InvalidArgument, "alpha and beta must be positive");
  ObjectiveValue v;
  v.alpha = alpha;
  v.beta = beta;
  v.loss = residual_l21_loss(w, x);
  v.l21_penalty = l21_norm(w.values());
  v.trace_penalty = trace_norm(w.values());
  v.total = v.loss + alpha * v.l21_penalty + beta * v.trace_penalty;
  return v;
}

}  // namespace cspca
