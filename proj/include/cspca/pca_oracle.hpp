#pragma once

#include <Eigen/Dense>

#include "cspca/dataio.hpp"
#include "cspca/norms.hpp"

namespace cspca {

// Classical PCA and the low-rank regression it is equivalent to:
//   min_{rank(W) = k} ||W^T X - X||_F^2  is solved by W = U1 U1^T,
// where U1 holds the top-k left singular vectors of X, and W^T X = U1 S1 V1^T.

struct PcaModel {
  Eigen::MatrixXd components;       // d x k, orthonormal columns
  Eigen::VectorXd singular_values;  // k, nonincreasing
  Eigen::MatrixXd right_vectors;    // n x k (V1)
  Eigen::Index k = 0;
};

/// Thin SVD of X (expected centered). Each component is sign-normalized so
/// its largest-magnitude entry is positive.
PcaModel classical_pca(const DataMatrix& x, Eigen::Index k);

/// Canonical member W = U1 U1^T of the rank-k regression solution family.
ProjectionMatrix lowrank_regression_fit(const DataMatrix& x, Eigen::Index k);

struct EquivalenceReport {
  double pca_projection_error = 0.0;         // ||U1 S1 V1^T - X||_F
  double regression_projection_error = 0.0;  // ||W^T X - X||_F
  double max_deviation = 0.0;                // max |W^T X - U1 S1 V1^T|
};

EquivalenceReport check_equivalence(const DataMatrix& x, Eigen::Index k);

}  // namespace cspca
