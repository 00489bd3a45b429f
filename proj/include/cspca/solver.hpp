#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cspca/dataio.hpp"
#include "cspca/norms.hpp"

namespace cspca {

namespace init {
struct Identity {};
struct ScaledIdentity {
  double c = 1.0;
};
struct Constant {
  double c = 1.0;
};
struct RandomGaussian {
  std::uint64_t seed = 0;
};
}  // namespace init

using InitSpec = std::variant<init::Identity, init::ScaledIdentity, init::Constant, init::RandomGaussian>;

std::string describe(const InitSpec& init);
Eigen::MatrixXd initial_weights(const InitSpec& init, Eigen::Index d);

struct SolverConfig {
  double alpha = 1.0;
  double beta = 1.0;
  /// Lower clamp for residual and row norms (and for singular values in D3).
  double epsilon = 1e-8;
  /// Relative objective change below which the loop may stop.
  double tol = 1e-7;
  int max_iter = 100;
  InitSpec init = init::Identity{};
  /// Starting factor of the guard continuation; 0 runs plain epsilon-guarded
  /// updates from the first iteration.
  double continuation = 0.1;
  /// The loop also requires the relative residual of the guarded stationarity
  /// equation to be at most this value before it reports convergence.
  double stationarity_tol = 1e-6;

  void validate() const;
};

enum class StopReason {
  ToleranceReached,
  MaxIterations,
  /// An update would have increased the objective and was discarded.
  Stalled,
};

std::string to_string(StopReason reason);

struct SolverTrace {
  /// Objective at W0 followed by one entry per accepted update.
  std::vector<ObjectiveValue> objectives;
  int iterations = 0;
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIterations;
  /// Relative stationarity residual at the returned W.
  double stationarity = 0.0;
};

struct SolverResult {
  ProjectionMatrix w;
  SolverTrace trace;
  SolverConfig config_echo;
};

/// E = (W^T X - X)^T, one residual row per sample (n x d).
Eigen::MatrixXd compute_residual(const ProjectionMatrix& w, const DataMatrix& x);

/// Diagonal of D1: 1 / (2 max(||e^i||, epsilon)) per row of E.
Eigen::VectorXd compute_D1(const Eigen::Ref<const Eigen::MatrixXd>& e, double epsilon);

/// Diagonal of D2: 1 / (2 max(||w^i||, epsilon)) per row of W.
Eigen::VectorXd compute_D2(const ProjectionMatrix& w, double epsilon);

/// D3 = 1/2 (W W^T)^{-1/2}, eigenvalues clamped below at epsilon^2.
Eigen::MatrixXd compute_D3(const ProjectionMatrix& w, double epsilon);

/// Solves (X D1 X^T + alpha D2 + beta D3) W = X D1 X^T.
ProjectionMatrix update_W(const DataMatrix& x, const Eigen::VectorXd& d1, const Eigen::VectorXd& d2,
                          const Eigen::MatrixXd& d3, double alpha, double beta);

/// ||(X D1 X^T + alpha D2 + beta D3) W - X D1 X^T||_F / ||X D1 X^T||_F with
/// all weights evaluated at W itself.
double stationarity_residual(const ProjectionMatrix& w, const DataMatrix& x, double alpha, double beta,
                             double epsilon);

/// Called after every accepted or candidate update with the iteration number;
/// may modify W. Used by the verification battery to inject faults.
using UpdateHook = std::function<void(int iteration, Eigen::MatrixXd& w)>;

SolverResult solve(const DataMatrix& x, const SolverConfig& config, const UpdateHook& hook = {});

}  // namespace cspca
