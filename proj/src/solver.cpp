#include "cspca/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <tuple>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "cspca/error.hpp"
#include "cspca/random.hpp"

namespace cspca {

namespace {

constexpr double kMinLevel = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_dims(const ProjectionMatrix& w, const DataMatrix& x) {
  if (w.dim() != x.features()) {
    fail(ErrorKind::Dimension, "W is " + std::to_string(w.dim()) + "x" + std::to_string(w.dim()) + " but X has " +
                                   std::to_string(x.features()) + " features");
  }
}

// Clamp levels for one reweighting pass.
struct Guards {
  double residual;
  double row;
  double singular;
};

struct Weights {
  Eigen::VectorXd d1;
  Eigen::VectorXd d2;
  Eigen::MatrixXd d3;
};

Weights compute_weights(const ProjectionMatrix& w, const DataMatrix& x, const Guards& g) {
  return {compute_D1(compute_residual(w, x), g.residual), compute_D2(w, g.row), compute_D3(w, g.singular)};
}

Eigen::MatrixXd weighted_gram(const DataMatrix& x, const Eigen::VectorXd& d1) {
  const Eigen::MatrixXd& xv = x.values();
  Eigen::MatrixXd a = (xv * d1.asDiagonal()) * xv.transpose();
  return 0.5 * (a + a.transpose());
}

double relative_stationarity(const ProjectionMatrix& w, const DataMatrix& x, const Weights& wt, double alpha,
                             double beta) {
  const Eigen::MatrixXd a = weighted_gram(x, wt.d1);
  const Eigen::MatrixXd m = a + alpha * Eigen::MatrixXd(wt.d2.asDiagonal()) + beta * wt.d3;
  const double denom = a.norm();
  const double num = (m * w.values() - a).norm();
  return denom > 0.0 ? num / denom : num;
}

}  // namespace

std::string describe(const InitSpec& init) {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const init::Identity&) { out << "identity"; },
                 [&](const init::ScaledIdentity& s) { out << "diag:" << s.c; },
                 [&](const init::Constant& s) { out << "const:" << s.c; },
                 [&](const init::RandomGaussian& s) { out << "random:" << s.seed; },
             },
             init);
  return out.str();
}

Eigen::MatrixXd initial_weights(const InitSpec& init, Eigen::Index d) {
  return std::visit(overloaded{
                        [&](const init::Identity&) -> Eigen::MatrixXd { return Eigen::MatrixXd::Identity(d, d); },
                        [&](const init::ScaledIdentity& s) -> Eigen::MatrixXd {
                          return s.c * Eigen::MatrixXd::Identity(d, d);
                        },
                        [&](const init::Constant& s) -> Eigen::MatrixXd { return Eigen::MatrixXd::Constant(d, d, s.c); },
                        [&](const init::RandomGaussian& s) -> Eigen::MatrixXd {
                          Rng rng(s.seed);
                          Eigen::MatrixXd w(d, d);
                          for (Eigen::Index j = 0; j < d; ++j) {
                            for (Eigen::Index i = 0; i < d; ++i) w(i, j) = rng.normal();
                          }
                          return w;
                        },
                    },
                    init);
}

void SolverConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) fail(ErrorKind::InvalidArgument, "alpha must be positive");
  if (!(beta > 0.0) || !std::isfinite(beta)) fail(ErrorKind::InvalidArgument, "beta must be positive");
  if (!(epsilon > 0.0)) fail(ErrorKind::InvalidArgument, "epsilon must be positive");
  if (!(tol >= 0.0)) fail(ErrorKind::InvalidArgument, "tol must be nonnegative");
  if (max_iter < 1) fail(ErrorKind::InvalidArgument, "max_iter must be at least 1");
  if (!(continuation >= 0.0 && continuation < 1.0)) fail(ErrorKind::InvalidArgument, "continuation must lie in [0, 1)");
  if (!(stationarity_tol >= 0.0)) fail(ErrorKind::InvalidArgument, "stationarity_tol must be nonnegative");
  if (const auto* s = std::get_if<init::ScaledIdentity>(&init); s && !std::isfinite(s->c)) {
    fail(ErrorKind::InvalidArgument, "initial scale must be finite");
  }
  if (const auto* s = std::get_if<init::Constant>(&init); s && !std::isfinite(s->c)) {
    fail(ErrorKind::InvalidArgument, "initial constant must be finite");
  }
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::ToleranceReached:
      return "ToleranceReached";
    case StopReason::MaxIterations:
      return "MaxIterations";
    case StopReason::Stalled:
      return "Stalled";
  }
  return "unknown";
}

Eigen::MatrixXd compute_residual(const ProjectionMatrix& w, const DataMatrix& x) {
  check_dims(w, x);
  return (w.values().transpose() * x.values() - x.values()).transpose();
}

Eigen::VectorXd compute_D1(const Eigen::Ref<const Eigen::MatrixXd>& e, double epsilon) {
  return (2.0 * e.rowwise().norm().cwiseMax(epsilon)).cwiseInverse();
}

Eigen::VectorXd compute_D2(const ProjectionMatrix& w, double epsilon) {
  return (2.0 * w.values().rowwise().norm().cwiseMax(epsilon)).cwiseInverse();
}

Eigen::MatrixXd compute_D3(const ProjectionMatrix& w, double epsilon) {
  const Eigen::MatrixXd gram = w.values() * w.values().transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) fail(ErrorKind::Numerical, "eigendecomposition of W W^T failed");
  const Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseMax(epsilon * epsilon).cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd& q = eig.eigenvectors();
  Eigen::MatrixXd d3 = 0.5 * q * inv_sqrt.asDiagonal() * q.transpose();
  return 0.5 * (d3 + d3.transpose());
}

ProjectionMatrix update_W(const DataMatrix& x, const Eigen::VectorXd& d1, const Eigen::VectorXd& d2,
                          const Eigen::MatrixXd& d3, double alpha, double beta) {
  const Eigen::Index d = x.features();
  if (d1.size() != x.samples() || d2.size() != d || d3.rows() != d || d3.cols() != d) {
    fail(ErrorKind::Dimension, "reweighting matrices do not match the data dimensions");
  }
  if (!(alpha > 0.0) || !(beta > 0.0)) fail(ErrorKind::InvalidArgument, "alpha and beta must be positive");

  const Eigen::MatrixXd a = weighted_gram(x, d1);
  Eigen::MatrixXd m = a + alpha * Eigen::MatrixXd(d2.asDiagonal()) + beta * d3;
  m = 0.5 * (m + m.transpose());

  auto factor = [](const Eigen::MatrixXd& mat) {
    Eigen::LLT<Eigen::MatrixXd> llt(mat);
    const bool ok = llt.info() == Eigen::Success && llt.rcond() > 1e3 * std::numeric_limits<double>::epsilon();
    return std::pair{std::move(llt), ok};
  };
  auto [llt, ok] = factor(m);
  if (!ok) {
    const double ridge = 1e-8 * std::max(1.0, m.diagonal().cwiseAbs().maxCoeff());
    m.diagonal().array() += ridge;
    std::tie(llt, ok) = factor(m);
    if (!ok) {
      const double rcond = llt.info() == Eigen::Success ? llt.rcond() : 0.0;
      std::ostringstream msg;
      msg << "update system is ill-conditioned (reciprocal condition estimate " << rcond << ")";
      fail(ErrorKind::Numerical, msg.str());
    }
  }
  Eigen::MatrixXd w = llt.solve(a);
  w += llt.solve(a - m * w);  // one step of iterative refinement
  if (!w.allFinite()) fail(ErrorKind::Numerical, "update produced non-finite W");
  return ProjectionMatrix(std::move(w));
}

double stationarity_residual(const ProjectionMatrix& w, const DataMatrix& x, double alpha, double beta,
                             double epsilon) {
  const Guards g{epsilon, epsilon, epsilon};
  return relative_stationarity(w, x, compute_weights(w, x, g), alpha, beta);
}

SolverResult solve(const DataMatrix& x, const SolverConfig& config, const UpdateHook& hook) {
  config.validate();
  const double eps = config.epsilon;
  const Guards plain{eps, eps, eps};
  const double sample_scale = x.values().colwise().norm().mean();

  ProjectionMatrix w(initial_weights(config.init, x.features()));
  SolverTrace trace;
  trace.objectives.push_back(evaluate_objective(w, x, config.alpha, config.beta));

  // Updates first clamp norms at a fraction of their natural scale. The
  // fraction shrinks tenfold once progress at the current level is below
  // level^2, or when a smoothed step would raise the true objective. Dropping
  // straight to epsilon freezes any norm that is small at that moment: its
  // weight 1/(2 eps) lets it move only by O(eps) per step.
  double level = config.continuation;
  std::optional<Weights> plain_weights;

  for (int it = 1; it <= config.max_iter; ++it) {
    try {
      const double f_prev = trace.objectives.back().total;
      std::optional<ProjectionMatrix> candidate;
      ObjectiveValue f_new;

      while (level > 0.0 && !candidate) {
        const Eigen::VectorXd s = Eigen::JacobiSVD<Eigen::MatrixXd>(w.values()).singularValues();
        const double spectral = s.size() ? s(0) : 0.0;
        const Guards g{std::max(eps, level * sample_scale), std::max(eps, level * w.values().rowwise().norm().maxCoeff()),
                       std::max(eps, level * spectral)};
        const Weights wt = compute_weights(w, x, g);
        candidate = update_W(x, wt.d1, wt.d2, wt.d3, config.alpha, config.beta);
        f_new = evaluate_objective(*candidate, x, config.alpha, config.beta);
        if (f_new.total > f_prev) {
          level *= 0.1;
          if (level < kMinLevel) level = 0.0;
          candidate.reset();
        }
      }
      const bool plain_step = level == 0.0;
      if (plain_step) {
        if (!plain_weights) plain_weights = compute_weights(w, x, plain);
        candidate = update_W(x, plain_weights->d1, plain_weights->d2, plain_weights->d3, config.alpha, config.beta);
        f_new = evaluate_objective(*candidate, x, config.alpha, config.beta);
        if (f_new.total > f_prev) {
          // Rejected: W is kept, so the iteration records zero change. Every
          // later plain step from here is identical, so only tol = 0 goes on.
          trace.objectives.push_back(trace.objectives.back());
          trace.iterations = it;
          trace.stationarity = relative_stationarity(w, x, *plain_weights, config.alpha, config.beta);
          if (config.tol > 0.0) {
            trace.converged = trace.stationarity <= config.stationarity_tol;
            trace.stop_reason = trace.converged ? StopReason::ToleranceReached : StopReason::Stalled;
            break;
          }
          continue;
        }
      }

      if (hook) {
        Eigen::MatrixXd values = candidate->values();
        hook(it, values);
        candidate = ProjectionMatrix(std::move(values));
        f_new = evaluate_objective(*candidate, x, config.alpha, config.beta);
      }
      w = std::move(*candidate);
      trace.objectives.push_back(f_new);
      trace.iterations = it;
      plain_weights.reset();

      const double change = std::abs(f_prev - f_new.total) / std::max(1.0, std::abs(f_prev));
      if (level > 0.0 && change < level * level) {
        level *= 0.1;
        if (level < kMinLevel) level = 0.0;
      }
      if (plain_step) {
        plain_weights = compute_weights(w, x, plain);
        trace.stationarity = relative_stationarity(w, x, *plain_weights, config.alpha, config.beta);
        if (change < config.tol && trace.stationarity <= config.stationarity_tol) {
          trace.converged = true;
          trace.stop_reason = StopReason::ToleranceReached;
          break;
        }
      }
    } catch (const Error& e) {
      fail(e.kind(), "iteration " + std::to_string(it) + ": " + e.what());
    }
  }
  if (!trace.converged && trace.stop_reason == StopReason::MaxIterations) {
    trace.stationarity = stationarity_residual(w, x, config.alpha, config.beta, eps);
  }
  return {std::move(w), std::move(trace), config};
}

}  // namespace cspca
