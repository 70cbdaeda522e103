// Magnetic-field SLAM as batch MAP estimation: joint nonlinear least squares
// over the navigation-state chain and the field weights.
//
// Residuals (all whitened):
//   - anchor prior on the initial state (fixes the gauge),
//   - one 15-dim process residual per consecutive state pair, from strapdown
//     mechanization of the IMU samples with random-walk bias residuals,
//   - one 3-dim residual per magnetometer per epoch:
//       y - R(q)^T Phi(r + R(q) d_i) theta,
//   - a Gaussian prior on the weights from the basis model.
//
// Minimized by Levenberg-Marquardt on the block-tridiagonal-plus-dense-tail
// normal equations (states eliminated first, weights last). Attitude updates
// are multiplicative on the quaternion manifold.
#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "magnav/basis_field.hpp"
#include "magnav/chain_solver.hpp"
#include "magnav/sensor_log.hpp"
#include "magnav/sensor_sim.hpp"

namespace magnav {

struct AnchorPrior {
  NavState state;
  ErrorVec sigma;  ///< per-component prior std in error-state order
};

/// Near-hard pose anchor: position/attitude std 1e-6, velocity 1e-3 m/s,
/// bias stds = random-walk rates x 100 s.
AnchorPrior default_anchor(const NavState& initial, const ImuParams& imu);

struct SlamProblem {
  SensorLog log;
  BasisFieldModel model;
  ImuParams imu;
  std::optional<AnchorPrior> anchor;  ///< empty = free gauge
  ErrorVec process_sigma;             ///< per-step whitening stds
  double mag_sigma = 0.2;             ///< per-axis measurement std, uT
};

/// Validates dimensions (log vs geometry sensor counts, epochs >= 2, truth
/// sensor positions inside the model domain) and precomputes the whitening
/// constants. The anchor defaults to default_anchor(log.truth[0], imu).
SlamProblem build_problem(const SensorLog& log, const BasisFieldModel& model,
                          const ArrayGeometry& geometry, const ImuParams& imu);

struct SolveOptions {
  int max_iterations = 100;
  double lambda_init = 1e-4;
  double lambda_max = 1e12;
  double cost_rel_tol = 1e-8;  ///< relative cost decrease below this = done
  double gradient_tol = 1e-4;  ///< inf-norm of the cost gradient
};

struct SolverReport {
  int iterations = 0;  ///< accepted LM steps
  double initial_cost = 0.0;
  double final_cost = 0.0;
  bool converged = false;
  double final_lambda = 0.0;
  double seconds = 0.0;
};

struct SlamSolution {
  std::vector<NavState> states;
  Eigen::VectorXd theta;
  /// Position error vs truth per epoch (est - truth). For batch solve these
  /// come from the final iterate; for incremental_solve each epoch's error is
  /// taken from the first window that covered it (the estimate available
  /// when that part of the trajectory was first explored).
  std::vector<Eigen::Vector3d> error;
  std::vector<double> error_norm;
  SolverReport report;
};

/// Batch solve from a caller-supplied initial guess.
SlamSolution solve(const SlamProblem& problem,
                   const std::vector<NavState>& init,
                   const Eigen::VectorXd& theta_init,
                   const SolveOptions& opts = {});

/// Batch solve from the default guess: dead reckoning from the anchor state
/// (or truth[0] if no anchor), theta = 0.
SlamSolution solve(const SlamProblem& problem, const SolveOptions& opts = {});

/// Growing-window solve: optimizes epochs [0, w), [0, 2w), ... [0, N), each
/// warm-started from the previous solution extended by dead reckoning. The
/// returned states are the final full-window estimates; the error series is
/// causal as described on SlamSolution.
SlamSolution incremental_solve(const SlamProblem& problem, int window,
                               const SolveOptions& opts = {});

// --- Diagnostics / test support -----------------------------------------
// Stacked whitened residual vector and its dense Jacobian wrt
// [15 per state ... ; theta], built from the same analytic blocks the sparse
// assembly uses. Residual order: anchor (if any), process pairs k=0..N-2,
// magnetometer blocks per epoch per sensor, weight prior.
Eigen::VectorXd stack_residuals(const SlamProblem& problem,
                                const std::vector<NavState>& states,
                                const Eigen::VectorXd& theta);
void dense_linearization(const SlamProblem& problem,
                         const std::vector<NavState>& states,
                         const Eigen::VectorXd& theta, Eigen::MatrixXd& J,
                         Eigen::VectorXd& residual);
/// Sum of squared whitened residuals.
double evaluate_cost(const SlamProblem& problem,
                     const std::vector<NavState>& states,
                     const Eigen::VectorXd& theta);

struct LapStats {
  double max_error = 0.0;         ///< 3D, m
  double final_error = 0.0;       ///< 3D, m
  double max_horizontal = 0.0;    ///< m
  double final_horizontal = 0.0;  ///< m
};

struct ExplorationMetrics {
  std::vector<LapStats> laps;
  double end_of_lap1_error = 0.0;  ///< 3D position error at lap-1 end, m
};

/// Splits the error series into laps of lap_period_s and summarizes each.
ExplorationMetrics exploration_error_metrics(
    std::span<const Eigen::Vector3d> error, double lap_period_s,
    double rate_hz);

}  // namespace magnav
