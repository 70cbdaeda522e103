// Magnetic-field odometry-aided INS: an error-state Kalman filter whose
// state augments the INS errors with a local first-order field model
// (field at the array center plus a symmetric trace-free spatial Jacobian,
// both in the body frame). Field measurements never reference a global map;
// displacement information enters through the transport of the local model,
// so the filter drifts without loop closure.
//
// Error state (23): [dr 0-2, dv 3-5, dphi 6-8, dba 9-11, dbg 12-14,
//                    dm_c 15-17, dj 18-22].
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "magnav/array_geometry.hpp"
#include "magnav/sensor_log.hpp"
#include "magnav/sensor_sim.hpp"

namespace magnav {

constexpr int kOdoDim = 23;
constexpr int kOdoMc = 15;
constexpr int kOdoJ = 18;

using OdoCov = Eigen::Matrix<double, kOdoDim, kOdoDim>;
using OdoJacobian = Eigen::Matrix<double, kOdoDim, kOdoDim>;
using JVec = Eigen::Matrix<double, 5, 1>;

/// 5-vector parameterization (A00, A01, A02, A11, A12) of a symmetric
/// trace-free 3x3 matrix.
Eigen::Matrix3d j_to_matrix(const JVec& j);
JVec matrix_to_j(const Eigen::Matrix3d& A);
/// B(u) with j_to_matrix(j) * u == B(u) * j.
Eigen::Matrix<double, 3, 5> j_apply(const Eigen::Vector3d& u);
/// 5x5 map T with matrix form R^T j_to_matrix(.) R.
Eigen::Matrix<double, 5, 5> j_congruence(const Eigen::Matrix3d& R);

struct OdoState {
  NavState nav;
  Eigen::Vector3d m_c{0.0, 0.0, 0.0};  ///< field at array center, body, uT
  JVec j = JVec::Zero();               ///< field Jacobian parameters, uT/m
  OdoCov P = OdoCov::Zero();
  double t = 0.0;
};

struct OdoConfig {
  ImuParams imu;
  double mag_sigma = 0.2;  ///< per-sample per-axis measurement std, uT

  /// Transport noise representing the truncation of higher-order field
  /// structure, scaled by the body-frame displacement per step.
  double transport_noise_mc = 0.5;  ///< uT per m displaced
  double transport_noise_j = 1.0;   ///< uT/m per m displaced

  /// Initial stds. A zero ins vector selects the defaults: pos/att 1e-6,
  /// vel 1e-3, biases = random-walk rates x 100 s. The defaults describe a
  /// warmed-up estimator: aligned at a known pose with bias estimates
  /// already converged (the array makes biases observable, so after any
  /// warm-up the filter holds them to about the random-walk drift over its
  /// effective memory). Error curves then measure in-run drift rather than
  /// the cold-start transient, which this filter class does not survive:
  /// with deg/s-scale turn-on bias errors the attitude leaves the
  /// linearization regime before transport correlations can correct it.
  ErrorVec init_sigma_ins = ErrorVec::Zero();
  double init_sigma_mc = 1.0;  ///< uT
  double init_sigma_j = 5.0;   ///< uT/m
};

/// Strapdown-mechanizes the nominal state and transports the local field
/// model to the new array pose:
///   m_c <- R_d^T (m_c + J dr_b),   J <- R_d^T J R_d,
/// with dr_b the body-frame displacement and R_d the incremental rotation.
/// Covariance: P <- F P F^T + Q. Optionally returns F.
OdoState propagate(const OdoState& s, const Eigen::Vector3d& omega,
                   const Eigen::Vector3d& f, double dt, const OdoConfig& cfg,
                   OdoJacobian* jacobian = nullptr);

/// Joint error-state measurement update with predictions
/// y_hat_i = m_c + J d_i; attitude error folded into the quaternion and
/// reset.
OdoState update(const OdoState& s, const Eigen::Matrix3Xd& y,
                const std::vector<Eigen::Vector3d>& lever_arms,
                double mag_sigma);

/// Linear-Gaussian correction step shared by update(): returns the state
/// correction K*innovation and the Joseph-form posterior covariance. Kept
/// separate so joint-vs-sequential equivalence is testable as pure algebra.
void kalman_correct(const Eigen::MatrixXd& P, const Eigen::MatrixXd& H,
                    const Eigen::VectorXd& innovation, double noise_var,
                    Eigen::VectorXd& delta, Eigen::MatrixXd& P_new);

struct OdoRun {
  std::vector<NavState> states;
  std::vector<Eigen::Vector3d> error;  ///< est - truth position, m
  std::vector<double> error_norm;
  OdoState final_state;
};

/// Filters the whole log. The initial nominal state is the anchor (truth at
/// epoch 0, warmed-up bias estimates per OdoConfig::init_sigma_ins); the
/// local field model is initialized by ridge regression on the first
/// epoch's array measurement, then epochs 1.. are propagate+update.
OdoRun run_filter(const SensorLog& log, const ArrayGeometry& geometry,
                  const OdoConfig& cfg);

/// Pure INS dead reckoning of the same log, as the no-aiding baseline:
/// starts from the anchor pose and integrates the raw IMU stream. Unlike
/// the filter, a dead-reckoning system has no mechanism to observe biases,
/// so it gets no bias knowledge and its drift is turn-on-bias dominated.
OdoRun run_ins(const SensorLog& log);

}  // namespace magnav
