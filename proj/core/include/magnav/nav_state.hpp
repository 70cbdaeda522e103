// Navigation state and discrete strapdown mechanization.
//
// State: position r (m, navigation frame), attitude q (Hamilton quaternion,
// body-to-navigation), velocity v (m/s, navigation frame), accelerometer and
// gyroscope biases (body frame). The navigation frame is a local level frame
// with z up and gravity (0, 0, -9.81) m/s^2.
//
// Error state (15): [dr 0-2, dv 3-5, dphi 6-8, dba 9-11, dbg 12-14], with the
// attitude perturbation applied on the right (body side): R <- R * Exp(dphi).
#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace magnav {

inline const Eigen::Vector3d kGravity{0.0, 0.0, -9.81};  // m/s^2

constexpr int kStateDim = 15;
constexpr int kIdxPos = 0;
constexpr int kIdxVel = 3;
constexpr int kIdxAtt = 6;
constexpr int kIdxBa = 9;
constexpr int kIdxBg = 12;

using ErrorVec = Eigen::Matrix<double, kStateDim, 1>;
using StateJacobian = Eigen::Matrix<double, kStateDim, kStateDim>;

struct NavState {
  Eigen::Vector3d r{0.0, 0.0, 0.0};
  Eigen::Quaterniond q{1.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d v{0.0, 0.0, 0.0};
  Eigen::Vector3d ba{0.0, 0.0, 0.0};
  Eigen::Vector3d bg{0.0, 0.0, 0.0};
};

/// Retraction: applies an error vector to a state.
NavState boxplus(const NavState& s, const ErrorVec& delta);

/// Local difference: boxplus(b, boxminus(a, b)) == a (attitude on the short
/// arc).
ErrorVec boxminus(const NavState& a, const NavState& b);

/// One mechanization step with the measured rate and specific force held
/// constant over [t, t+dt). Uses the closed-form integrals of the constant
/// body-input motion, so constant-input trajectories (circles, lines)
/// integrate exactly up to rounding. Optionally returns the 15x15 transition
/// Jacobian of the error state.
NavState strapdown_step(const NavState& s, const Eigen::Vector3d& omega_meas,
                        const Eigen::Vector3d& f_meas, double dt,
                        StateJacobian* jacobian = nullptr,
                        const Eigen::Vector3d& gravity = kGravity);

/// Integrates an IMU sequence from `initial`; returns n+1 states, where
/// sample k propagates state k to k+1.
std::vector<NavState> dead_reckon(const NavState& initial,
                                  std::span<const Eigen::Vector3d> omega,
                                  std::span<const Eigen::Vector3d> f, double dt,
                                  const Eigen::Vector3d& gravity = kGravity);

}  // namespace magnav
