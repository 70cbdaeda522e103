// Analytic reference trajectories with their ideal body-frame IMU signals.
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "magnav/box.hpp"
#include "magnav/nav_state.hpp"

namespace magnav {

struct Trajectory {
  double rate_hz = 0.0;
  std::vector<double> t;                    ///< s
  std::vector<NavState> states;             ///< truth at each epoch
  std::vector<Eigen::Vector3d> f_ideal;     ///< specific force, body, m/s^2
  std::vector<Eigen::Vector3d> omega_ideal; ///< angular rate, body, rad/s
  size_t size() const { return t.size(); }
};

/// Horizontal circle, counterclockwise for angular_rate > 0, body x tangent
/// to the motion, body z up. Starts at center + (radius, 0, 0). The body
/// inputs are constant: omega = (0, 0, angular_rate),
/// f = (0, angular_rate^2 * radius, 9.81). Epochs k = 0 .. laps*T*rate - 1.
Trajectory generate_circle(double radius, double angular_rate, double laps,
                           double rate_hz,
                           const Eigen::Vector3d& center = {0.0, 0.0, 1.0});

/// Constant-velocity straight line with identity attitude.
Trajectory generate_line(const Eigen::Vector3d& start,
                         const Eigen::Vector3d& velocity, double duration_s,
                         double rate_hz);

/// Axis-aligned bounding box of every sensor's world position over the whole
/// trajectory (the volume the array actually sweeps).
Box sweep_box(const Trajectory& traj,
              const std::vector<Eigen::Vector3d>& lever_arms);

}  // namespace magnav
