// A complete simulated data set: IMU and magnetometer-array streams plus the
// ground truth that generated them.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "magnav/nav_state.hpp"

namespace magnav {

struct SensorLog {
  double rate_hz = 100.0;
  uint64_t seed = 0;  ///< seed the log was generated from

  std::vector<Eigen::Vector3d> lever_arms;  ///< body frame, m
  double mag_noise_std = 0.2;               ///< per sample per axis, uT

  std::vector<double> t;                  ///< s
  std::vector<Eigen::Vector3d> f;         ///< specific force, m/s^2
  std::vector<Eigen::Vector3d> omega;     ///< angular rate, rad/s
  std::vector<Eigen::Matrix3Xd> mag;      ///< 3 x n_y per epoch, body frame, uT

  /// Noise-free body-frame field at the body origin per epoch; lets the
  /// single-magnetometer variant be derived without re-evaluating the field.
  std::vector<Eigen::Vector3d> field_at_origin;

  std::vector<NavState> truth;
  std::vector<Eigen::Vector3d> true_ba;  ///< m/s^2
  std::vector<Eigen::Vector3d> true_bg;  ///< rad/s

  size_t size() const { return t.size(); }
  int n_y() const { return static_cast<int>(lever_arms.size()); }
  double dt() const { return 1.0 / rate_hz; }
};

// CSV writers with fixed column order and formatting; identical logs produce
// byte-identical files.
//   imu.csv:   t,fx,fy,fz,wx,wy,wz
//   mag.csv:   t,sensor_index,bx,by,bz
//   truth.csv: t,rx,ry,rz,qw,qx,qy,qz,vx,vy,vz
void write_imu_csv(std::ostream& os, const SensorLog& log);
void write_mag_csv(std::ostream& os, const SensorLog& log);
void write_truth_csv(std::ostream& os, const SensorLog& log);

}  // namespace magnav
