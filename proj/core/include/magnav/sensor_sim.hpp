// Seeded sensor simulation: IMU with random-walk biases, magnetometer array
// with independent per-sensor noise streams.
#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "magnav/array_geometry.hpp"
#include "magnav/dipole_field.hpp"
#include "magnav/sensor_log.hpp"
#include "magnav/trajectory.hpp"

namespace magnav {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;

/// IMU noise model. Discrete per-sample noise std = density * sqrt(rate);
/// per-step bias increment std = random_walk / sqrt(rate).
struct ImuParams {
  double rate_hz = 100.0;
  double accel_noise_density = 0.01;  ///< m/s^2/sqrt(Hz)
  double accel_random_walk = 1e-6;    ///< m/s^3/sqrt(Hz)
  Eigen::Vector3d accel_bias_init{-0.32, -0.59, -0.37};  ///< m/s^2

  double gyro_noise_density = 0.05 * kDegToRad;  ///< rad/s/sqrt(Hz)
  double gyro_random_walk = 1e-5 * kDegToRad;    ///< rad/s^2/sqrt(Hz)
  Eigen::Vector3d gyro_bias_init =
      kDegToRad * Eigen::Vector3d{-0.01, -1.39, -2.14};  ///< rad/s
};

struct ImuSim {
  std::vector<Eigen::Vector3d> f;      ///< noisy specific force
  std::vector<Eigen::Vector3d> omega;  ///< noisy angular rate
  std::vector<Eigen::Vector3d> ba;     ///< true accel bias per epoch
  std::vector<Eigen::Vector3d> bg;     ///< true gyro bias per epoch
};

/// u_k = ideal_k + bias_k + white noise; bias_{k+1} = bias_k + w.
/// Deterministic per seed; the four noise streams use independent derived
/// generators.
ImuSim simulate_imu(std::span<const Eigen::Vector3d> f_ideal,
                    std::span<const Eigen::Vector3d> omega_ideal,
                    const ImuParams& params, uint64_t seed);

using FieldFn = std::function<Eigen::Vector3d(const Eigen::Vector3d&)>;

/// y_k^(i) = R(q_k)^T field(r_k + R(q_k) d_i) + e, e i.i.d. per sensor/axis
/// with std = noise_density * sqrt(rate_hz); one derived noise stream per
/// sensor index.
std::vector<Eigen::Matrix3Xd> simulate_mag_array(
    const FieldFn& field, std::span<const NavState> truth,
    const ArrayGeometry& geometry, double noise_density, double rate_hz,
    uint64_t seed);

std::vector<Eigen::Matrix3Xd> simulate_mag_array(
    const GroundTruthField& field, std::span<const NavState> truth,
    const ArrayGeometry& geometry, double noise_density, double rate_hz,
    uint64_t seed);

/// Full data set for a trajectory: noisy IMU, noisy magnetometer array,
/// ground truth with the simulated bias trajectories folded in.
SensorLog simulate_log(const GroundTruthField& field, const Trajectory& traj,
                       const ArrayGeometry& geometry, const ImuParams& params,
                       double mag_noise_density, uint64_t seed);

/// Same truth and IMU streams; the array is replaced by one magnetometer at
/// the body origin with noise density divided by `noise_divisor`, resampled
/// from a stream derived from the log's seed.
SensorLog single_mag_variant(const SensorLog& log, double noise_divisor = 30.0);

}  // namespace magnav
