#include "magnav/sensor_sim.hpp"

#include <random>
#include <stdexcept>

#include "magnav/rng.hpp"

namespace magnav {
namespace {

// Noise stream identifiers; kept stable so adding streams never reshuffles
// existing draws.
constexpr uint64_t kStreamAccelNoise = 1;
constexpr uint64_t kStreamGyroNoise = 2;
constexpr uint64_t kStreamAccelBias = 3;
constexpr uint64_t kStreamGyroBias = 4;
constexpr uint64_t kStreamSingleMag = 99;
constexpr uint64_t kStreamMagBase = 100;

Eigen::Vector3d draw3(Rng& rng, std::normal_distribution<double>& n) {
  return {n(rng), n(rng), n(rng)};
}

}  // namespace

ImuSim simulate_imu(std::span<const Eigen::Vector3d> f_ideal,
                    std::span<const Eigen::Vector3d> omega_ideal,
                    const ImuParams& params, uint64_t seed) {
  if (f_ideal.size() != omega_ideal.size())
    throw std::invalid_argument("simulate_imu: f/omega length mismatch");
  if (!(params.rate_hz > 0.0))
    throw std::invalid_argument("simulate_imu: rate_hz must be positive");
  if (params.accel_noise_density < 0.0 || params.gyro_noise_density < 0.0 ||
      params.accel_random_walk < 0.0 || params.gyro_random_walk < 0.0)
    throw std::invalid_argument("simulate_imu: negative noise parameter");

  const size_t n = f_ideal.size();
  const double sqrt_rate = std::sqrt(params.rate_hz);
  const double sigma_f = params.accel_noise_density * sqrt_rate;
  const double sigma_w = params.gyro_noise_density * sqrt_rate;
  const double sigma_ba = params.accel_random_walk / sqrt_rate;
  const double sigma_bg = params.gyro_random_walk / sqrt_rate;

  Rng rng_f(derive_seed(seed, kStreamAccelNoise));
  Rng rng_w(derive_seed(seed, kStreamGyroNoise));
  Rng rng_ba(derive_seed(seed, kStreamAccelBias));
  Rng rng_bg(derive_seed(seed, kStreamGyroBias));
  std::normal_distribution<double> unit;

  ImuSim out;
  out.f.resize(n);
  out.omega.resize(n);
  out.ba.resize(n);
  out.bg.resize(n);
  Eigen::Vector3d ba = params.accel_bias_init;
  Eigen::Vector3d bg = params.gyro_bias_init;
  for (size_t k = 0; k < n; ++k) {
    out.ba[k] = ba;
    out.bg[k] = bg;
    out.f[k] = f_ideal[k] + ba + sigma_f * draw3(rng_f, unit);
    out.omega[k] = omega_ideal[k] + bg + sigma_w * draw3(rng_w, unit);
    ba += sigma_ba * draw3(rng_ba, unit);
    bg += sigma_bg * draw3(rng_bg, unit);
  }
  return out;
}

std::vector<Eigen::Matrix3Xd> simulate_mag_array(
    const FieldFn& field, std::span<const NavState> truth,
    const ArrayGeometry& geometry, double noise_density, double rate_hz,
    uint64_t seed) {
  if (truth.empty())
    throw std::invalid_argument("simulate_mag_array: empty trajectory");
  if (geometry.n_y() < 1)
    throw std::invalid_argument("simulate_mag_array: no sensors");
  if (noise_density < 0.0)
    throw std::invalid_argument("simulate_mag_array: negative noise density");
  if (!(rate_hz > 0.0))
    throw std::invalid_argument("simulate_mag_array: rate_hz must be positive");

  const int n_y = geometry.n_y();
  const double sigma = noise_density * std::sqrt(rate_hz);
  std::vector<Rng> rngs;
  rngs.reserve(n_y);
  for (int i = 0; i < n_y; ++i)
    rngs.emplace_back(derive_seed(seed, kStreamMagBase + i));
  std::normal_distribution<double> unit;

  std::vector<Eigen::Matrix3Xd> out(truth.size());
  for (size_t k = 0; k < truth.size(); ++k) {
    const Eigen::Matrix3d R = truth[k].q.toRotationMatrix();
    out[k].resize(3, n_y);
    for (int i = 0; i < n_y; ++i) {
      const Eigen::Vector3d p = truth[k].r + R * geometry.lever_arms[i];
      out[k].col(i) =
          R.transpose() * field(p) + sigma * draw3(rngs[i], unit);
    }
  }
  return out;
}

std::vector<Eigen::Matrix3Xd> simulate_mag_array(
    const GroundTruthField& field, std::span<const NavState> truth,
    const ArrayGeometry& geometry, double noise_density, double rate_hz,
    uint64_t seed) {
  return simulate_mag_array(
      [&field](const Eigen::Vector3d& p) { return evaluate_field(field, p); },
      truth, geometry, noise_density, rate_hz, seed);
}

SensorLog simulate_log(const GroundTruthField& field, const Trajectory& traj,
                       const ArrayGeometry& geometry, const ImuParams& params,
                       double mag_noise_density, uint64_t seed) {
  if (traj.size() == 0)
    throw std::invalid_argument("simulate_log: empty trajectory");
  if (traj.rate_hz != params.rate_hz)
    throw std::invalid_argument("simulate_log: trajectory and IMU rate differ");

  SensorLog log;
  log.rate_hz = traj.rate_hz;
  log.seed = seed;
  log.lever_arms = geometry.lever_arms;
  log.mag_noise_std = mag_noise_density * std::sqrt(traj.rate_hz);
  log.t = traj.t;

  ImuSim imu = simulate_imu(traj.f_ideal, traj.omega_ideal, params, seed);
  log.f = std::move(imu.f);
  log.omega = std::move(imu.omega);
  log.true_ba = std::move(imu.ba);
  log.true_bg = std::move(imu.bg);

  log.mag = simulate_mag_array(field, traj.states, geometry,
                               mag_noise_density, traj.rate_hz, seed);

  log.truth = traj.states;
  log.field_at_origin.resize(traj.size());
  for (size_t k = 0; k < traj.size(); ++k) {
    log.truth[k].ba = log.true_ba[k];
    log.truth[k].bg = log.true_bg[k];
    log.field_at_origin[k] = log.truth[k].q.toRotationMatrix().transpose() *
                             evaluate_field(field, log.truth[k].r);
  }
  return log;
}

SensorLog single_mag_variant(const SensorLog& log, double noise_divisor) {
  if (log.n_y() < 1)
    throw std::invalid_argument("single_mag_variant: log has no magnetometer");
  if (log.field_at_origin.size() != log.size())
    throw std::invalid_argument(
        "single_mag_variant: log lacks the noise-free origin field");
  if (!(noise_divisor > 0.0))
    throw std::invalid_argument("single_mag_variant: divisor must be positive");

  SensorLog out = log;
  out.lever_arms = {Eigen::Vector3d::Zero()};
  out.mag_noise_std = log.mag_noise_std / noise_divisor;

  Rng rng(derive_seed(log.seed, kStreamSingleMag));
  std::normal_distribution<double> unit;
  for (size_t k = 0; k < out.size(); ++k) {
    out.mag[k].resize(3, 1);
    out.mag[k].col(0) =
        log.field_at_origin[k] + out.mag_noise_std * draw3(rng, unit);
  }
  return out;
}

}  // namespace magnav
