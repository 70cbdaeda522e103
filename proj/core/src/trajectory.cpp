#include "magnav/trajectory.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "magnav/so3.hpp"

namespace magnav {

Trajectory generate_circle(double radius, double angular_rate, double laps,
                           double rate_hz, const Eigen::Vector3d& center) {
  if (!(radius > 0.0))
    throw std::invalid_argument("generate_circle: radius must be positive");
  if (angular_rate == 0.0)
    throw std::invalid_argument("generate_circle: angular_rate must be nonzero");
  if (!(laps > 0.0))
    throw std::invalid_argument("generate_circle: laps must be positive");
  if (!(rate_hz > 0.0))
    throw std::invalid_argument("generate_circle: rate_hz must be positive");

  const double lap_period = 2.0 * std::numbers::pi / std::abs(angular_rate);
  const size_t n = static_cast<size_t>(std::llround(laps * lap_period * rate_hz));
  const double dt = 1.0 / rate_hz;
  const double speed = angular_rate * radius;

  Trajectory out;
  out.rate_hz = rate_hz;
  out.t.reserve(n);
  out.states.reserve(n);
  out.f_ideal.assign(n, Eigen::Vector3d(0.0, angular_rate * angular_rate * radius,
                                        -kGravity.z()));
  out.omega_ideal.assign(n, Eigen::Vector3d(0.0, 0.0, angular_rate));
  for (size_t k = 0; k < n; ++k) {
    const double t = k * dt;
    const double psi = angular_rate * t;  // angle of the radius vector
    NavState s;
    s.r = center + radius * Eigen::Vector3d(std::cos(psi), std::sin(psi), 0.0);
    s.v = speed * Eigen::Vector3d(-std::sin(psi), std::cos(psi), 0.0);
    // Body x tangent, body z up: yaw = psi + pi/2.
    s.q = exp_quat(Eigen::Vector3d(0.0, 0.0, psi + 0.5 * std::numbers::pi));
    out.t.push_back(t);
    out.states.push_back(s);
  }
  return out;
}

Trajectory generate_line(const Eigen::Vector3d& start,
                         const Eigen::Vector3d& velocity, double duration_s,
                         double rate_hz) {
  if (!(duration_s > 0.0))
    throw std::invalid_argument("generate_line: duration must be positive");
  if (!(rate_hz > 0.0))
    throw std::invalid_argument("generate_line: rate_hz must be positive");
  const size_t n = static_cast<size_t>(std::llround(duration_s * rate_hz));
  const double dt = 1.0 / rate_hz;

  Trajectory out;
  out.rate_hz = rate_hz;
  out.f_ideal.assign(n, -kGravity);  // level flight: f = -g in body frame
  out.omega_ideal.assign(n, Eigen::Vector3d::Zero());
  out.t.reserve(n);
  out.states.reserve(n);
  for (size_t k = 0; k < n; ++k) {
    const double t = k * dt;
    NavState s;
    s.r = start + t * velocity;
    s.v = velocity;
    out.t.push_back(t);
    out.states.push_back(s);
  }
  return out;
}

Box sweep_box(const Trajectory& traj,
              const std::vector<Eigen::Vector3d>& lever_arms) {
  if (traj.states.empty())
    throw std::invalid_argument("sweep_box: empty trajectory");
  if (lever_arms.empty())
    throw std::invalid_argument("sweep_box: no lever arms");
  Box box;
  box.lo.setConstant(std::numeric_limits<double>::infinity());
  box.hi.setConstant(-std::numeric_limits<double>::infinity());
  for (const NavState& s : traj.states) {
    const Eigen::Matrix3d R = s.q.toRotationMatrix();
    for (const Eigen::Vector3d& d : lever_arms) {
      const Eigen::Vector3d p = s.r + R * d;
      box.lo = box.lo.cwiseMin(p);
      box.hi = box.hi.cwiseMax(p);
    }
  }
  return box;
}

}  // namespace magnav
