#include "magnav/nav_state.hpp"

#include <stdexcept>

#include "magnav/so3.hpp"

namespace magnav {

NavState boxplus(const NavState& s, const ErrorVec& delta) {
  NavState out;
  out.r = s.r + delta.segment<3>(kIdxPos);
  out.v = s.v + delta.segment<3>(kIdxVel);
  out.q = (s.q * exp_quat(delta.segment<3>(kIdxAtt))).normalized();
  out.ba = s.ba + delta.segment<3>(kIdxBa);
  out.bg = s.bg + delta.segment<3>(kIdxBg);
  return out;
}

ErrorVec boxminus(const NavState& a, const NavState& b) {
  ErrorVec d;
  d.segment<3>(kIdxPos) = a.r - b.r;
  d.segment<3>(kIdxVel) = a.v - b.v;
  d.segment<3>(kIdxAtt) = log_quat(b.q.conjugate() * a.q);
  d.segment<3>(kIdxBa) = a.ba - b.ba;
  d.segment<3>(kIdxBg) = a.bg - b.bg;
  return d;
}

NavState strapdown_step(const NavState& s, const Eigen::Vector3d& omega_meas,
                        const Eigen::Vector3d& f_meas, double dt,
                        StateJacobian* jacobian,
                        const Eigen::Vector3d& gravity) {
  if (!(dt > 0.0)) throw std::invalid_argument("strapdown_step: dt must be positive");
  const Eigen::Vector3d w = omega_meas - s.bg;
  const Eigen::Vector3d f = f_meas - s.ba;
  const Eigen::Vector3d phi = w * dt;
  const Eigen::Matrix3d R = s.q.toRotationMatrix();
  const Eigen::Matrix3d G1 = gamma1(phi);
  const Eigen::Matrix3d G2 = gamma2(phi);
  const Eigen::Vector3d d1 = G1 * f * dt;        // velocity increment, body
  const Eigen::Vector3d d2 = G2 * f * (dt * dt); // position increment, body

  NavState out;
  out.r = s.r + s.v * dt + 0.5 * dt * dt * gravity + R * d2;
  out.v = s.v + dt * gravity + R * d1;
  out.q = (s.q * exp_quat(phi)).normalized();
  out.ba = s.ba;
  out.bg = s.bg;

  if (jacobian) {
    StateJacobian& F = *jacobian;
    F.setIdentity();
    F.block<3, 3>(kIdxPos, kIdxVel) = dt * Eigen::Matrix3d::Identity();
    F.block<3, 3>(kIdxPos, kIdxAtt) = -R * skew(d2);
    F.block<3, 3>(kIdxPos, kIdxBa) = -dt * dt * R * G2;
    F.block<3, 3>(kIdxPos, kIdxBg) =
        -dt * dt * dt * R * d_gamma2_v_d_phi(phi, f);
    F.block<3, 3>(kIdxVel, kIdxAtt) = -R * skew(d1);
    F.block<3, 3>(kIdxVel, kIdxBa) = -dt * R * G1;
    F.block<3, 3>(kIdxVel, kIdxBg) = -dt * dt * R * d_gamma1_v_d_phi(phi, f);
    F.block<3, 3>(kIdxAtt, kIdxAtt) = exp_so3(phi).transpose();
    F.block<3, 3>(kIdxAtt, kIdxBg) = -dt * right_jacobian(phi);
  }
  return out;
}

std::vector<NavState> dead_reckon(const NavState& initial,
                                  std::span<const Eigen::Vector3d> omega,
                                  std::span<const Eigen::Vector3d> f, double dt,
                                  const Eigen::Vector3d& gravity) {
  if (omega.size() != f.size())
    throw std::invalid_argument("dead_reckon: omega/f length mismatch");
  std::vector<NavState> out;
  out.reserve(omega.size() + 1);
  out.push_back(initial);
  for (size_t k = 0; k < omega.size(); ++k)
    out.push_back(strapdown_step(out.back(), omega[k], f[k], dt, nullptr, gravity));
  return out;
}

}  // namespace magnav
