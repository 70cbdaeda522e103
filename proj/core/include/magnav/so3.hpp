// Rotation helpers: SO(3) exponential/logarithm, step integrals for
// constant-rate motion, and directional derivatives of those maps.
//
// Quaternion convention: Hamilton, body-to-navigation (v_nav = q * v_body).
// All attitude perturbations are body-frame (right) perturbations:
// q_perturbed = q * exp_quat(delta).
#pragma once

#include <Eigen/Dense>

namespace magnav {

using Eigen::Matrix3d;
using Eigen::Quaterniond;
using Eigen::Vector3d;

/// Cross-product matrix: skew(a) * b == a x b.
Matrix3d skew(const Vector3d& a);

/// SO(3) exponential map as a rotation matrix.
Matrix3d exp_so3(const Vector3d& phi);

/// SO(3) exponential map as a unit quaternion.
Quaterniond exp_quat(const Vector3d& phi);

/// Rotation-vector logarithm of a unit quaternion, |result| <= pi.
Vector3d log_quat(const Quaterniond& q);

/// Gamma1(phi) = sum_n skew(phi)^n / (n+1)!  (the SO(3) left Jacobian).
/// Equals (1/dt) * integral_0^dt Exp(w s) ds for phi = w dt.
Matrix3d gamma1(const Vector3d& phi);

/// Gamma2(phi) = sum_n skew(phi)^n / (n+2)!.
/// Equals (1/dt^2) * double integral of Exp(w s) for phi = w dt.
Matrix3d gamma2(const Vector3d& phi);

/// Right Jacobian of SO(3): Exp(phi + d) ~= Exp(phi) Exp(Jr(phi) d).
Matrix3d right_jacobian(const Vector3d& phi);

/// Inverse right Jacobian: Log(Exp(phi) Exp(d)) ~= phi + Jr^-1(phi) d.
Matrix3d inv_right_jacobian(const Vector3d& phi);

/// Inverse left Jacobian: Log(Exp(d) Exp(phi)) ~= phi + Jl^-1(phi) d.
Matrix3d inv_left_jacobian(const Vector3d& phi);

// Directional derivatives d(Gamma_k(phi) v)/d(phi), evaluated by the power
// series. Truncation error is below 1e-11 * |v| for |phi| <= pi; per-sample
// rotation increments at any realistic IMU rate are orders of magnitude
// smaller still.
Matrix3d d_exp_v_d_phi(const Vector3d& phi, const Vector3d& v);
Matrix3d d_gamma1_v_d_phi(const Vector3d& phi, const Vector3d& v);
Matrix3d d_gamma2_v_d_phi(const Vector3d& phi, const Vector3d& v);

}  // namespace magnav
