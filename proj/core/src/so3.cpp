#include "magnav/so3.hpp"

#include <cmath>

namespace magnav {

namespace {

constexpr double kSmallAngle = 1e-6;

// d/dphi of sum_n skew(phi)^n v / (n+k)! via the recursion
//   w_{n+1} = phi x w_n,  D_{n+1} = -skew(w_n) + skew(phi) D_n.
Matrix3d series_deriv(const Vector3d& phi, const Vector3d& v, int k) {
  Matrix3d result = Matrix3d::Zero();
  Vector3d w = v;                  // skew(phi)^n v
  Matrix3d D = Matrix3d::Zero();   // d w_n / d phi
  double factorial = 1.0;
  for (int n = 0; n < k; ++n) factorial *= (n + 1);
  const Matrix3d phi_x = skew(phi);
  for (int n = 1; n <= 24; ++n) {
    D = -skew(w) + phi_x * D;
    w = phi.cross(w);
    factorial *= (n + k);
    result += D / factorial;
  }
  return result;
}

}  // namespace

Matrix3d skew(const Vector3d& a) {
  Matrix3d m;
  m << 0.0, -a.z(), a.y(), a.z(), 0.0, -a.x(), -a.y(), a.x(), 0.0;
  return m;
}

Matrix3d exp_so3(const Vector3d& phi) {
  const double t = phi.norm();
  const Matrix3d px = skew(phi);
  if (t < kSmallAngle) {
    return Matrix3d::Identity() + px + 0.5 * px * px;
  }
  return Matrix3d::Identity() + (std::sin(t) / t) * px +
         ((1.0 - std::cos(t)) / (t * t)) * px * px;
}

Quaterniond exp_quat(const Vector3d& phi) {
  const double t = phi.norm();
  double c, s_over_t;
  if (t < kSmallAngle) {
    c = 1.0 - t * t / 8.0;
    s_over_t = 0.5 - t * t / 48.0;
  } else {
    c = std::cos(0.5 * t);
    s_over_t = std::sin(0.5 * t) / t;
  }
  return Quaterniond(c, s_over_t * phi.x(), s_over_t * phi.y(),
                     s_over_t * phi.z());
}

Vector3d log_quat(const Quaterniond& q_in) {
  Quaterniond q = q_in;
  if (q.w() < 0.0) q.coeffs() *= -1.0;  // pick the short arc
  const Vector3d im(q.x(), q.y(), q.z());
  const double s = im.norm();
  if (s < kSmallAngle) {
    return (2.0 / q.w()) * im * (1.0 - s * s / (3.0 * q.w() * q.w()));
  }
  return (2.0 * std::atan2(s, q.w()) / s) * im;
}

Matrix3d gamma1(const Vector3d& phi) {
  const double t = phi.norm();
  const Matrix3d px = skew(phi);
  if (t < kSmallAngle) {
    return Matrix3d::Identity() + 0.5 * px + px * px / 6.0;
  }
  const double t2 = t * t;
  return Matrix3d::Identity() + ((1.0 - std::cos(t)) / t2) * px +
         ((t - std::sin(t)) / (t2 * t)) * px * px;
}

Matrix3d gamma2(const Vector3d& phi) {
  const double t = phi.norm();
  const Matrix3d px = skew(phi);
  if (t < kSmallAngle) {
    return 0.5 * Matrix3d::Identity() + px / 6.0 + px * px / 24.0;
  }
  const double t2 = t * t;
  return 0.5 * Matrix3d::Identity() + ((t - std::sin(t)) / (t2 * t)) * px +
         ((0.5 * t2 + std::cos(t) - 1.0) / (t2 * t2)) * px * px;
}

Matrix3d right_jacobian(const Vector3d& phi) { return gamma1(-phi); }

Matrix3d inv_right_jacobian(const Vector3d& phi) {
  const double t = phi.norm();
  const Matrix3d px = skew(phi);
  if (t < kSmallAngle) {
    return Matrix3d::Identity() + 0.5 * px + px * px / 12.0;
  }
  const double t2 = t * t;
  const double coeff = 1.0 / t2 - (1.0 + std::cos(t)) / (2.0 * t * std::sin(t));
  return Matrix3d::Identity() + 0.5 * px + coeff * px * px;
}

Matrix3d inv_left_jacobian(const Vector3d& phi) {
  return inv_right_jacobian(-phi);
}

Matrix3d d_exp_v_d_phi(const Vector3d& phi, const Vector3d& v) {
  return series_deriv(phi, v, 0);
}

Matrix3d d_gamma1_v_d_phi(const Vector3d& phi, const Vector3d& v) {
  return series_deriv(phi, v, 1);
}

Matrix3d d_gamma2_v_d_phi(const Vector3d& phi, const Vector3d& v) {
  return series_deriv(phi, v, 2);
}

}  // namespace magnav
