#include "magnav/odometry_filter.hpp"

#include <cmath>
#include <stdexcept>

#include "magnav/so3.hpp"

namespace magnav {
namespace {

constexpr double kSigmaFloor = 1e-9;

/// epsilon -> vec5(A [eps]x - [eps]x A) for symmetric trace-free A; the
/// first-order change of a congruence-transported J under a small rotation.
Eigen::Matrix<double, 5, 3> j_commutator_map(const Eigen::Matrix3d& A) {
  Eigen::Matrix<double, 5, 3> C;
  for (int c = 0; c < 3; ++c) {
    const Eigen::Matrix3d S = skew(Eigen::Vector3d::Unit(c));
    C.col(c) = matrix_to_j(A * S - S * A);
  }
  return C;
}

ErrorVec ins_process_sigma(const ImuParams& imu, double dt) {
  const double sqrt_rate = std::sqrt(imu.rate_hz);
  const double sigma_f = imu.accel_noise_density * sqrt_rate;
  const double sigma_w = imu.gyro_noise_density * sqrt_rate;
  ErrorVec s;
  s.segment<3>(kIdxPos).setConstant(std::max(0.5 * sigma_f * dt * dt, kSigmaFloor));
  s.segment<3>(kIdxVel).setConstant(std::max(sigma_f * dt, kSigmaFloor));
  s.segment<3>(kIdxAtt).setConstant(std::max(sigma_w * dt, kSigmaFloor));
  s.segment<3>(kIdxBa).setConstant(
      std::max(imu.accel_random_walk / sqrt_rate, kSigmaFloor));
  s.segment<3>(kIdxBg).setConstant(
      std::max(imu.gyro_random_walk / sqrt_rate, kSigmaFloor));
  return s;
}

ErrorVec init_sigma_ins_or_default(const OdoConfig& cfg) {
  if (!cfg.init_sigma_ins.isZero(0.0)) return cfg.init_sigma_ins;
  ErrorVec s;
  s.segment<3>(kIdxPos).setConstant(1e-6);
  s.segment<3>(kIdxVel).setConstant(1e-3);
  s.segment<3>(kIdxAtt).setConstant(1e-6);
  s.segment<3>(kIdxBa).setConstant(
      std::max(cfg.imu.accel_random_walk * 100.0, 1e-12));
  s.segment<3>(kIdxBg).setConstant(
      std::max(cfg.imu.gyro_random_walk * 100.0, 1e-12));
  return s;
}

void symmetrize(OdoCov& P) { P = 0.5 * (P + P.transpose()).eval(); }

}  // namespace

Eigen::Matrix3d j_to_matrix(const JVec& j) {
  Eigen::Matrix3d A;
  A << j(0), j(1), j(2),
       j(1), j(3), j(4),
       j(2), j(4), -j(0) - j(3);
  return A;
}

JVec matrix_to_j(const Eigen::Matrix3d& A) {
  JVec j;
  j << A(0, 0), A(0, 1), A(0, 2), A(1, 1), A(1, 2);
  return j;
}

Eigen::Matrix<double, 3, 5> j_apply(const Eigen::Vector3d& u) {
  Eigen::Matrix<double, 3, 5> B;
  B << u.x(), u.y(), u.z(), 0.0, 0.0,
       0.0, u.x(), 0.0, u.y(), u.z(),
       -u.z(), 0.0, u.x(), -u.z(), u.y();
  return B;
}

Eigen::Matrix<double, 5, 5> j_congruence(const Eigen::Matrix3d& R) {
  Eigen::Matrix<double, 5, 5> T;
  for (int c = 0; c < 5; ++c) {
    const Eigen::Matrix3d basis = j_to_matrix(JVec::Unit(c));
    T.col(c) = matrix_to_j(R.transpose() * basis * R);
  }
  return T;
}

OdoState propagate(const OdoState& s, const Eigen::Vector3d& omega,
                   const Eigen::Vector3d& f, double dt, const OdoConfig& cfg,
                   OdoJacobian* jacobian) {
  if (!omega.allFinite() || !f.allFinite() || !std::isfinite(dt))
    throw std::invalid_argument("odometry propagate: non-finite input");

  StateJacobian F_ins;
  OdoState out;
  out.nav = strapdown_step(s.nav, omega, f, dt, &F_ins);
  out.t = s.t + dt;

  const Eigen::Matrix3d R = s.nav.q.toRotationMatrix();
  const Eigen::Vector3d phi = (omega - s.nav.bg) * dt;
  const Eigen::Matrix3d R_d = exp_so3(phi);
  const Eigen::Vector3d dr_b = R.transpose() * (out.nav.r - s.nav.r);
  const Eigen::Matrix3d Jm = j_to_matrix(s.j);

  out.m_c = R_d.transpose() * (s.m_c + Jm * dr_b);
  const Eigen::Matrix3d Jm_new = R_d.transpose() * Jm * R_d;
  out.j = matrix_to_j(Jm_new);

  // Error-state transition.
  OdoJacobian F = OdoJacobian::Identity();
  F.topLeftCorner<15, 15>() = F_ins;

  // Sensitivities of the body-frame displacement to the INS errors.
  const Eigen::Vector3d fc = f - s.nav.ba;
  const Eigen::Matrix3d A_v = R.transpose() * dt;
  const Eigen::Matrix3d A_phi =
      skew(R.transpose() * (s.nav.v * dt + 0.5 * dt * dt * kGravity));
  const Eigen::Matrix3d A_ba = -dt * dt * gamma2(phi);
  const Eigen::Matrix3d A_bg = -dt * dt * dt * d_gamma2_v_d_phi(phi, fc);
  const Eigen::Matrix3d RdT_Jm = R_d.transpose() * Jm;
  // Incremental-rotation error from the gyro bias (right perturbation of
  // R_d): eps = -Jr(phi) dt dbg.
  const Eigen::Matrix3d deps_dbg = -right_jacobian(phi) * dt;

  F.block<3, 3>(kOdoMc, kIdxVel) = RdT_Jm * A_v;
  F.block<3, 3>(kOdoMc, kIdxAtt) = RdT_Jm * A_phi;
  F.block<3, 3>(kOdoMc, kIdxBa) = RdT_Jm * A_ba;
  F.block<3, 3>(kOdoMc, kIdxBg) =
      RdT_Jm * A_bg + skew(out.m_c) * deps_dbg;
  F.block<3, 3>(kOdoMc, kOdoMc) = R_d.transpose();
  F.block<3, 5>(kOdoMc, kOdoJ) = R_d.transpose() * j_apply(dr_b);
  F.block<5, 5>(kOdoJ, kOdoJ) = j_congruence(R_d);
  F.block<5, 3>(kOdoJ, kIdxBg) = j_commutator_map(Jm_new) * deps_dbg;

  Eigen::Matrix<double, kOdoDim, 1> q_sigma;
  q_sigma.head<15>() = ins_process_sigma(cfg.imu, dt);
  const double step = dr_b.norm();
  q_sigma.segment<3>(kOdoMc).setConstant(
      std::max(cfg.transport_noise_mc * step, kSigmaFloor));
  q_sigma.segment<5>(kOdoJ).setConstant(
      std::max(cfg.transport_noise_j * step, kSigmaFloor));

  out.P = F * s.P * F.transpose();
  out.P.diagonal() += q_sigma.cwiseAbs2();
  symmetrize(out.P);
  if (jacobian) *jacobian = F;
  return out;
}

void kalman_correct(const Eigen::MatrixXd& P, const Eigen::MatrixXd& H,
                    const Eigen::VectorXd& innovation, double noise_var,
                    Eigen::VectorXd& delta, Eigen::MatrixXd& P_new) {
  if (H.rows() != innovation.size() || H.cols() != P.cols())
    throw std::invalid_argument("kalman_correct: dimension mismatch");
  if (!(noise_var > 0.0))
    throw std::invalid_argument("kalman_correct: noise variance must be positive");
  const Eigen::MatrixXd PHt = P * H.transpose();
  Eigen::MatrixXd S = H * PHt;
  S.diagonal().array() += noise_var;
  const Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("kalman_correct: innovation covariance not PD");
  const Eigen::MatrixXd K = llt.solve(PHt.transpose()).transpose();
  delta = K * innovation;
  const Eigen::MatrixXd A =
      Eigen::MatrixXd::Identity(P.rows(), P.cols()) - K * H;
  P_new = A * P * A.transpose() + noise_var * (K * K.transpose());
}

OdoState update(const OdoState& s, const Eigen::Matrix3Xd& y,
                const std::vector<Eigen::Vector3d>& lever_arms,
                double mag_sigma) {
  const int n_y = static_cast<int>(y.cols());
  if (n_y != static_cast<int>(lever_arms.size()))
    throw std::invalid_argument("odometry update: sensor count mismatch");
  const double sigma = std::max(mag_sigma, 1e-9);

  const Eigen::Matrix3d Jm = j_to_matrix(s.j);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(3 * n_y, kOdoDim);
  Eigen::VectorXd innov(3 * n_y);
  for (int i = 0; i < n_y; ++i) {
    H.block<3, 3>(3 * i, kOdoMc).setIdentity();
    H.block<3, 5>(3 * i, kOdoJ) = j_apply(lever_arms[i]);
    innov.segment<3>(3 * i) = y.col(i) - (s.m_c + Jm * lever_arms[i]);
  }

  Eigen::VectorXd delta;
  Eigen::MatrixXd P_new;
  kalman_correct(s.P, H, innov, sigma * sigma, delta, P_new);

  OdoState out = s;
  out.nav = boxplus(s.nav, delta.head<15>());
  out.m_c += delta.segment<3>(kOdoMc);
  out.j += delta.segment<5>(kOdoJ);
  out.P = P_new;
  symmetrize(out.P);
  return out;
}

OdoRun run_filter(const SensorLog& log, const ArrayGeometry& geometry,
                  const OdoConfig& cfg) {
  const size_t n = log.size();
  if (n == 0) throw std::invalid_argument("run_filter: empty log");
  if (log.n_y() != geometry.n_y())
    throw std::invalid_argument("run_filter: log/geometry sensor counts differ");
  if (log.rate_hz != cfg.imu.rate_hz)
    throw std::invalid_argument("run_filter: log and IMU rates differ");

  OdoState s;
  s.nav = log.truth[0];
  s.t = log.t[0];

  const ErrorVec ins_sigma = init_sigma_ins_or_default(cfg);
  s.P.topLeftCorner<15, 15>().diagonal() = ins_sigma.cwiseAbs2();

  // Local field model from the first epoch: ridge regression of
  // y_i = m_c + J d_i with the configured prior; its posterior covariance
  // seeds the field block, which leaves J at the prior when one sensor
  // makes it unobservable.
  {
    const double var = std::pow(std::max(log.mag_noise_std, 1e-9), 2);
    Eigen::Matrix<double, 8, 8> Hn = Eigen::Matrix<double, 8, 8>::Zero();
    Hn.topLeftCorner<3, 3>().diagonal().setConstant(
        1.0 / (cfg.init_sigma_mc * cfg.init_sigma_mc));
    Hn.bottomRightCorner<5, 5>().diagonal().setConstant(
        1.0 / (cfg.init_sigma_j * cfg.init_sigma_j));
    Eigen::Matrix<double, 8, 1> rhs = Eigen::Matrix<double, 8, 1>::Zero();
    for (int i = 0; i < log.n_y(); ++i) {
      Eigen::Matrix<double, 3, 8> A;
      A.leftCols<3>().setIdentity();
      A.rightCols<5>() = j_apply(log.lever_arms[i]);
      Hn += A.transpose() * A / var;
      rhs += A.transpose() * log.mag[0].col(i) / var;
    }
    const Eigen::LLT<Eigen::Matrix<double, 8, 8>> llt(Hn);
    const Eigen::Matrix<double, 8, 1> fit = llt.solve(rhs);
    s.m_c = fit.head<3>();
    s.j = fit.tail<5>();
    s.P.bottomRightCorner<8, 8>() =
        llt.solve(Eigen::Matrix<double, 8, 8>::Identity());
  }

  OdoRun run;
  run.states.reserve(n);
  run.error.reserve(n);
  run.error_norm.reserve(n);
  auto record = [&](size_t k) {
    run.states.push_back(s.nav);
    run.error.push_back(s.nav.r - log.truth[k].r);
    run.error_norm.push_back(run.error.back().norm());
  };
  record(0);
  for (size_t k = 1; k < n; ++k) {
    s = propagate(s, log.omega[k - 1], log.f[k - 1], log.dt(), cfg);
    s = update(s, log.mag[k], log.lever_arms, log.mag_noise_std);
    record(k);
  }
  run.final_state = s;
  return run;
}

OdoRun run_ins(const SensorLog& log) {
  const size_t n = log.size();
  if (n == 0) throw std::invalid_argument("run_ins: empty log");
  NavState start = log.truth[0];
  start.ba.setZero();  // dead reckoning integrates the raw stream
  start.bg.setZero();
  OdoRun run;
  run.states = dead_reckon(start,
                           std::span(log.omega).subspan(0, n - 1),
                           std::span(log.f).subspan(0, n - 1), log.dt());
  run.error.resize(n);
  run.error_norm.resize(n);
  for (size_t k = 0; k < n; ++k) {
    run.error[k] = run.states[k].r - log.truth[k].r;
    run.error_norm[k] = run.error[k].norm();
  }
  run.final_state.nav = run.states.back();
  run.final_state.t = log.t.back();
  return run;
}

}  // namespace magnav
