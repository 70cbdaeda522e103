#include "magnav/slam.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "magnav/so3.hpp"

namespace magnav {
namespace {

// Whitening floors so zero-noise configurations stay well-posed.
constexpr double kProcessSigmaFloor = 1e-9;
constexpr double kMagSigmaFloor = 1e-6;

using Mat15 = Eigen::Matrix<double, 15, 15>;
using Vec15 = Eigen::Matrix<double, 15, 1>;

Vec15 anchor_residual(const AnchorPrior& a, const NavState& x0, Mat15* J) {
  const ErrorVec raw = boxminus(x0, a.state);
  const Eigen::Vector3d e_att = raw.segment<3>(kIdxAtt);
  if (J) {
    J->setZero();
    J->diagonal() = a.sigma.cwiseInverse();
    J->block<3, 3>(kIdxAtt, kIdxAtt) =
        a.sigma.segment<3>(kIdxAtt).cwiseInverse().asDiagonal() *
        inv_right_jacobian(e_att);
  }
  return raw.cwiseQuotient(a.sigma);
}

struct ProcessEval {
  Vec15 e;
  Mat15 Jk, Jk1;  // wrt delta x_k and delta x_{k+1}
};

void eval_process(const NavState& xk, const NavState& xk1,
                  const Eigen::Vector3d& omega, const Eigen::Vector3d& f,
                  double dt, const ErrorVec& inv_sigma, bool want_jac,
                  ProcessEval& out) {
  StateJacobian F;
  const NavState pred = strapdown_step(xk, omega, f, dt, want_jac ? &F : nullptr);
  const ErrorVec raw = boxminus(xk1, pred);
  out.e = raw.cwiseProduct(inv_sigma);
  if (!want_jac) return;
  const Eigen::Vector3d e_att = raw.segment<3>(kIdxAtt);
  // raw = x_{k+1} [-] pred(x_k): the attitude row needs the log-map
  // correction on each side (right Jacobian for the x_{k+1} side, left for
  // the pred side since its perturbation enters from the left of Exp(raw)).
  out.Jk1.setIdentity();
  out.Jk1.block<3, 3>(kIdxAtt, kIdxAtt) = inv_right_jacobian(e_att);
  out.Jk = -F;
  out.Jk.middleRows<3>(kIdxAtt) =
      -(inv_left_jacobian(e_att) * F.middleRows<3>(kIdxAtt));
  out.Jk1 = inv_sigma.asDiagonal() * out.Jk1;
  out.Jk = inv_sigma.asDiagonal() * out.Jk;
}

// Per-epoch magnetometer block in a factored form that avoids redundant
// rotations: the whitened Jacobians are A_x = -(1/s) R_blk^T N and
// A_th = -(1/s) R_blk^T Phi, where R_blk applies R to every 3-row group, so
// A_x^T A_x = N^T N / s^2, A_x^T A_th = N^T Phi / s^2, A_th^T A_th =
// Phi^T Phi / s^2 and the rotations cancel everywhere except the gradient,
// which uses e_nav = R e.
struct MagEpochEval {
  Eigen::VectorXd e;      // 3 n_y, whitened, body frame
  Eigen::MatrixXd N;      // 3 n_y x 15
  Eigen::MatrixXd Phi;    // 3 n_y x n_b
  Eigen::VectorXd e_nav;  // 3 n_y
  Eigen::Matrix<double, 3, Eigen::Dynamic> phi_row;
  BasisWorkspace ws;

  void resize(int n_y, int n_b) {
    e.resize(3 * n_y);
    N.resize(3 * n_y, 15);
    Phi.resize(3 * n_y, n_b);
    e_nav.resize(3 * n_y);
    phi_row.resize(3, n_b);
  }
};

void eval_mag_epoch(const SlamProblem& P, const NavState& x,
                    const Eigen::Matrix3Xd& y, const Eigen::VectorXd& theta,
                    bool want_jac, MagEpochEval& out) {
  const int n_y = static_cast<int>(y.cols());
  const Eigen::Matrix3d R = x.q.toRotationMatrix();
  const double inv_s = 1.0 / P.mag_sigma;
  if (want_jac) out.N.setZero();
  for (int i = 0; i < n_y; ++i) {
    const Eigen::Vector3d d = P.log.lever_arms[i];
    const Eigen::Vector3d p = x.r + R * d;
    prepare_point_unchecked(P.model, p, out.ws);
    Eigen::Vector3d m;
    if (want_jac) {
      basis_matrix_into(P.model, out.ws, out.phi_row);
      m = out.phi_row * theta;
    } else {
      m = model_field(P.model, out.ws, theta);
    }
    const Eigen::Vector3d e = inv_s * (y.col(i) - R.transpose() * m);
    out.e.segment<3>(3 * i) = e;
    if (want_jac) {
      const Eigen::Matrix3d G = model_field_jacobian(P.model, out.ws, theta);
      out.Phi.middleRows<3>(3 * i) = out.phi_row;
      out.N.block<3, 3>(3 * i, kIdxPos) = G;
      out.N.block<3, 3>(3 * i, kIdxAtt) = skew(m) * R - G * R * skew(d);
      out.e_nav.segment<3>(3 * i) = R * e;
    }
  }
}

ErrorVec process_inv_sigma(const SlamProblem& P) {
  return P.process_sigma.cwiseInverse();
}

double cost_n(const SlamProblem& P, std::span<const NavState> states,
              const Eigen::VectorXd& theta, size_t n, MagEpochEval& mag) {
  const double dt = P.log.dt();
  const ErrorVec inv_sigma = process_inv_sigma(P);
  double cost = 0.0;
  if (P.anchor) cost += anchor_residual(*P.anchor, states[0], nullptr).squaredNorm();
  ProcessEval pe;
  for (size_t k = 0; k + 1 < n; ++k) {
    eval_process(states[k], states[k + 1], P.log.omega[k], P.log.f[k], dt,
                 inv_sigma, false, pe);
    cost += pe.e.squaredNorm();
  }
  for (size_t k = 0; k < n; ++k) {
    eval_mag_epoch(P, states[k], P.log.mag[k], theta, false, mag);
    cost += mag.e.squaredNorm();
  }
  cost += theta.cwiseQuotient(P.model.prior_std).squaredNorm();
  return cost;
}

/// Assembles the damped-GN normal equations over the first n epochs.
/// Returns the cost at the linearization point; grad_inf gets the inf-norm
/// of the cost gradient.
double linearize(const SlamProblem& P, std::span<const NavState> states,
                 const Eigen::VectorXd& theta, size_t n, BlockChainSystem& sys,
                 MagEpochEval& mag, double& grad_inf) {
  const int n_b = P.model.n_b;
  const double dt = P.log.dt();
  const ErrorVec inv_sigma = process_inv_sigma(P);
  sys.resize(static_cast<int>(n), 15, n_b);
  double cost = 0.0;

  if (P.anchor) {
    Mat15 J;
    const Vec15 e = anchor_residual(*P.anchor, states[0], &J);
    cost += e.squaredNorm();
    sys.D[0].noalias() += J.transpose() * J;
    sys.b[0].noalias() -= J.transpose() * e;
  }

  ProcessEval pe;
  for (size_t k = 0; k + 1 < n; ++k) {
    eval_process(states[k], states[k + 1], P.log.omega[k], P.log.f[k], dt,
                 inv_sigma, true, pe);
    cost += pe.e.squaredNorm();
    sys.D[k].noalias() += pe.Jk.transpose() * pe.Jk;
    sys.D[k + 1].noalias() += pe.Jk1.transpose() * pe.Jk1;
    sys.U[k].noalias() += pe.Jk.transpose() * pe.Jk1;
    sys.b[k].noalias() -= pe.Jk.transpose() * pe.e;
    sys.b[k + 1].noalias() -= pe.Jk1.transpose() * pe.e;
  }

  const double inv_s2 = 1.0 / (P.mag_sigma * P.mag_sigma);
  const double inv_s = 1.0 / P.mag_sigma;
  for (size_t k = 0; k < n; ++k) {
    eval_mag_epoch(P, states[k], P.log.mag[k], theta, true, mag);
    cost += mag.e.squaredNorm();
    sys.D[k].noalias() += inv_s2 * (mag.N.transpose() * mag.N);
    sys.E[k].noalias() += inv_s2 * (mag.N.transpose() * mag.Phi);
    sys.C.selfadjointView<Eigen::Lower>().rankUpdate(mag.Phi.transpose(),
                                                     inv_s2);
    sys.b[k].noalias() += inv_s * (mag.N.transpose() * mag.e_nav);
    sys.b_tail.noalias() += inv_s * (mag.Phi.transpose() * mag.e_nav);
  }
  {
    Eigen::MatrixXd c_full = sys.C.selfadjointView<Eigen::Lower>();
    sys.C = std::move(c_full);
  }

  const Eigen::VectorXd inv_p2 = P.model.prior_std.array().square().inverse();
  sys.C.diagonal() += inv_p2;
  sys.b_tail.array() -= theta.array() * inv_p2.array();
  cost += theta.cwiseQuotient(P.model.prior_std).squaredNorm();

  grad_inf = sys.b_tail.lpNorm<Eigen::Infinity>();
  for (size_t k = 0; k < n; ++k)
    grad_inf = std::max(grad_inf, sys.b[k].lpNorm<Eigen::Infinity>());
  return cost;
}

SolverReport optimize(const SlamProblem& P, size_t n,
                      std::vector<NavState>& states, Eigen::VectorXd& theta,
                      const SolveOptions& opts) {
  if (states.size() != n)
    throw std::invalid_argument("slam optimize: guess length mismatch");
  if (theta.size() != P.model.n_b)
    throw std::invalid_argument("slam optimize: theta size mismatch");
  const auto t0 = std::chrono::steady_clock::now();

  SolverReport report;
  MagEpochEval mag;
  mag.resize(P.log.n_y(), P.model.n_b);
  BlockChainSystem sys;
  double lambda = opts.lambda_init;

  double cost = cost_n(P, states, theta, n, mag);
  if (!std::isfinite(cost))
    throw std::runtime_error("slam solve: non-finite cost at initial guess");
  report.initial_cost = cost;

  std::vector<NavState> cand(n);
  for (int outer = 0; outer < opts.max_iterations && !report.converged;
       ++outer) {
    double grad_inf = 0.0;
    linearize(P, states, theta, n, sys, mag, grad_inf);
    if (grad_inf < opts.gradient_tol) {
      report.converged = true;
      break;
    }
    bool accepted = false;
    while (!accepted && lambda <= opts.lambda_max) {
      const ChainSolution sol = solve_chain(sys, lambda);
      if (!sol.success) {
        lambda *= 10.0;
        continue;
      }
      for (size_t k = 0; k < n; ++k)
        cand[k] = boxplus(states[k], sol.dx[k]);
      const Eigen::VectorXd cand_theta = theta + sol.d_tail;
      const double new_cost = cost_n(P, cand, cand_theta, n, mag);
      if (std::isfinite(new_cost) && new_cost <= cost) {
        accepted = true;
        ++report.iterations;
        const double rel = (cost - new_cost) / std::max(cost, 1e-300);
        states.swap(cand);
        theta = cand_theta;
        cost = new_cost;
        lambda = std::max(lambda * 0.1, 1e-12);
        if (rel < opts.cost_rel_tol) report.converged = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) break;  // damping exhausted; keep best iterate
  }
  report.final_cost = cost;
  report.final_lambda = lambda;
  report.seconds +=
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

void fill_errors(const SlamProblem& P, SlamSolution& sol) {
  const size_t n = sol.states.size();
  sol.error.resize(n);
  sol.error_norm.resize(n);
  for (size_t k = 0; k < n; ++k) {
    sol.error[k] = sol.states[k].r - P.log.truth[k].r;
    sol.error_norm[k] = sol.error[k].norm();
  }
}

std::vector<NavState> default_guess(const SlamProblem& P, size_t n) {
  const NavState start = P.anchor ? P.anchor->state : P.log.truth[0];
  std::vector<NavState> states = dead_reckon(
      start, std::span(P.log.omega).subspan(0, n - 1),
      std::span(P.log.f).subspan(0, n - 1), P.log.dt());
  return states;  // size n
}

}  // namespace

AnchorPrior default_anchor(const NavState& initial, const ImuParams& imu) {
  AnchorPrior a;
  a.state = initial;
  a.sigma.segment<3>(kIdxPos).setConstant(1e-6);
  a.sigma.segment<3>(kIdxVel).setConstant(1e-3);
  a.sigma.segment<3>(kIdxAtt).setConstant(1e-6);
  a.sigma.segment<3>(kIdxBa).setConstant(
      std::max(imu.accel_random_walk * 100.0, 1e-12));
  a.sigma.segment<3>(kIdxBg).setConstant(
      std::max(imu.gyro_random_walk * 100.0, 1e-12));
  return a;
}

SlamProblem build_problem(const SensorLog& log, const BasisFieldModel& model,
                          const ArrayGeometry& geometry, const ImuParams& imu) {
  if (log.size() < 2)
    throw std::invalid_argument("build_problem: log needs at least 2 epochs");
  if (log.n_y() != geometry.n_y())
    throw std::invalid_argument(
        "build_problem: log and geometry sensor counts differ");
  for (int i = 0; i < log.n_y(); ++i)
    if ((log.lever_arms[i] - geometry.lever_arms[i]).norm() > 1e-12)
      throw std::invalid_argument("build_problem: lever arm mismatch");
  if (log.mag.size() != log.size() || log.truth.size() != log.size() ||
      log.f.size() != log.size() || log.omega.size() != log.size())
    throw std::invalid_argument("build_problem: inconsistent log stream lengths");
  if (log.rate_hz != imu.rate_hz)
    throw std::invalid_argument("build_problem: log and IMU rates differ");

  for (size_t k = 0; k < log.size(); ++k) {
    const Eigen::Matrix3d R = log.truth[k].q.toRotationMatrix();
    for (const Eigen::Vector3d& d : log.lever_arms)
      if (!model.domain.contains(log.truth[k].r + R * d, 1e-9))
        throw std::invalid_argument(
            "build_problem: a sensor leaves the model domain at epoch " +
            std::to_string(k));
  }

  SlamProblem P;
  P.log = log;
  P.model = model;
  P.imu = imu;
  P.anchor = default_anchor(log.truth[0], imu);

  const double dt = log.dt();
  const double sqrt_rate = std::sqrt(imu.rate_hz);
  const double sigma_f = imu.accel_noise_density * sqrt_rate;
  const double sigma_w = imu.gyro_noise_density * sqrt_rate;
  P.process_sigma.segment<3>(kIdxPos).setConstant(
      std::max(0.5 * sigma_f * dt * dt, kProcessSigmaFloor));
  P.process_sigma.segment<3>(kIdxVel).setConstant(
      std::max(sigma_f * dt, kProcessSigmaFloor));
  P.process_sigma.segment<3>(kIdxAtt).setConstant(
      std::max(sigma_w * dt, kProcessSigmaFloor));
  P.process_sigma.segment<3>(kIdxBa).setConstant(
      std::max(imu.accel_random_walk / sqrt_rate, kProcessSigmaFloor));
  P.process_sigma.segment<3>(kIdxBg).setConstant(
      std::max(imu.gyro_random_walk / sqrt_rate, kProcessSigmaFloor));
  P.mag_sigma = std::max(log.mag_noise_std, kMagSigmaFloor);
  return P;
}

SlamSolution solve(const SlamProblem& problem,
                   const std::vector<NavState>& init,
                   const Eigen::VectorXd& theta_init,
                   const SolveOptions& opts) {
  const size_t n = problem.log.size();
  if (init.size() != n)
    throw std::invalid_argument("solve: initial guess length mismatch");
  SlamSolution sol;
  sol.states = init;
  sol.theta = theta_init.size() == 0 ? Eigen::VectorXd::Zero(problem.model.n_b)
                                     : theta_init;
  sol.report = optimize(problem, n, sol.states, sol.theta, opts);
  fill_errors(problem, sol);
  return sol;
}

SlamSolution solve(const SlamProblem& problem, const SolveOptions& opts) {
  return solve(problem, default_guess(problem, problem.log.size()),
               Eigen::VectorXd::Zero(problem.model.n_b), opts);
}

SlamSolution incremental_solve(const SlamProblem& problem, int window,
                               const SolveOptions& opts) {
  const size_t n = problem.log.size();
  if (window < 2)
    throw std::invalid_argument("incremental_solve: window must be >= 2");

  SlamSolution sol;
  sol.theta = Eigen::VectorXd::Zero(problem.model.n_b);
  sol.error.resize(n);
  sol.error_norm.resize(n);

  const size_t first = std::min<size_t>(window, n);
  sol.states = default_guess(problem, first);

  size_t covered = 0;
  size_t end = first;
  for (;;) {
    // Extend the guess by dead reckoning over the new epochs.
    while (sol.states.size() < end) {
      const size_t k = sol.states.size() - 1;
      sol.states.push_back(strapdown_step(sol.states[k], problem.log.omega[k],
                                          problem.log.f[k], problem.log.dt()));
    }
    const SolverReport r = optimize(problem, end, sol.states, sol.theta, opts);
    sol.report.iterations += r.iterations;
    sol.report.seconds += r.seconds;
    if (covered == 0) sol.report.initial_cost = r.initial_cost;
    sol.report.final_cost = r.final_cost;
    sol.report.final_lambda = r.final_lambda;
    sol.report.converged = r.converged;
    for (size_t k = covered; k < end; ++k) {
      sol.error[k] = sol.states[k].r - problem.log.truth[k].r;
      sol.error_norm[k] = sol.error[k].norm();
    }
    covered = end;
    if (end == n) break;
    end = std::min(end + static_cast<size_t>(window), n);
  }
  return sol;
}

Eigen::VectorXd stack_residuals(const SlamProblem& problem,
                                const std::vector<NavState>& states,
                                const Eigen::VectorXd& theta) {
  const size_t n = states.size();
  const int n_y = problem.log.n_y();
  const int n_b = problem.model.n_b;
  const size_t rows = (problem.anchor ? 15 : 0) + 15 * (n - 1) +
                      3 * n_y * n + n_b;
  Eigen::VectorXd r(rows);
  size_t at = 0;
  if (problem.anchor) {
    r.segment<15>(at) = anchor_residual(*problem.anchor, states[0], nullptr);
    at += 15;
  }
  const ErrorVec inv_sigma = process_inv_sigma(problem);
  ProcessEval pe;
  for (size_t k = 0; k + 1 < n; ++k) {
    eval_process(states[k], states[k + 1], problem.log.omega[k],
                 problem.log.f[k], problem.log.dt(), inv_sigma, false, pe);
    r.segment<15>(at) = pe.e;
    at += 15;
  }
  MagEpochEval mag;
  mag.resize(n_y, n_b);
  for (size_t k = 0; k < n; ++k) {
    eval_mag_epoch(problem, states[k], problem.log.mag[k], theta, false, mag);
    r.segment(at, 3 * n_y) = mag.e;
    at += 3 * n_y;
  }
  r.segment(at, n_b) = theta.cwiseQuotient(problem.model.prior_std);
  return r;
}

void dense_linearization(const SlamProblem& problem,
                         const std::vector<NavState>& states,
                         const Eigen::VectorXd& theta, Eigen::MatrixXd& J,
                         Eigen::VectorXd& residual) {
  const size_t n = states.size();
  const int n_y = problem.log.n_y();
  const int n_b = problem.model.n_b;
  const size_t rows = (problem.anchor ? 15 : 0) + 15 * (n - 1) +
                      3 * n_y * n + n_b;
  const size_t cols = 15 * n + n_b;
  J = Eigen::MatrixXd::Zero(rows, cols);
  residual = stack_residuals(problem, states, theta);

  size_t at = 0;
  if (problem.anchor) {
    Mat15 Ja;
    anchor_residual(*problem.anchor, states[0], &Ja);
    J.block<15, 15>(at, 0) = Ja;
    at += 15;
  }
  const ErrorVec inv_sigma = process_inv_sigma(problem);
  ProcessEval pe;
  for (size_t k = 0; k + 1 < n; ++k) {
    eval_process(states[k], states[k + 1], problem.log.omega[k],
                 problem.log.f[k], problem.log.dt(), inv_sigma, true, pe);
    J.block<15, 15>(at, 15 * k) = pe.Jk;
    J.block<15, 15>(at, 15 * (k + 1)) = pe.Jk1;
    at += 15;
  }
  MagEpochEval mag;
  mag.resize(n_y, n_b);
  const double inv_s = 1.0 / problem.mag_sigma;
  for (size_t k = 0; k < n; ++k) {
    eval_mag_epoch(problem, states[k], problem.log.mag[k], theta, true, mag);
    const Eigen::Matrix3d Rt = states[k].q.toRotationMatrix().transpose();
    for (int i = 0; i < n_y; ++i) {
      J.block(at + 3 * i, 15 * k, 3, 15) =
          -inv_s * (Rt * mag.N.middleRows<3>(3 * i));
      J.block(at + 3 * i, 15 * n, 3, n_b) =
          -inv_s * (Rt * mag.Phi.middleRows<3>(3 * i));
    }
    at += 3 * n_y;
  }
  J.block(at, 15 * n, n_b, n_b) =
      problem.model.prior_std.cwiseInverse().asDiagonal();
}

double evaluate_cost(const SlamProblem& problem,
                     const std::vector<NavState>& states,
                     const Eigen::VectorXd& theta) {
  MagEpochEval mag;
  mag.resize(problem.log.n_y(), problem.model.n_b);
  return cost_n(problem, states, theta, states.size(), mag);
}

ExplorationMetrics exploration_error_metrics(
    std::span<const Eigen::Vector3d> error, double lap_period_s,
    double rate_hz) {
  if (error.empty())
    throw std::invalid_argument("exploration_error_metrics: empty error series");
  if (!(lap_period_s > 0.0) || !(rate_hz > 0.0))
    throw std::invalid_argument("exploration_error_metrics: bad period/rate");
  const size_t per_lap = std::max<size_t>(
      1, static_cast<size_t>(std::llround(lap_period_s * rate_hz)));

  ExplorationMetrics out;
  for (size_t begin = 0; begin < error.size(); begin += per_lap) {
    const size_t end = std::min(begin + per_lap, error.size());
    LapStats lap;
    for (size_t k = begin; k < end; ++k) {
      const double e3 = error[k].norm();
      const double eh = error[k].head<2>().norm();
      lap.max_error = std::max(lap.max_error, e3);
      lap.max_horizontal = std::max(lap.max_horizontal, eh);
      if (k + 1 == end) {
        lap.final_error = e3;
        lap.final_horizontal = eh;
      }
    }
    out.laps.push_back(lap);
  }
  const size_t lap1_end = std::min(per_lap, error.size()) - 1;
  out.end_of_lap1_error = error[lap1_end].norm();
  return out;
}

}  // namespace magnav
