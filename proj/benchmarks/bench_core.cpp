// Microbenchmarks for the hot paths: basis-row evaluation and weight
// fitting (cost grows with the number of basis functions n_b), the
// block-chain normal-equation solve, and the per-epoch filter cycle.
#include <random>
#include <vector>

#include <benchmark/benchmark.h>
#include <Eigen/Dense>

#include "magnav/array_geometry.hpp"
#include "magnav/basis_field.hpp"
#include "magnav/chain_solver.hpp"
#include "magnav/dipole_field.hpp"
#include "magnav/nav_state.hpp"
#include "magnav/odometry_filter.hpp"
#include "magnav/so3.hpp"

namespace {

using namespace magnav;
using Eigen::Vector3d;

const Box kDomain{Vector3d(-1.2, -1.2, 0.2), Vector3d(1.2, 1.2, 1.8)};

GroundTruthField bench_field() {
  GroundTruthField field;
  field.background = Vector3d(20.0, 0.0, 44.0);
  field.sources = sample_sources(
      20, Box{Vector3d(-2.5, -2.5, -1.0), Vector3d(2.5, 2.5, 2.0)},
      kDomain, 30.0, 7);
  return field;
}

void BM_BasisRow(benchmark::State& state) {
  const int n_b = static_cast<int>(state.range(0));
  BasisFieldModel model = build_basis(kDomain, n_b, 0.3, 5.0);
  BasisWorkspace ws;
  Eigen::Matrix<double, 3, Eigen::Dynamic> phi(3, n_b);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  for (auto _ : state) {
    const Vector3d r(u(rng), u(rng), 1.0 + 0.4 * u(rng));
    prepare_point(model, r, ws);
    basis_matrix_into(model, ws, phi);
    benchmark::DoNotOptimize(phi.data());
  }
}

void BM_FitWeights(benchmark::State& state) {
  const int n_b = static_cast<int>(state.range(0));
  BasisFieldModel model = build_basis(kDomain, n_b, 0.3, 5.0);
  const GroundTruthField field = bench_field();
  std::vector<FieldSample> samples;
  for (double x = -0.7; x <= 0.7; x += 0.05) {
    for (double y = -0.7; y <= 0.7; y += 0.05) {
      const Vector3d r(x, y, 1.0);
      samples.push_back({r, evaluate_field(field, r)});
    }
  }
  for (auto _ : state) {
    FitResult fit = fit_weights(model, samples, 0.01);
    benchmark::DoNotOptimize(fit.theta.data());
  }
  state.SetComplexityN(n_b);
}

void BM_ChainSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int tail = static_cast<int>(state.range(1));
  const int s = 15;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  auto rand_mat = [&](int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = g(rng);
    return m;
  };
  // Gauss-Newton-shaped SPD system: per-epoch residual blocks touching two
  // chain states and the tail, plus a ridge.
  BlockChainSystem sys;
  sys.resize(n, s, tail);
  sys.C = 10.0 * Eigen::MatrixXd::Identity(tail, tail);
  for (int k = 0; k < n; ++k) {
    const Eigen::MatrixXd Jk = rand_mat(6, s);
    const Eigen::MatrixXd Gk = rand_mat(6, tail);
    sys.D[k] += Jk.transpose() * Jk +
                10.0 * Eigen::MatrixXd::Identity(s, s);
    sys.E[k] += Jk.transpose() * Gk;
    sys.C += Gk.transpose() * Gk;
    sys.b[k] += Jk.transpose() * Eigen::VectorXd::Ones(6);
    sys.b_tail += Gk.transpose() * Eigen::VectorXd::Ones(6);
    if (k + 1 < n) {
      const Eigen::MatrixXd Pk = rand_mat(s, 2 * s);
      sys.D[k] += Pk.leftCols(s).transpose() * Pk.leftCols(s);
      sys.D[k + 1] += Pk.rightCols(s).transpose() * Pk.rightCols(s);
      sys.U[k] += Pk.leftCols(s).transpose() * Pk.rightCols(s);
    }
  }
  for (auto _ : state) {
    ChainSolution sol = solve_chain(sys, 1e-4);
    benchmark::DoNotOptimize(sol.dx.data());
  }
}

void BM_OdoFilterEpoch(benchmark::State& state) {
  ArrayGeometry geom = default_array();
  OdoConfig cfg;
  cfg.imu.rate_hz = 100.0;
  OdoState s;
  s.nav.r = Vector3d(0.6, 0.0, 1.0);
  s.nav.v = Vector3d(0.0, 0.3, 0.0);
  s.m_c = Vector3d(25.0, 3.0, 44.0);
  s.P = OdoCov::Identity() * 1e-4;
  const Vector3d omega(0.0, 0.0, 0.5);
  const Vector3d f = s.nav.q.conjugate() * (-kGravity);
  Eigen::Matrix3Xd y(3, geom.n_y());
  const Eigen::Matrix3d Jm = j_to_matrix(s.j);
  for (int i = 0; i < geom.n_y(); ++i)
    y.col(i) = s.m_c + Jm * geom.lever_arms[i];
  for (auto _ : state) {
    OdoState next = propagate(s, omega, f, 0.01, cfg);
    next = update(next, y, geom.lever_arms, 0.02);
    benchmark::DoNotOptimize(next.P.data());
  }
}

void BM_StrapdownStep(benchmark::State& state) {
  NavState s;
  s.r = Vector3d(0.6, 0.0, 1.0);
  s.v = Vector3d(0.0, 0.3, 0.0);
  const Vector3d omega(0.01, -0.02, 0.5);
  const Vector3d f = Vector3d(0.05, 0.1, 0.0) - kGravity;
  StateJacobian F;
  for (auto _ : state) {
    NavState next = strapdown_step(s, omega, f, 0.01, &F);
    benchmark::DoNotOptimize(next.r.data());
    benchmark::DoNotOptimize(F.data());
  }
}

}  // namespace

BENCHMARK(BM_BasisRow)->Arg(100)->Arg(250)->Arg(1000);
BENCHMARK(BM_FitWeights)->Arg(100)->Arg(200)->Arg(400)
    ->Unit(benchmark::kMillisecond)->Complexity(benchmark::oNSquared);
BENCHMARK(BM_ChainSolve)->Args({100, 100})->Args({300, 250})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OdoFilterEpoch)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_StrapdownStep);

BENCHMARK_MAIN();
