#include "magnav/chain_solver.hpp"

#include <stdexcept>

namespace magnav {

void BlockChainSystem::resize(int n, int block_dim_, int tail_dim_) {
  if (n < 1) throw std::invalid_argument("BlockChainSystem: chain length < 1");
  if (block_dim_ < 1 || tail_dim_ < 0)
    throw std::invalid_argument("BlockChainSystem: bad block dimensions");
  block_dim = block_dim_;
  tail_dim = tail_dim_;
  D.assign(n, Eigen::MatrixXd::Zero(block_dim, block_dim));
  U.assign(n - 1, Eigen::MatrixXd::Zero(block_dim, block_dim));
  E.assign(n, Eigen::MatrixXd::Zero(block_dim, tail_dim));
  C = Eigen::MatrixXd::Zero(tail_dim, tail_dim);
  b.assign(n, Eigen::VectorXd::Zero(block_dim));
  b_tail = Eigen::VectorXd::Zero(tail_dim);
}

ChainSolution solve_chain(const BlockChainSystem& sys, double damping) {
  const int n = static_cast<int>(sys.chain_length());
  const int S = sys.block_dim;
  const int T = sys.tail_dim;
  if (n < 1) throw std::invalid_argument("solve_chain: empty system");
  if (damping < 0.0) throw std::invalid_argument("solve_chain: negative damping");

  ChainSolution sol;
  sol.dx.assign(n, Eigen::VectorXd::Zero(S));
  sol.d_tail = Eigen::VectorXd::Zero(T);

  // Forward block-Cholesky sweep along the chain. After eliminating state k:
  //   W_k = L_k^{-1} U_k carries the chain coupling,
  //   Y_k = L_k^{-1} Etil_k carries the tail coupling,
  //   Dtil_{k+1} = D_{k+1} - W_k' W_k,
  //   Etil_{k+1} = E_{k+1} - W_k' Y_k,
  //   S_tail accumulates C - sum_k Y_k' Y_k.
  std::vector<Eigen::LLT<Eigen::MatrixXd>> llt(n);
  std::vector<Eigen::MatrixXd> W(n > 1 ? n - 1 : 0);
  std::vector<Eigen::MatrixXd> Y(n);
  std::vector<Eigen::VectorXd> z(n);

  Eigen::MatrixXd Dtil(S, S), Etil(S, T);
  Eigen::MatrixXd S_tail = sys.C;
  S_tail.diagonal() += damping * sys.C.diagonal();
  Eigen::VectorXd z_tail = sys.b_tail;

  for (int k = 0; k < n; ++k) {
    if (k == 0) {
      Dtil = sys.D[0];
      Dtil.diagonal() += damping * sys.D[0].diagonal();
      Etil = sys.E[0];
      z[0] = sys.b[0];
    } else {
      Dtil = sys.D[k];
      Dtil.diagonal() += damping * sys.D[k].diagonal();
      Dtil.noalias() -= W[k - 1].transpose() * W[k - 1];
      Etil = sys.E[k];
      Etil.noalias() -= W[k - 1].transpose() * Y[k - 1];
      z[k] = sys.b[k];
      z[k].noalias() -= W[k - 1].transpose() * z[k - 1];
    }
    llt[k].compute(Dtil);
    if (llt[k].info() != Eigen::Success) return sol;  // success = false
    const auto L = llt[k].matrixL();
    if (k + 1 < n) W[k] = L.solve(sys.U[k]);
    Y[k] = L.solve(Etil);
    z[k] = L.solve(z[k]);

    S_tail.selfadjointView<Eigen::Lower>().rankUpdate(Y[k].transpose(), -1.0);
    z_tail.noalias() -= Y[k].transpose() * z[k];
  }

  if (T > 0) {
    Eigen::MatrixXd S_full = S_tail.selfadjointView<Eigen::Lower>();
    Eigen::LLT<Eigen::MatrixXd> llt_tail(S_full);
    if (llt_tail.info() != Eigen::Success) return sol;
    sol.d_tail = llt_tail.solve(z_tail);
  }

  // Back-substitution: L_k' dx_k + W_k dx_{k+1} + Y_k dtail = z_k.
  for (int k = n - 1; k >= 0; --k) {
    Eigen::VectorXd rhs = z[k];
    if (T > 0) rhs.noalias() -= Y[k] * sol.d_tail;
    if (k + 1 < n) rhs.noalias() -= W[k] * sol.dx[k + 1];
    sol.dx[k] = llt[k].matrixU().solve(rhs);
  }
  sol.success = true;
  return sol;
}

Eigen::MatrixXd dense_matrix(const BlockChainSystem& sys) {
  const int n = static_cast<int>(sys.chain_length());
  const int S = sys.block_dim;
  const int T = sys.tail_dim;
  const int dim = n * S + T;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
  for (int k = 0; k < n; ++k) {
    H.block(k * S, k * S, S, S) = sys.D[k];
    if (k + 1 < n) {
      H.block(k * S, (k + 1) * S, S, S) = sys.U[k];
      H.block((k + 1) * S, k * S, S, S) = sys.U[k].transpose();
    }
    if (T > 0) {
      H.block(k * S, n * S, S, T) = sys.E[k];
      H.block(n * S, k * S, T, S) = sys.E[k].transpose();
    }
  }
  if (T > 0) H.block(n * S, n * S, T, T) = sys.C;
  return H;
}

Eigen::VectorXd dense_rhs(const BlockChainSystem& sys) {
  const int n = static_cast<int>(sys.chain_length());
  const int S = sys.block_dim;
  const int T = sys.tail_dim;
  Eigen::VectorXd rhs(n * S + T);
  for (int k = 0; k < n; ++k) rhs.segment(k * S, S) = sys.b[k];
  if (T > 0) rhs.tail(T) = sys.b_tail;
  return rhs;
}

}  // namespace magnav
