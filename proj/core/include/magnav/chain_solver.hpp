// Direct solver for normal equations whose unknowns are a chain of
// fixed-size state blocks plus one dense tail block:
//
//   [ D_0  U_0            E_0   ] [dx_0 ]   [ b_0 ]
//   [ U_0' D_1  U_1       E_1   ] [dx_1 ]   [ b_1 ]
//   [      ...            ...   ] [ ... ] = [ ... ]
//   [      U_{N-2}' D_{N-1} E_{N-1}] [dx_{N-1}]  [b_{N-1}]
//   [ E_0' E_1' ...       C     ] [dtail]   [b_tail]
//
// The matrix is symmetric positive definite (Gauss-Newton normal equations
// plus damping). Solved by block Cholesky eliminating the chain states first
// and the tail last, so cost is O(N * (S^3 + S*T^2)) instead of dense
// O((N*S + T)^3).
#pragma once

#include <vector>

#include <Eigen/Dense>

namespace magnav {

struct BlockChainSystem {
  int block_dim = 0;  ///< S: size of each chain block
  int tail_dim = 0;   ///< T: size of the dense tail block
  std::vector<Eigen::MatrixXd> D;  ///< N diagonal blocks, S x S, symmetric
  std::vector<Eigen::MatrixXd> U;  ///< N-1 super-diagonal blocks, S x S
  std::vector<Eigen::MatrixXd> E;  ///< N chain-tail couplings, S x T
  Eigen::MatrixXd C;               ///< tail diagonal, T x T, symmetric
  std::vector<Eigen::VectorXd> b;  ///< N chain right-hand sides
  Eigen::VectorXd b_tail;

  size_t chain_length() const { return D.size(); }
  /// Allocates and zeroes all blocks for a chain of length n.
  void resize(int n, int block_dim, int tail_dim);
};

struct ChainSolution {
  bool success = false;  ///< false if a Cholesky factorization failed
  std::vector<Eigen::VectorXd> dx;
  Eigen::VectorXd d_tail;
};

/// Solves (H + damping * diag(H)) d = b. Multiplicative damping keeps the
/// Levenberg-Marquardt regularization scale-free across heterogeneously
/// scaled unknowns.
ChainSolution solve_chain(const BlockChainSystem& sys, double damping);

// Dense reconstructions for oracle tests.
Eigen::MatrixXd dense_matrix(const BlockChainSystem& sys);
Eigen::VectorXd dense_rhs(const BlockChainSystem& sys);

}  // namespace magnav
