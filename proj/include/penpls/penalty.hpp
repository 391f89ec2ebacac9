#pragma once

#include <Eigen/Dense>

#include <vector>

namespace penpls {

inline constexpr int kDefaultDiffOrder = 2;

// Per-variable smoothing parameters for a block difference penalty
// P = diag(lambda) (x) K_q. All blocks share the basis size K.
struct PenaltySpec {
  std::vector<double> lambdas;
  int q = kDefaultDiffOrder;
  int K = 0;

  // Same lambda for all p variables.
  static PenaltySpec shared(int p, double lambda, int K, int q = kDefaultDiffOrder);

  int variables() const { return static_cast<int>(lambdas.size()); }
  int dimension() const { return variables() * K; }
  // Throws InvalidConfiguration on negative/non-finite lambda or q outside [1, K-1].
  void validate() const;
};

// (K-1) x K first order difference operator.
Eigen::MatrixXd difference_matrix(int K);

// (D_{K-q+1} ... D_K)^T (D_{K-q+1} ... D_K).
Eigen::MatrixXd penalty_kernel(int K, int q);

// Dense pK x pK block-diagonal penalty.
Eigen::MatrixXd assemble_penalty(const PenaltySpec& spec);

// M = (I + P)^{-1} for block-diagonal P, held as one Cholesky factor of
// I + P_j per block. The full M is never formed except by dense().
class Preconditioner {
 public:
  // Takes the symmetric penalty blocks P_j; each I + P_j must be positive definite.
  explicit Preconditioner(std::vector<Eigen::MatrixXd> penaltyBlocks);

  int dimension() const { return dim_; }
  int blocks() const { return static_cast<int>(penalty_.size()); }
  int block_offset(int j) const { return offsets_.at(j); }
  const Eigen::MatrixXd& penalty_block(int j) const { return penalty_.at(j); }

  // M v
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
  // M V, column by column
  Eigen::MatrixXd apply(const Eigen::MatrixXd& V) const;
  // (I + P) v, from the unfactored penalty
  Eigen::VectorXd apply_metric(const Eigen::VectorXd& v) const;

  // Dense M. Intended for tests and small problems.
  Eigen::MatrixXd dense() const;

 private:
  std::vector<Eigen::MatrixXd> penalty_;
  std::vector<Eigen::LLT<Eigen::MatrixXd>> factors_;
  std::vector<int> offsets_;
  int dim_ = 0;
};

Preconditioner make_preconditioner(const PenaltySpec& spec);

// Identity preconditioner of the given dimension (P = 0).
Preconditioner identity_preconditioner(int dimension);

Eigen::VectorXd apply_preconditioner(const Preconditioner& M, const Eigen::VectorXd& v);

}  // namespace penpls
