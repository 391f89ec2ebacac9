#include "penpls/penalty.hpp"

#include "penpls/error.hpp"

#include <cmath>
#include <string>

namespace penpls {

PenaltySpec PenaltySpec::shared(int p, double lambda, int K, int q) {
  PenaltySpec spec;
  spec.lambdas.assign(p, lambda);
  spec.q = q;
  spec.K = K;
  return spec;
}

void PenaltySpec::validate() const {
  if (lambdas.empty()) throw InvalidConfiguration("penalty needs at least one variable");
  for (double l : lambdas)
    if (!std::isfinite(l) || l < 0.0)
      throw InvalidConfiguration("smoothing parameter must be finite and >= 0");
  if (K < 2) throw InvalidConfiguration("basis size must be >= 2 for a difference penalty");
  if (q < 1 || q > K - 1)
    throw InvalidConfiguration("difference order " + std::to_string(q) + " outside [1, " +
                               std::to_string(K - 1) + "]");
}

Eigen::MatrixXd difference_matrix(int K) {
  if (K < 2) throw InvalidConfiguration("difference_matrix needs K >= 2");
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(K - 1, K);
  for (int r = 0; r < K - 1; ++r) {
    D(r, r) = 1.0;
    D(r, r + 1) = -1.0;
  }
  return D;
}

Eigen::MatrixXd penalty_kernel(int K, int q) {
  if (K < 2 || q < 1 || q > K - 1)
    throw InvalidConfiguration("penalty_kernel needs 1 <= q <= K-1 (K=" + std::to_string(K) +
                               ", q=" + std::to_string(q) + ")");
  Eigen::MatrixXd Dq = difference_matrix(K);
  for (int r = 1; r < q; ++r) Dq = difference_matrix(K - r) * Dq;
  Eigen::MatrixXd Kq = Dq.transpose() * Dq;
  // Integer entries; enforce exact symmetry.
  return 0.5 * (Kq + Kq.transpose());
}

Eigen::MatrixXd assemble_penalty(const PenaltySpec& spec) {
  spec.validate();
  const Eigen::MatrixXd Kq = penalty_kernel(spec.K, spec.q);
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(spec.dimension(), spec.dimension());
  for (int j = 0; j < spec.variables(); ++j)
    P.block(j * spec.K, j * spec.K, spec.K, spec.K) = spec.lambdas[j] * Kq;
  return P;
}

Preconditioner::Preconditioner(std::vector<Eigen::MatrixXd> penaltyBlocks)
    : penalty_(std::move(penaltyBlocks)) {
  factors_.reserve(penalty_.size());
  for (std::size_t j = 0; j < penalty_.size(); ++j) {
    const auto& Pj = penalty_[j];
    if (Pj.rows() != Pj.cols()) throw ShapeError("penalty block " + std::to_string(j) + " is not square");
    if (!Pj.isApprox(Pj.transpose(), 1e-12) && Pj.size() > 0)
      throw InvalidConfiguration("penalty block " + std::to_string(j) + " is not symmetric");
    offsets_.push_back(dim_);
    dim_ += static_cast<int>(Pj.rows());
    Eigen::MatrixXd IP = Pj;
    IP.diagonal().array() += 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(IP);
    if (llt.info() != Eigen::Success)
      throw NumericalError("I + P is not positive definite in block " + std::to_string(j));
    factors_.push_back(std::move(llt));
  }
}

Eigen::VectorXd Preconditioner::apply(const Eigen::VectorXd& v) const {
  if (v.size() != dim_)
    throw ShapeError("preconditioner of dimension " + std::to_string(dim_) + " applied to vector of length " +
                     std::to_string(v.size()));
  Eigen::VectorXd out(dim_);
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    const auto n = penalty_[j].rows();
    out.segment(offsets_[j], n) = factors_[j].solve(v.segment(offsets_[j], n));
  }
  return out;
}

Eigen::MatrixXd Preconditioner::apply(const Eigen::MatrixXd& V) const {
  if (V.rows() != dim_) throw ShapeError("preconditioner row mismatch");
  Eigen::MatrixXd out(V.rows(), V.cols());
  for (std::size_t j = 0; j < factors_.size(); ++j) {
    const auto n = penalty_[j].rows();
    out.middleRows(offsets_[j], n) = factors_[j].solve(V.middleRows(offsets_[j], n));
  }
  return out;
}

Eigen::VectorXd Preconditioner::apply_metric(const Eigen::VectorXd& v) const {
  if (v.size() != dim_) throw ShapeError("metric applied to vector of wrong length");
  Eigen::VectorXd out = v;
  for (std::size_t j = 0; j < penalty_.size(); ++j) {
    const auto n = penalty_[j].rows();
    out.segment(offsets_[j], n).noalias() += penalty_[j] * v.segment(offsets_[j], n);
  }
  return out;
}

Eigen::MatrixXd Preconditioner::dense() const {
  return apply(Eigen::MatrixXd(Eigen::MatrixXd::Identity(dim_, dim_)));
}

Preconditioner make_preconditioner(const PenaltySpec& spec) {
  spec.validate();
  const Eigen::MatrixXd Kq = penalty_kernel(spec.K, spec.q);
  std::vector<Eigen::MatrixXd> blocks;
  blocks.reserve(spec.variables());
  for (double l : spec.lambdas) blocks.push_back(l * Kq);
  return Preconditioner(std::move(blocks));
}

Preconditioner identity_preconditioner(int dimension) {
  return Preconditioner({Eigen::MatrixXd::Zero(dimension, dimension)});
}

Eigen::VectorXd apply_preconditioner(const Preconditioner& M, const Eigen::VectorXd& v) { return M.apply(v); }

}  // namespace penpls
