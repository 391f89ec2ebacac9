#pragma once

#include "penpls/penalty.hpp"

#include <Eigen/Dense>

#include <vector>

namespace penpls {

struct FitConfig {
  int m = 1;
  // Stop once ||t_i|| <= componentNormTol * ||t_1||.
  double componentNormTol = 1e-10;

  void validate() const;
};

// Result of a primal PLS fit. Vectors are kept unscaled: w_i, t_i and the
// effective weights are exactly what the recursions produce.
struct PlsFit {
  Eigen::MatrixXd W;         // d x m, weight vectors w_i
  Eigen::MatrixXd Wtilde;    // d x m, effective weights with X wtilde_i = t_i
  Eigen::MatrixXd T;         // n x m, components
  Eigen::MatrixXd betaPath;  // d x m, column i-1 holds beta^(i)
  Eigen::MatrixXd R;         // m x m, T^T X W
  int requested = 0;

  int components() const { return static_cast<int>(T.cols()); }
  bool stopped_early() const { return components() < requested; }
  Eigen::VectorXd beta() const { return betaPath.col(betaPath.cols() - 1); }
};

// Throws PreconditionViolation unless every column of X and y has mean
// within 1e-8 of its scale.
void require_centered(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

// Ordinary PLS via NIPALS with rank-one deflation. Effective weights come
// from the triangular relation X W = T (T^T T)^{-1} R.
PlsFit nipals_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& cfg);

// Penalized PLS: w_i = M X_i^T y, effective weights and coefficients by
// the two-term recursion over the previous effective weight.
PlsFit penalized_pls_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Preconditioner& M,
                         const FitConfig& cfg);

// W (W^T X^T X W)^{-1} W^T X^T y. A rank-deficient Gram matrix is
// pseudo-inverted with eigenvalues below 1e-10 * trace treated as zero.
Eigen::VectorXd closed_form_beta(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::MatrixXd& W);

// X beta^(m).
Eigen::VectorXd fitted_values(const PlsFit& fit, const Eigen::MatrixXd& X);

// Orthogonal projection of y onto span(T).
Eigen::VectorXd projected_values(const PlsFit& fit, const Eigen::VectorXd& y);

}  // namespace penpls
