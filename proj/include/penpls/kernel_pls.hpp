#pragma once

#include "penpls/penalty.hpp"

#include <Eigen/Dense>

namespace penpls {

// Dual penalized PLS. Everything here is n x n or length n; the
// predictor dimension never enters.
struct KernelFit {
  Eigen::MatrixXd alphaPath;   // n x m, column i-1 holds alpha^(i)
  Eigen::MatrixXd alphaTilde;  // n x m, dual effective weights
  Eigen::MatrixXd fitted;      // n x m, yhat^(i)
  Eigen::MatrixXd T;           // n x m, t_i = K alphaTilde_i
  int requested = 0;

  int components() const { return static_cast<int>(T.cols()); }
  Eigen::VectorXd alpha() const { return alphaPath.col(alphaPath.cols() - 1); }
};

// K_M = X M X^T.
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X, const Preconditioner& M);

// Throws InvalidKernel if K is not symmetric positive semidefinite within
// round-off (min eigenvalue >= -1e-8 * max |eigenvalue|).
void require_psd_kernel(const Eigen::MatrixXd& K);

KernelFit kernel_penalized_pls_fit(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, int m,
                                   double componentNormTol = 1e-10);

// beta = M X^T alpha.
Eigen::VectorXd primal_coefficients(const Eigen::MatrixXd& X, const Preconditioner& M,
                                    const Eigen::VectorXd& alpha);

}  // namespace penpls
