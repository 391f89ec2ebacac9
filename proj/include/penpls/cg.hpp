#pragma once

#include "penpls/penalty.hpp"

#include <Eigen/Dense>

#include <vector>

namespace penpls {

// Conjugate gradients for M X^T X beta = M X^T y in the inner product
// <u, v> = u^T (I + P) v. Kept literal (full-history direction
// projection) so it can serve as a reference for penalized PLS.
struct CgState {
  std::vector<Eigen::VectorXd> history;     // beta_0 .. beta_m
  std::vector<Eigen::VectorXd> directions;  // d_0 .. d_{m-1}
  std::vector<Eigen::VectorXd> residuals;   // r_0 .. r_m
  std::vector<double> steps;                // a_0 .. a_{m-1}

  int iterations() const { return static_cast<int>(steps.size()); }
  const Eigen::VectorXd& beta() const { return history.back(); }
};

// u^T (I + P) v
double weighted_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::MatrixXd& P);
double weighted_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Preconditioner& M);

// 1/2 beta^T A beta - beta^T b with A = X^T X, b = X^T y.
double cg_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta);

// Runs up to m steps. Stops early when the residual falls below
// residualTol * ||r_0|| in the M^{-1} norm.
CgState pcg_run(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Preconditioner& M, int m,
                double residualTol = 1e-10);

// beta_1 .. beta_m as the columns of a matrix.
Eigen::MatrixXd pcg_iterates(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Preconditioner& M, int m);

}  // namespace penpls
