#pragma once

#include "penpls/penalty.hpp"
#include "penpls/pls.hpp"
#include "penpls/splines.hpp"

#include <Eigen/Dense>

namespace penpls {

struct BasisConfig {
  int K = kDefaultBasisSize;
  int degree = kDefaultDegree;
};

// Column means and the centered copy of a design matrix.
struct Centered {
  Eigen::MatrixXd data;
  Eigen::RowVectorXd means;
};
Centered center_columns(const Eigen::MatrixXd& Z);

// Mean and scale of the response as used internally. scale is the sample
// standard deviation when normalization is on (and the response is not
// constant), otherwise 1.
struct ResponseScaling {
  double mean = 0.0;
  double scale = 1.0;
};
ResponseScaling response_scaling(const Eigen::VectorXd& y, bool normalize);

// An additive model f(x) = intercept + scale * sum_j sum_k beta_kj (B_kj(x_j) - zbar_kj).
struct GamModel {
  BasisExpansion expansion;
  PenaltySpec penalty;
  int requestedComponents = 0;
  int components = 0;  // achieved; 0 when the response carries no signal
  Eigen::VectorXd beta;
  double intercept = 0.0;  // training mean of y
  Eigen::RowVectorXd columnMeans;
  double responseScale = 1.0;
  bool normalizeResponse = false;
  Eigen::VectorXd fitted;  // in-sample fitted values

  int variables() const { return expansion.variables(); }
  // Achieved fewer components than requested.
  bool truncated() const { return components < requestedComponents; }
};

GamModel fit_gam(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const PenaltySpec& penalty,
                 const BasisConfig& basis, int m, bool normalizeResponse = false);

Eigen::VectorXd predict(const GamModel& model, const Eigen::MatrixXd& Xnew);

// f_j at arbitrary abscissae, centered so its mean over the training data is zero.
Eigen::VectorXd component_values(const GamModel& model, int j, const Eigen::VectorXd& x);

struct FittedFunction {
  int variable = 0;
  Eigen::VectorXd grid;
  Eigen::VectorXd values;
};

// f_j on gridSize equispaced points spanning the training range of variable j
// (0-based index).
FittedFunction fitted_function(const GamModel& model, int j, int gridSize);

// Sum of squared second differences of values.
double roughness(const Eigen::VectorXd& values);

}  // namespace penpls
