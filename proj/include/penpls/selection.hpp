#pragma once

#include "penpls/gam.hpp"
#include "penpls/splines.hpp"

#include <Eigen/Dense>

#include <span>
#include <string>
#include <vector>

namespace penpls {

// 20 log-spaced values from 1e-2 to 1e6.
std::vector<double> default_lambda_grid();

struct CvOptions {
  BasisConfig basis;
  int q = kDefaultDiffOrder;
  bool normalizeResponse = false;
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 0;
  // Predictor names for diagnostics; may be empty.
  std::vector<std::string> names;
};

struct CvGrid {
  std::vector<double> lambdas;
  int mMax = 0;
  Eigen::MatrixXd errors;  // lambdas.size() x mMax mean squared LOO errors
};

struct CvChoice {
  double lambdaOpt = 0.0;
  int mOpt = 0;
  double looError = 0.0;
  int lambdaIndex = 0;
};

struct CvResult {
  CvGrid grid;
  CvChoice choice;
};

// Everything fitted on one training fold for one lambda: preprocessing
// statistics plus the coefficient path up to mMax. Entries beyond the
// achieved number of components repeat the last coefficient vector.
struct PathModel {
  BasisExpansion expansion;
  Eigen::RowVectorXd columnMeans;
  ResponseScaling response;
  Eigen::MatrixXd betaPath;  // pK x mMax
  int achieved = 0;
};

PathModel fit_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, int mMax,
                   const CvOptions& opts);

// The model fitted when row heldOut is left out.
PathModel loo_fold_model(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int heldOut, double lambda,
                         int mMax, const CvOptions& opts);

// (target - row . beta^(m))^2 for every column of the path.
Eigen::VectorXd score_path(const Eigen::MatrixXd& betaPath, const Eigen::RowVectorXd& row, double target);

// Squared errors of the held-out row, measured on the fold's internal
// (centered and, if enabled, normalized) response scale.
Eigen::VectorXd held_out_errors(const PathModel& model, const Eigen::RowVectorXd& x, double y);

// Leave-one-out over the (lambda, m) grid, one path fit per fold and lambda.
// Ties go to the smaller m, then the larger lambda.
CvResult loocv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const double> lambdas, int mMax,
               const CvOptions& opts);

CvChoice choose(const CvGrid& grid);

}  // namespace penpls
