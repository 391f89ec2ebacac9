#include "penpls/gam.hpp"

#include "penpls/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace penpls {

Centered center_columns(const Eigen::MatrixXd& Z) {
  Centered c;
  c.means = Z.colwise().mean();
  c.data = Z.rowwise() - c.means;
  return c;
}

ResponseScaling response_scaling(const Eigen::VectorXd& y, bool normalize) {
  ResponseScaling s;
  s.mean = y.mean();
  if (normalize && y.size() > 1) {
    const double var = (y.array() - s.mean).square().sum() / static_cast<double>(y.size() - 1);
    if (var > 0.0 && std::sqrt(var) > 1e-12 * std::max(1.0, std::abs(s.mean))) s.scale = std::sqrt(var);
  }
  return s;
}

GamModel fit_gam(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const PenaltySpec& penalty,
                 const BasisConfig& basis, int m, bool normalizeResponse) {
  if (X.rows() != y.size()) throw ShapeError("X and y have different numbers of rows");
  if (X.rows() < 3) throw InvalidConfiguration("need at least 3 observations");
  if (penalty.K != basis.K)
    throw InvalidConfiguration("penalty basis size " + std::to_string(penalty.K) + " differs from basis size " +
                               std::to_string(basis.K));
  if (penalty.variables() != X.cols())
    throw InvalidConfiguration("penalty has " + std::to_string(penalty.variables()) + " smoothing parameters for " +
                               std::to_string(X.cols()) + " predictors");
  FitConfig cfg{m};
  cfg.validate();
  penalty.validate();

  GamModel model;
  model.expansion = BasisExpansion::fit(X, basis.K, basis.degree);
  model.penalty = penalty;
  model.requestedComponents = m;
  model.normalizeResponse = normalizeResponse;

  const Centered Z = center_columns(transform(X, model.expansion));
  model.columnMeans = Z.means;
  const ResponseScaling rs = response_scaling(y, normalizeResponse);
  model.intercept = rs.mean;
  model.responseScale = rs.scale;
  const Eigen::VectorXd yc = (y.array() - rs.mean) / rs.scale;

  model.beta = Eigen::VectorXd::Zero(Z.data.cols());
  const bool constant = yc.cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, std::abs(rs.mean)) / rs.scale;
  if (!constant) {
    try {
      const PlsFit fit = penalized_pls_fit(Z.data, yc, make_preconditioner(penalty), cfg);
      model.components = fit.components();
      model.beta = fit.beta();
    } catch (const DegenerateResponse&) {
      model.components = 0;
    }
  }
  model.fitted = predict(model, X);
  return model;
}

Eigen::VectorXd predict(const GamModel& model, const Eigen::MatrixXd& Xnew) {
  if (Xnew.cols() != model.variables())
    throw ShapeError("model expects " + std::to_string(model.variables()) + " predictors, got " +
                     std::to_string(Xnew.cols()));
  const Eigen::MatrixXd Z = transform(Xnew, model.expansion).rowwise() - model.columnMeans;
  return (model.responseScale * (Z * model.beta)).array() + model.intercept;
}

Eigen::VectorXd component_values(const GamModel& model, int j, const Eigen::VectorXd& x) {
  if (j < 0 || j >= model.variables())
    throw InvalidConfiguration("variable index " + std::to_string(j) + " out of range");
  const auto& b = model.expansion.basis(j);
  const int off = model.expansion.offset(j);
  const Eigen::VectorXd coef = model.beta.segment(off, b.size());
  const Eigen::RowVectorXd means = model.columnMeans.segment(off, b.size());
  Eigen::VectorXd out(x.size());
  Eigen::VectorXd row(b.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    b.eval_into(x[i], row);
    out[i] = model.responseScale * (row.transpose() - means).dot(coef);
  }
  return out;
}

FittedFunction fitted_function(const GamModel& model, int j, int gridSize) {
  if (j < 0 || j >= model.variables())
    throw InvalidConfiguration("variable index " + std::to_string(j) + " out of range");
  if (gridSize < 2) throw InvalidConfiguration("grid size must be >= 2");
  const auto& b = model.expansion.basis(j);
  FittedFunction f;
  f.variable = j;
  f.grid = Eigen::VectorXd::LinSpaced(gridSize, b.lower(), b.upper());
  f.grid[gridSize - 1] = b.upper();
  f.values = component_values(model, j, f.grid);
  return f;
}

double roughness(const Eigen::VectorXd& values) {
  double s = 0.0;
  for (Eigen::Index i = 2; i < values.size(); ++i) {
    const double d2 = values[i] - 2.0 * values[i - 1] + values[i - 2];
    s += d2 * d2;
  }
  return s;
}

}  // namespace penpls
