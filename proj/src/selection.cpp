#include "penpls/selection.hpp"

#include "penpls/error.hpp"
#include "penpls/penalty.hpp"
#include "penpls/pls.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

namespace penpls {

std::vector<double> default_lambda_grid() {
  std::vector<double> g(20);
  for (int i = 0; i < 20; ++i) g[i] = std::pow(10.0, -2.0 + 8.0 * i / 19.0);
  return g;
}

PathModel fit_path(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda, int mMax,
                   const CvOptions& opts) {
  if (mMax < 1) throw InvalidConfiguration("maximum number of components must be >= 1");
  PathModel pm;
  try {
    pm.expansion = BasisExpansion::fit(X, opts.basis.K, opts.basis.degree);
  } catch (const DegenerateVariable& e) {
    if (opts.names.empty()) throw;
    // Rethrow naming the variable instead of its index.
    for (int j = 0; j < X.cols(); ++j) {
      const Eigen::VectorXd col = X.col(j);
      if ((col.array() == col[0]).all())
        throw DegenerateVariable("predictor '" + opts.names.at(j) + "' has fewer than 2 distinct values");
    }
    throw;
  }
  const Centered Z = center_columns(transform(X, pm.expansion));
  pm.columnMeans = Z.means;
  pm.response = response_scaling(y, opts.normalizeResponse);
  const Eigen::VectorXd yc = (y.array() - pm.response.mean) / pm.response.scale;

  pm.betaPath = Eigen::MatrixXd::Zero(Z.data.cols(), mMax);
  const bool constant =
      yc.cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, std::abs(pm.response.mean)) / pm.response.scale;
  if (constant) return pm;
  const auto penalty = PenaltySpec::shared(static_cast<int>(X.cols()), lambda, opts.basis.K, opts.q);
  try {
    const PlsFit fit = penalized_pls_fit(Z.data, yc, make_preconditioner(penalty), FitConfig{mMax});
    pm.achieved = fit.components();
    pm.betaPath.leftCols(pm.achieved) = fit.betaPath;
    for (int m = pm.achieved; m < mMax; ++m) pm.betaPath.col(m) = fit.betaPath.col(pm.achieved - 1);
  } catch (const DegenerateResponse&) {
    pm.achieved = 0;
  }
  return pm;
}

namespace {

void drop_row(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int i, Eigen::MatrixXd& Xt, Eigen::VectorXd& yt) {
  const auto n = X.rows();
  Xt.resize(n - 1, X.cols());
  yt.resize(n - 1);
  Xt.topRows(i) = X.topRows(i);
  Xt.bottomRows(n - 1 - i) = X.bottomRows(n - 1 - i);
  yt.head(i) = y.head(i);
  yt.tail(n - 1 - i) = y.tail(n - 1 - i);
}

}  // namespace

PathModel loo_fold_model(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, int heldOut, double lambda,
                         int mMax, const CvOptions& opts) {
  if (heldOut < 0 || heldOut >= X.rows()) throw InvalidConfiguration("held-out index out of range");
  Eigen::MatrixXd Xt;
  Eigen::VectorXd yt;
  drop_row(X, y, heldOut, Xt, yt);
  return fit_path(Xt, yt, lambda, mMax, opts);
}

Eigen::VectorXd score_path(const Eigen::MatrixXd& betaPath, const Eigen::RowVectorXd& row, double target) {
  if (betaPath.rows() != row.size()) throw ShapeError("score_path: row length does not match coefficients");
  const Eigen::RowVectorXd pred = row * betaPath;
  return (pred.array() - target).square().transpose();
}

Eigen::VectorXd held_out_errors(const PathModel& model, const Eigen::RowVectorXd& x, double y) {
  const Eigen::MatrixXd Z = transform(Eigen::MatrixXd(x), model.expansion);
  const Eigen::RowVectorXd zc = Z.row(0) - model.columnMeans;
  return score_path(model.betaPath, zc, (y - model.response.mean) / model.response.scale);
}

CvChoice choose(const CvGrid& grid) {
  CvChoice best;
  bool have = false;
  for (int l = 0; l < static_cast<int>(grid.lambdas.size()); ++l) {
    for (int m = 0; m < grid.mMax; ++m) {
      const double e = grid.errors(l, m);
      const int mm = m + 1;
      const double lam = grid.lambdas[l];
      bool better = !have || e < best.looError ||
                    (e == best.looError && (mm < best.mOpt || (mm == best.mOpt && lam > best.lambdaOpt)));
      if (better) {
        best = CvChoice{lam, mm, e, l};
        have = true;
      }
    }
  }
  return best;
}

CvResult loocv(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, std::span<const double> lambdas, int mMax,
               const CvOptions& opts) {
  const auto n = static_cast<int>(X.rows());
  if (n < 3) throw InvalidConfiguration("leave-one-out needs at least 3 observations");
  if (y.size() != n) throw ShapeError("X and y have different numbers of rows");
  if (lambdas.empty()) throw InvalidConfiguration("lambda grid is empty");
  if (mMax < 1) throw InvalidConfiguration("maximum number of components must be >= 1");
  for (double l : lambdas)
    if (!std::isfinite(l) || l < 0.0) throw InvalidConfiguration("lambda grid values must be finite and >= 0");

  const auto L = static_cast<Eigen::Index>(lambdas.size());
  // Per-fold squared errors, written by index so scheduling cannot change the result.
  std::vector<Eigen::MatrixXd> perFold(n);
  std::vector<std::exception_ptr> failures(n);
  auto runFold = [&](int i) {
    try {
      Eigen::MatrixXd Xt;
      Eigen::VectorXd yt;
      drop_row(X, y, i, Xt, yt);
      Eigen::MatrixXd errs(L, mMax);
      for (Eigen::Index l = 0; l < L; ++l) {
        const PathModel pm = fit_path(Xt, yt, lambdas[l], mMax, opts);
        errs.row(l) = held_out_errors(pm, X.row(i), y[i]).transpose();
      }
      perFold[i] = std::move(errs);
    } catch (...) {
      failures[i] = std::current_exception();
    }
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(n));
  if (threads <= 1) {
    for (int i = 0; i < n; ++i) runFold(i);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&, w] {
        for (int i = static_cast<int>(w); i < n; i += static_cast<int>(threads)) runFold(i);
      });
  }

  for (int i = 0; i < n; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const DegenerateVariable& e) {
      throw DegenerateVariable("fold " + std::to_string(i + 1) + ": " + e.what());
    }
  }

  CvResult res;
  res.grid.lambdas.assign(lambdas.begin(), lambdas.end());
  res.grid.mMax = mMax;
  res.grid.errors = Eigen::MatrixXd::Zero(L, mMax);
  for (int i = 0; i < n; ++i) res.grid.errors += perFold[i];
  res.grid.errors /= static_cast<double>(n);
  res.choice = choose(res.grid);
  return res;
}

}  // namespace penpls
