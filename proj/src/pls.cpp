#include "penpls/pls.hpp"

#include "penpls/error.hpp"

#include <cmath>
#include <string>

namespace penpls {

void FitConfig::validate() const {
  if (m < 1) throw InvalidConfiguration("number of components must be >= 1");
  if (!(componentNormTol > 0.0 && componentNormTol < 1.0))
    throw InvalidConfiguration("component norm tolerance must lie in (0, 1)");
}

void require_centered(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() != y.size())
    throw ShapeError("X has " + std::to_string(X.rows()) + " rows but y has " + std::to_string(y.size()));
  auto check = [](const auto& col, const std::string& what) {
    const double scale = col.cwiseAbs().maxCoeff();
    if (std::abs(col.mean()) > 1e-8 * scale)
      throw PreconditionViolation(what + " is not centered");
  };
  if (X.rows() == 0) throw ShapeError("empty data");
  for (Eigen::Index j = 0; j < X.cols(); ++j) check(X.col(j), "column " + std::to_string(j) + " of X");
  check(y, "response");
}

namespace {

struct Trace {
  std::vector<Eigen::VectorXd> w, wt, t, beta;

  PlsFit finish(const Eigen::MatrixXd& X, int requested) const {
    const auto d = X.cols();
    const auto n = X.rows();
    const auto m = static_cast<Eigen::Index>(t.size());
    PlsFit fit;
    fit.requested = requested;
    fit.W.resize(d, m);
    fit.Wtilde.resize(d, m);
    fit.T.resize(n, m);
    fit.betaPath.resize(d, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      fit.W.col(i) = w[i];
      fit.Wtilde.col(i) = wt[i];
      fit.T.col(i) = t[i];
      fit.betaPath.col(i) = beta[i];
    }
    fit.R = fit.T.transpose() * (X * fit.W);
    return fit;
  }
};

void deflate(Eigen::MatrixXd& Xi, const Eigen::VectorXd& t) {
  const Eigen::RowVectorXd proj = (t.transpose() * Xi) / t.squaredNorm();
  Xi.noalias() -= t * proj;
}

}  // namespace

PlsFit nipals_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const FitConfig& cfg) {
  cfg.validate();
  require_centered(X, y);
  Trace tr;
  Eigen::MatrixXd Xi = X;
  double t1 = 0.0;
  for (int i = 0; i < cfg.m; ++i) {
    Eigen::VectorXd w = Xi.transpose() * y;
    Eigen::VectorXd t = Xi * w;
    const double tn = t.norm();
    if (i == 0) {
      if (!(tn > 0.0)) throw DegenerateResponse("response has no covariance with the predictors");
      t1 = tn;
    } else if (tn <= cfg.componentNormTol * t1) {
      break;
    }
    deflate(Xi, t);
    tr.w.push_back(std::move(w));
    tr.t.push_back(std::move(t));
  }

  // X W = T S with S = (T^T T)^{-1} T^T X W upper triangular, hence
  // Wtilde = W S^{-1} and beta^(i) = sum_{k<=i} (t_k^T y / t_k^T t_k) wtilde_k.
  const auto m = static_cast<Eigen::Index>(tr.t.size());
  Eigen::MatrixXd W(X.cols(), m), T(X.rows(), m);
  for (Eigen::Index i = 0; i < m; ++i) {
    W.col(i) = tr.w[i];
    T.col(i) = tr.t[i];
  }
  const Eigen::VectorXd tt = T.colwise().squaredNorm().transpose();
  Eigen::MatrixXd S = (T.transpose() * (X * W));
  S = tt.cwiseInverse().asDiagonal() * S;
  const Eigen::MatrixXd Wt =
      S.transpose().triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    beta += (T.col(i).dot(y) / tt[i]) * Wt.col(i);
    tr.wt.push_back(Wt.col(i));
    tr.beta.push_back(beta);
  }
  return tr.finish(X, cfg.m);
}

PlsFit penalized_pls_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Preconditioner& M,
                         const FitConfig& cfg) {
  cfg.validate();
  require_centered(X, y);
  if (M.dimension() != X.cols())
    throw ShapeError("preconditioner dimension " + std::to_string(M.dimension()) + " does not match " +
                     std::to_string(X.cols()) + " predictors");
  Trace tr;
  Eigen::MatrixXd Xi = X;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(X.cols());
  Eigen::VectorXd wtPrev, XwtPrev;
  double t1 = 0.0;
  for (int i = 0; i < cfg.m; ++i) {
    Eigen::VectorXd w = M.apply(Eigen::VectorXd(Xi.transpose() * y));
    Eigen::VectorXd t = Xi * w;
    const double tn = t.norm();
    if (i == 0) {
      if (!(tn > 0.0)) throw DegenerateResponse("response has no covariance with the predictors");
      t1 = tn;
    } else if (tn <= cfg.componentNormTol * t1) {
      break;
    }

    Eigen::VectorXd wt = w;
    if (i > 0) {
      const Eigen::VectorXd Xw = X * w;
      wt -= (XwtPrev.dot(Xw) / XwtPrev.squaredNorm()) * wtPrev;
    }
    Eigen::VectorXd Xwt = X * wt;
    const double gram = Xwt.squaredNorm();
    if (!(gram > 0.0)) break;
    beta += (Xwt.dot(y) / gram) * wt;

    deflate(Xi, t);
    tr.w.push_back(std::move(w));
    tr.t.push_back(std::move(t));
    tr.wt.push_back(wt);
    tr.beta.push_back(beta);
    wtPrev = std::move(wt);
    XwtPrev = std::move(Xwt);
  }
  return tr.finish(X, cfg.m);
}

Eigen::VectorXd closed_form_beta(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::MatrixXd& W) {
  if (X.cols() != W.rows()) throw ShapeError("closed_form_beta: W rows do not match X columns");
  if (X.rows() != y.size()) throw ShapeError("closed_form_beta: y length does not match X rows");
  Eigen::MatrixXd XW = X * W;
  // Column equilibration leaves the solution unchanged and keeps the Gram
  // matrix well scaled.
  Eigen::VectorXd scale = XW.colwise().norm().transpose();
  for (Eigen::Index k = 0; k < scale.size(); ++k)
    if (scale[k] == 0.0) scale[k] = 1.0;
  XW = XW * scale.cwiseInverse().asDiagonal();
  const Eigen::MatrixXd G = XW.transpose() * XW;
  const Eigen::VectorXd rhs = XW.transpose() * y;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  const double cutoff = 1e-10 * G.trace();
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * rhs;
  Eigen::VectorXd coef = Eigen::VectorXd::Zero(proj.size());
  for (Eigen::Index k = 0; k < proj.size(); ++k)
    if (eig.eigenvalues()[k] > cutoff) coef[k] = proj[k] / eig.eigenvalues()[k];
  const Eigen::VectorXd a = eig.eigenvectors() * coef;
  return W * (scale.cwiseInverse().asDiagonal() * a);
}

Eigen::VectorXd fitted_values(const PlsFit& fit, const Eigen::MatrixXd& X) {
  if (fit.components() == 0) return Eigen::VectorXd::Zero(X.rows());
  return X * fit.beta();
}

Eigen::VectorXd projected_values(const PlsFit& fit, const Eigen::VectorXd& y) {
  if (fit.components() == 0) return Eigen::VectorXd::Zero(y.size());
  // Components are mutually orthogonal, so the projection is a sum of
  // rank-one projections.
  Eigen::VectorXd out = Eigen::VectorXd::Zero(y.size());
  for (Eigen::Index i = 0; i < fit.T.cols(); ++i) {
    const auto t = fit.T.col(i);
    out += (t.dot(y) / t.squaredNorm()) * t;
  }
  return out;
}

}  // namespace penpls
