#include "penpls/kernel_pls.hpp"

#include "penpls/error.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace penpls {

Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& X, const Preconditioner& M) {
  if (X.cols() != M.dimension())
    throw ShapeError("gram_matrix: X has " + std::to_string(X.cols()) + " columns, preconditioner " +
                     std::to_string(M.dimension()));
  const Eigen::MatrixXd MXt = M.apply(Eigen::MatrixXd(X.transpose()));
  Eigen::MatrixXd K = X * MXt;
  return 0.5 * (K + K.transpose());
}

void require_psd_kernel(const Eigen::MatrixXd& K) {
  if (K.rows() != K.cols()) throw ShapeError("kernel matrix is not square");
  if (K.size() == 0) throw ShapeError("empty kernel matrix");
  const double scale = K.cwiseAbs().maxCoeff();
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw InvalidKernel("kernel matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double big = ev.cwiseAbs().maxCoeff();
  if (ev.minCoeff() < -1e-8 * big)
    throw InvalidKernel("kernel matrix has a negative eigenvalue " + std::to_string(ev.minCoeff()));
}

KernelFit kernel_penalized_pls_fit(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, int m,
                                   double componentNormTol) {
  if (m < 1) throw InvalidConfiguration("number of components must be >= 1");
  require_psd_kernel(K);
  if (K.rows() != y.size()) throw ShapeError("kernel and response sizes differ");
  const auto n = y.size();

  std::vector<Eigen::VectorXd> alphas, tildes, fits, comps;
  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd yhat = Eigen::VectorXd::Zero(n);
  const double ynorm = y.norm();
  double t1 = 0.0;
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd res = y - yhat;
    if (!(res.norm() > componentNormTol * ynorm)) break;

    // alpha~^T K^2 v is evaluated as (K alpha~)^T (K v); K^2 is never formed.
    // Only the latest previous term is nonzero in exact arithmetic; the full
    // sweep keeps the components orthogonal in floating point.
    Eigen::VectorXd tilde = res;
    Eigen::VectorXd t = K * res;
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t j = 0; j < comps.size(); ++j) {
        const double c = comps[j].dot(t) / comps[j].squaredNorm();
        tilde -= c * tildes[j];
        t -= c * comps[j];
      }
    const double tn = t.norm();
    if (i == 0) {
      if (!(tn > 0.0)) break;
      t1 = tn;
    } else if (tn <= componentNormTol * t1) {
      break;
    }
    const double coef = t.dot(res) / t.squaredNorm();
    alpha += coef * tilde;
    yhat += coef * t;

    alphas.push_back(alpha);
    tildes.push_back(tilde);
    fits.push_back(yhat);
    comps.push_back(t);
  }

  KernelFit fit;
  fit.requested = m;
  const auto k = static_cast<Eigen::Index>(comps.size());
  fit.alphaPath.resize(n, k);
  fit.alphaTilde.resize(n, k);
  fit.fitted.resize(n, k);
  fit.T.resize(n, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    fit.alphaPath.col(i) = alphas[i];
    fit.alphaTilde.col(i) = tildes[i];
    fit.fitted.col(i) = fits[i];
    fit.T.col(i) = comps[i];
  }
  return fit;
}

Eigen::VectorXd primal_coefficients(const Eigen::MatrixXd& X, const Preconditioner& M,
                                    const Eigen::VectorXd& alpha) {
  if (X.rows() != alpha.size()) throw ShapeError("alpha length does not match X rows");
  return M.apply(Eigen::VectorXd(X.transpose() * alpha));
}

}  // namespace penpls
