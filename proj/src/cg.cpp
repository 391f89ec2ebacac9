#include "penpls/cg.hpp"

#include "penpls/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace penpls {

double weighted_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Eigen::MatrixXd& P) {
  if (u.size() != v.size() || P.rows() != u.size() || P.cols() != u.size())
    throw ShapeError("weighted_inner: shape mismatch");
  return u.dot(v) + u.dot(P * v);
}

double weighted_inner(const Eigen::VectorXd& u, const Eigen::VectorXd& v, const Preconditioner& M) {
  if (u.size() != v.size()) throw ShapeError("weighted_inner: shape mismatch");
  return u.dot(M.apply_metric(v));
}

double cg_objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& beta) {
  return 0.5 * (X * beta).squaredNorm() - beta.dot(X.transpose() * y);
}

CgState pcg_run(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Preconditioner& M, int m,
                double residualTol) {
  if (m < 1) throw InvalidConfiguration("number of iterations must be >= 1");
  if (X.rows() != y.size()) throw ShapeError("pcg: X rows and y length differ");
  if (X.cols() != M.dimension()) throw ShapeError("pcg: preconditioner dimension mismatch");

  const auto A_M = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    return M.apply(Eigen::VectorXd(X.transpose() * (X * v)));
  };
  const auto inner = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) { return weighted_inner(u, v, M); };

  const Eigen::VectorXd b = M.apply(Eigen::VectorXd(X.transpose() * y));
  CgState st;
  st.history.push_back(Eigen::VectorXd::Zero(X.cols()));
  st.residuals.push_back(b);
  Eigen::VectorXd d = b;
  const double r0 = std::sqrt(inner(b, b));
  if (!(r0 > 0.0)) return st;

  std::vector<Eigen::VectorXd> Ad;  // A_M d_i
  std::vector<double> dAd;          // <d_i, A_M d_i>
  for (int k = 0; k < m; ++k) {
    const Eigen::VectorXd& r = st.residuals.back();
    if (std::sqrt(std::max(inner(r, r), 0.0)) <= residualTol * r0) break;

    Eigen::VectorXd Adk = A_M(d);
    const double den = inner(d, Adk);
    if (!(den > 0.0))
      throw NumericalError("conjugate gradient breakdown: <d, A_M d> = " + std::to_string(den));
    const double a = inner(d, r) / den;
    Eigen::VectorXd beta = st.history.back() + a * d;
    Eigen::VectorXd rNext = b - A_M(beta);

    st.directions.push_back(d);
    st.steps.push_back(a);
    Ad.push_back(std::move(Adk));
    dAd.push_back(den);
    st.history.push_back(std::move(beta));

    Eigen::VectorXd dNext = rNext;
    for (std::size_t i = 0; i < Ad.size(); ++i)
      dNext -= (inner(rNext, Ad[i]) / dAd[i]) * st.directions[i];
    st.residuals.push_back(std::move(rNext));
    d = std::move(dNext);
  }
  return st;
}

Eigen::MatrixXd pcg_iterates(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Preconditioner& M, int m) {
  const CgState st = pcg_run(X, y, M, m);
  Eigen::MatrixXd out(X.cols(), st.iterations());
  for (int k = 0; k < st.iterations(); ++k) out.col(k) = st.history[k + 1];
  return out;
}

}  // namespace penpls
