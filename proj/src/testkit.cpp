#include "penpls/testkit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace penpls::testkit {

double Rng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Eigen::MatrixXd Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd A(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) A(i, j) = normal();
  return A;
}

Eigen::VectorXd Rng::normal_vector(Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal();
  return v;
}

double eval_truth(Truth f, double x) {
  switch (f) {
    case Truth::Linear:
      return 2.0 * x - 1.0;
    case Truth::Quadratic:
      return 4.0 * (x - 0.5) * (x - 0.5);
    case Truth::Sine:
      return std::sin(2.0 * std::numbers::pi * x);
    case Truth::Step:
      return x > 0.5 ? 1.0 : 0.0;
  }
  return 0.0;
}

Truth parse_truth(const std::string& name) {
  if (name == "linear") return Truth::Linear;
  if (name == "quadratic") return Truth::Quadratic;
  if (name == "sine") return Truth::Sine;
  if (name == "step") return Truth::Step;
  throw std::invalid_argument("unknown truth function '" + name + "'");
}

std::string truth_name(Truth f) {
  switch (f) {
    case Truth::Linear:
      return "linear";
    case Truth::Quadratic:
      return "quadratic";
    case Truth::Sine:
      return "sine";
    case Truth::Step:
      return "step";
  }
  return "?";
}

SyntheticData gen_additive(const SyntheticSpec& spec) {
  if (spec.p < 1) throw std::invalid_argument("synthetic data needs p >= 1");
  if (spec.n < 1) throw std::invalid_argument("synthetic data needs n >= 1");
  if (spec.truths.empty()) throw std::invalid_argument("no truth functions given");
  Rng rng(spec.seed);
  SyntheticData d;
  for (int j = 0; j < spec.p; ++j) d.truths.push_back(spec.truths[j % spec.truths.size()]);
  d.X.resize(spec.n, spec.p);
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.p; ++j) d.X(i, j) = rng.uniform();
  d.y.resize(spec.n);
  for (int i = 0; i < spec.n; ++i) {
    double v = 0.0;
    for (int j = 0; j < spec.p; ++j) v += eval_truth(d.truths[j], d.X(i, j));
    d.y[i] = v + spec.noise * rng.normal();
  }
  return d;
}

Eigen::VectorXd dense_ls_oracle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  Eigen::VectorXd coef = svd.matrixU().transpose() * y;
  const double cut = s.size() ? 1e-10 * s[0] : 0.0;
  for (Eigen::Index k = 0; k < s.size(); ++k) coef[k] = s[k] > cut ? coef[k] / s[k] : 0.0;
  return svd.matrixV() * coef;
}

Eigen::MatrixXd krylov_basis(const LinearMap& A, const Eigen::VectorXd& b, int m) {
  if (m < 1) throw std::invalid_argument("krylov_basis needs m >= 1");
  Eigen::MatrixXd K(b.size(), m);
  Eigen::VectorXd v = b;
  for (int k = 0; k < m; ++k) {
    const double nv = v.norm();
    if (nv > 0.0) v /= nv;
    K.col(k) = v;
    v = A(v);
  }
  return K;
}

int numerical_rank(const Eigen::MatrixXd& A, double relTol) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s[0] == 0.0) return 0;
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s[k] > relTol * s[0]) ++r;
  return r;
}

Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& A) {
  Eigen::MatrixXd B = A;
  for (Eigen::Index j = 0; j < B.cols(); ++j) {
    const double n = B.col(j).norm();
    if (n > 0.0) B.col(j) /= n;
  }
  return B;
}

Eigen::MatrixXd metric_factor(const Eigen::MatrixXd& M) {
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw std::runtime_error("metric_factor: matrix not positive definite");
  return llt.matrixL();
}

Eigen::MatrixXd centered(const Eigen::MatrixXd& A) { return A.rowwise() - A.colwise().mean(); }

Eigen::VectorXd centered(const Eigen::VectorXd& y) { return y.array() - y.mean(); }

Eigen::MatrixXd random_psd(Rng& rng, int d, int k) {
  const Eigen::MatrixXd G = rng.normal_matrix(d, k);
  Eigen::MatrixXd S = G * G.transpose() / static_cast<double>(k);
  return 0.5 * (S + S.transpose());
}

}  // namespace penpls::testkit
