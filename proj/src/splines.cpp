#include "penpls/splines.hpp"

#include "penpls/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace penpls {

SplineBasis::SplineBasis(int degree, std::vector<double> knots)
    : degree_(degree), knots_(std::move(knots)) {
  if (degree_ < 0) throw InvalidConfiguration("spline degree must be >= 0");
  if (static_cast<int>(knots_.size()) < 2 * (degree_ + 1))
    throw InvalidConfiguration("knot vector too short for degree " + std::to_string(degree_));
  if (!std::is_sorted(knots_.begin(), knots_.end()))
    throw InvalidConfiguration("knot vector must be nondecreasing");
  if (!(knots_.front() < knots_.back()))
    throw InvalidConfiguration("knot vector spans an empty interval");
}

Eigen::VectorXd SplineBasis::eval(double x) const {
  Eigen::VectorXd out(size());
  eval_into(x, out);
  return out;
}

void SplineBasis::eval_into(double x, Eigen::Ref<Eigen::VectorXd> out) const {
  const int K = size();
  out.setZero();
  if (std::isnan(x)) {
    out.setConstant(std::nan(""));
    return;
  }
  x = std::clamp(x, lower(), upper());

  // Knot span s with t_s <= x < t_{s+1}; the right end belongs to the last
  // nonempty span so that the last basis function interpolates there.
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  int s = static_cast<int>(it - knots_.begin()) - 1;
  if (s > K - 1) s = K - 1;
  while (s > degree_ && knots_[s] == knots_[s + 1]) --s;

  // Cox-de Boor in the triangular (de Boor) form: N holds the degree+1
  // nonzero functions B_{s-d..s}.
  std::vector<double> N(degree_ + 1, 0.0), left(degree_ + 1), right(degree_ + 1);
  N[0] = 1.0;
  for (int j = 1; j <= degree_; ++j) {
    left[j] = x - knots_[s + 1 - j];
    right[j] = knots_[s + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      const double denom = right[r + 1] + left[j - r];
      const double temp = denom > 0.0 ? N[r] / denom : 0.0;
      N[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    N[j] = saved;
  }
  for (int r = 0; r <= degree_; ++r) {
    const int k = s - degree_ + r;
    if (k >= 0 && k < K) out[k] = N[r];
  }
}

namespace {

// Linear interpolation between order statistics of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double prob) {
  const double h = prob * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace

SplineBasis make_basis(std::span<const double> values, int K, int degree) {
  if (degree < 0) throw InvalidConfiguration("spline degree must be >= 0");
  if (K < degree + 1)
    throw InvalidConfiguration("basis size " + std::to_string(K) + " is smaller than degree + 1 = " +
                               std::to_string(degree + 1));
  std::vector<double> distinct(values.begin(), values.end());
  for (double v : distinct)
    if (!std::isfinite(v)) throw DataError("non-finite value in spline input");
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw DegenerateVariable("variable has fewer than 2 distinct values");

  const int interior = K - degree - 1;
  std::vector<double> knots;
  knots.reserve(K + degree + 1);
  knots.insert(knots.end(), degree + 1, distinct.front());
  for (int k = 1; k <= interior; ++k)
    knots.push_back(quantile_sorted(distinct, static_cast<double>(k) / (interior + 1)));
  knots.insert(knots.end(), degree + 1, distinct.back());
  return SplineBasis(degree, std::move(knots));
}

Eigen::VectorXd eval_basis(const SplineBasis& basis, double x) { return basis.eval(x); }

BasisExpansion::BasisExpansion(std::vector<SplineBasis> bases) : bases_(std::move(bases)) {
  offsets_.reserve(bases_.size());
  int off = 0;
  for (const auto& b : bases_) {
    offsets_.push_back(off);
    off += b.size();
  }
}

BasisExpansion BasisExpansion::fit(const Eigen::MatrixXd& X, int K, int degree) {
  std::vector<SplineBasis> bases;
  bases.reserve(X.cols());
  for (Eigen::Index j = 0; j < X.cols(); ++j) {
    const Eigen::VectorXd col = X.col(j);
    try {
      bases.push_back(make_basis(std::span<const double>(col.data(), col.size()), K, degree));
    } catch (const DegenerateVariable&) {
      throw DegenerateVariable("predictor " + std::to_string(j) + " has fewer than 2 distinct values");
    }
  }
  return BasisExpansion(std::move(bases));
}

int BasisExpansion::columns() const {
  return bases_.empty() ? 0 : offsets_.back() + bases_.back().size();
}

int BasisExpansion::offset(int j) const { return offsets_.at(j); }

Eigen::MatrixXd transform(const Eigen::MatrixXd& X, const BasisExpansion& expansion) {
  if (X.cols() != expansion.variables())
    throw ShapeError("transform: X has " + std::to_string(X.cols()) + " columns, expansion expects " +
                     std::to_string(expansion.variables()));
  Eigen::MatrixXd Z(X.rows(), expansion.columns());
  Eigen::VectorXd row;
  for (int j = 0; j < expansion.variables(); ++j) {
    const auto& b = expansion.basis(j);
    row.resize(b.size());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      b.eval_into(X(i, j), row);
      Z.block(i, expansion.offset(j), 1, b.size()) = row.transpose();
    }
  }
  return Z;
}

}  // namespace penpls
