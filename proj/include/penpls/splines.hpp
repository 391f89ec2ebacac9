#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace penpls {

inline constexpr int kDefaultBasisSize = 20;
inline constexpr int kDefaultDegree = 3;

// A B-spline basis on an open (clamped) knot vector. The number of basis
// functions is knots.size() - degree - 1. Immutable once built.
class SplineBasis {
 public:
  SplineBasis(int degree, std::vector<double> knots);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  const std::vector<double>& knots() const { return knots_; }
  double lower() const { return knots_.front(); }
  double upper() const { return knots_.back(); }

  // Basis values at x. x is clamped to [lower(), upper()] first.
  Eigen::VectorXd eval(double x) const;

  // Writes the K values at x into out (length size()).
  void eval_into(double x, Eigen::Ref<Eigen::VectorXd> out) const;

 private:
  int degree_;
  std::vector<double> knots_;
};

// Knots at [min, max] of the values, repeated degree+1 times, with
// K - degree - 1 interior knots at equally spaced quantiles of the distinct
// values (linear interpolation between order statistics).
SplineBasis make_basis(std::span<const double> values, int K, int degree);

Eigen::VectorXd eval_basis(const SplineBasis& basis, double x);

// One basis per predictor column. Columns of the expanded matrix are grouped
// contiguously by variable, in variable order.
class BasisExpansion {
 public:
  BasisExpansion() = default;
  explicit BasisExpansion(std::vector<SplineBasis> bases);

  // Builds one basis per column of X with make_basis.
  static BasisExpansion fit(const Eigen::MatrixXd& X, int K, int degree);

  int variables() const { return static_cast<int>(bases_.size()); }
  int columns() const;
  // First column of variable j's block.
  int offset(int j) const;
  const SplineBasis& basis(int j) const { return bases_.at(j); }
  const std::vector<SplineBasis>& bases() const { return bases_; }

 private:
  std::vector<SplineBasis> bases_;
  std::vector<int> offsets_;
};

// Z with row i = (Phi_1(x_i1), ..., Phi_p(x_ip)).
Eigen::MatrixXd transform(const Eigen::MatrixXd& X, const BasisExpansion& expansion);

}  // namespace penpls
