#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

// Seeded data generators and reference computations used by the test
// suites. Nothing here calls into the fitting code it is used to check.
namespace penpls::testkit {

// Portable seeded stream: std::mt19937_64 (fully specified by the C++
// standard) drives everything. uniform() = (u >> 11) * 2^-53; normal() is
// Box-Muller on two uniforms, u1 mapped to (0, 1], cosine branch only.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double normal();

  Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols);
  Eigen::VectorXd normal_vector(Eigen::Index n);

 private:
  std::mt19937_64 engine_;
};

enum class Truth { Linear, Quadratic, Sine, Step };

// linear: 2x - 1; quadratic: 4(x - 1/2)^2; sine: sin(2 pi x); step: x > 1/2 ? 1 : 0
double eval_truth(Truth f, double x);
Truth parse_truth(const std::string& name);
std::string truth_name(Truth f);

struct SyntheticSpec {
  std::uint64_t seed = 1;
  int n = 50;
  int p = 1;
  double noise = 0.0;
  // One per variable; cycled if shorter than p.
  std::vector<Truth> truths{Truth::Sine};
};

struct SyntheticData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<Truth> truths;  // one per variable
};

// X uniform on [0,1]^p drawn row by row, then y_i = sum_j f_j(x_ij) + noise * N(0,1)
// drawn in row order. Throws std::invalid_argument for p < 1 or n < 1.
SyntheticData gen_additive(const SyntheticSpec& spec);

// Minimal-norm least squares via SVD, singular values below 1e-10 * sigma_max dropped.
Eigen::VectorXd dense_ls_oracle(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

using LinearMap = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Columns b, Ab, ..., A^{m-1}b, each rescaled to unit length (span unchanged).
Eigen::MatrixXd krylov_basis(const LinearMap& A, const Eigen::VectorXd& b, int m);

// Number of singular values above relTol * sigma_max.
int numerical_rank(const Eigen::MatrixXd& A, double relTol = 1e-8);

// Columns rescaled to unit norm; zero columns kept.
Eigen::MatrixXd normalize_columns(const Eigen::MatrixXd& A);

// L with L L^T = M for symmetric positive definite M (dense Cholesky).
Eigen::MatrixXd metric_factor(const Eigen::MatrixXd& M);

// Column-centered copy of A and centered copy of y.
Eigen::MatrixXd centered(const Eigen::MatrixXd& A);
Eigen::VectorXd centered(const Eigen::VectorXd& y);

// Random symmetric positive semidefinite matrix G G^T / k with G d x k.
Eigen::MatrixXd random_psd(Rng& rng, int d, int k);

}  // namespace penpls::testkit
