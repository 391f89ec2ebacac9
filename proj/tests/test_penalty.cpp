#include "penpls/error.hpp"
#include "penpls/penalty.hpp"
#include "penpls/testkit.hpp"

#include <doctest.h>

#include <cmath>

using namespace penpls;

TEST_CASE("difference_matrix") {
  Eigen::MatrixXd D4(3, 4);
  D4 << 1, -1, 0, 0, 0, 1, -1, 0, 0, 0, 1, -1;
  CHECK(difference_matrix(4) == D4);
  Eigen::MatrixXd D2(1, 2);
  D2 << 1, -1;
  CHECK(difference_matrix(2) == D2);
  Eigen::MatrixXd DD(2, 4);
  DD << 1, -2, 1, 0, 0, 1, -2, 1;
  CHECK(difference_matrix(3) * difference_matrix(4) == DD);
  CHECK_THROWS_AS(difference_matrix(1), InvalidConfiguration);
}

TEST_CASE("penalty_kernel examples") {
  Eigen::MatrixXd K21(2, 2);
  K21 << 1, -1, -1, 1;
  CHECK(penalty_kernel(2, 1) == K21);
  Eigen::MatrixXd K42(4, 4);
  K42 << 1, -2, 1, 0, -2, 5, -4, 1, 1, -4, 5, -2, 0, 1, -2, 1;
  CHECK(penalty_kernel(4, 2) == K42);
  CHECK_THROWS_AS(penalty_kernel(4, 0), InvalidConfiguration);
  CHECK_THROWS_AS(penalty_kernel(4, 4), InvalidConfiguration);
}

TEST_CASE("penalty_kernel: null space and rank") {
  for (int K = 3; K <= 12; ++K) {
    const auto K2 = penalty_kernel(K, 2);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(K);
    const Eigen::VectorXd ramp = Eigen::VectorXd::LinSpaced(K, 1, K);
    CHECK((K2 * ones).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((K2 * ramp).cwiseAbs().maxCoeff() <= 1e-12);
    for (int q = 1; q < K; ++q) {
      const auto Kq = penalty_kernel(K, q);
      CHECK(Kq == Kq.transpose());
      CHECK(testkit::numerical_rank(Kq, 1e-10) == K - q);
      // Discrete polynomials of degree < q are annihilated.
      for (int deg = 0; deg < q; ++deg) {
        Eigen::VectorXd poly(K);
        for (int k = 0; k < K; ++k) poly[k] = std::pow(static_cast<double>(k) / K, deg);
        CHECK((Kq * poly).norm() <= 1e-9 * Kq.norm());
      }
    }
  }
}

TEST_CASE("assemble_penalty") {
  auto zero = PenaltySpec::shared(3, 0.0, 5);
  CHECK(assemble_penalty(zero).isZero(0.0));

  PenaltySpec spec{{1.0, 2.0}, 1, 2};
  Eigen::MatrixXd expected(4, 4);
  expected << 1, -1, 0, 0, -1, 1, 0, 0, 0, 0, 2, -2, 0, 0, -2, 2;
  const auto P = assemble_penalty(spec);
  CHECK(P == expected);
  // Kronecker oracle diag(lambda) (x) K_q
  Eigen::MatrixXd kron = Eigen::MatrixXd::Zero(4, 4);
  const Eigen::MatrixXd Kq = penalty_kernel(2, 1);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) kron.block(2 * a, 2 * b, 2, 2) = (a == b ? spec.lambdas[a] : 0.0) * Kq;
  CHECK(P == kron);

  testkit::Rng rng(5);
  const auto P2 = assemble_penalty(PenaltySpec{{0.5, 3.0, 10.0}, 2, 6});
  CHECK(P2 == P2.transpose());
  for (int t = 0; t < 100; ++t) {
    const auto x = rng.normal_vector(18);
    CHECK(x.dot(P2 * x) >= -1e-12);
  }
}

TEST_CASE("PenaltySpec validation") {
  CHECK_THROWS_AS(PenaltySpec({-1.0}, 2, 5).validate(), InvalidConfiguration);
  CHECK_THROWS_AS(PenaltySpec({1.0}, 5, 5).validate(), InvalidConfiguration);
  CHECK_THROWS_AS(PenaltySpec({std::nan("")}, 2, 5).validate(), InvalidConfiguration);
  CHECK_NOTHROW(PenaltySpec({0.0, 4.0}, 4, 5).validate());
}

TEST_CASE("make_preconditioner examples") {
  const auto id = make_preconditioner(PenaltySpec::shared(2, 0.0, 4));
  CHECK(id.dense().isIdentity(1e-15));
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(8, -1, 3);
  CHECK(apply_preconditioner(id, v) == v);

  const auto M = make_preconditioner(PenaltySpec{{1.0}, 1, 2});
  Eigen::MatrixXd expected(2, 2);
  expected << 2, 1, 1, 2;
  expected /= 3.0;
  CHECK((M.dense() - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("preconditioner inverts I + P and is linear") {
  testkit::Rng rng(8);
  const PenaltySpec spec{{0.3, 7.0, 120.0}, 2, 6};
  const auto M = make_preconditioner(spec);
  Eigen::MatrixXd IP = assemble_penalty(spec);
  IP.diagonal().array() += 1.0;
  for (int t = 0; t < 100; ++t) {
    const auto v = rng.normal_vector(18);
    CHECK((M.apply(Eigen::VectorXd(IP * v)) - v).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((M.apply_metric(v) - IP * v).cwiseAbs().maxCoeff() <= 1e-12);
  }
  const auto u = rng.normal_vector(18), w = rng.normal_vector(18);
  const double a = 1.7, b = -0.4;
  CHECK((M.apply(Eigen::VectorXd(a * u + b * w)) - (a * M.apply(u) + b * M.apply(w))).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK_THROWS_AS(M.apply(Eigen::VectorXd(Eigen::VectorXd::Zero(5))), ShapeError);
}

TEST_CASE("single block application equals the dense inverse") {
  for (int K = 2; K <= 6; ++K) {
    const PenaltySpec spec{{2.5}, 1, K};
    const auto M = make_preconditioner(spec);
    Eigen::MatrixXd IP = assemble_penalty(spec);
    IP.diagonal().array() += 1.0;
    const Eigen::MatrixXd Minv = IP.inverse();
    const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(K, 0.5, -2);
    CHECK((M.apply(v) - Minv * v).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("M-inner product weights penalty eigendirections by 1/(1 + theta)") {
  for (int K = 3; K <= 8; ++K) {
    const PenaltySpec spec{{4.0}, 2, K};
    const auto P = assemble_penalty(spec);
    const auto M = make_preconditioner(spec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(P);
    for (int i = 0; i < K; ++i) {
      const Eigen::VectorXd s = eig.eigenvectors().col(i);
      CHECK(std::abs(s.dot(M.apply(s)) - 1.0 / (1.0 + eig.eigenvalues()[i])) <= 1e-8);
    }
  }
}

TEST_CASE("general symmetric blocks; I + P must be positive definite") {
  testkit::Rng rng(2);
  const auto B = testkit::random_psd(rng, 5, 7);
  const Preconditioner M({B, Eigen::MatrixXd::Zero(3, 3)});
  CHECK(M.dimension() == 8);
  CHECK(M.block_offset(1) == 5);
  Eigen::MatrixXd bad = -2.0 * Eigen::MatrixXd::Identity(2, 2);
  CHECK_THROWS_AS(Preconditioner({bad}), NumericalError);
}
