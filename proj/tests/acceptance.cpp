// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include "fixtures.hpp"

#include "penpls/cg.hpp"
#include "penpls/gam.hpp"
#include "penpls/io.hpp"
#include "penpls/kernel_pls.hpp"
#include "penpls/penalty.hpp"
#include "penpls/pls.hpp"
#include "penpls/splines.hpp"
#include "penpls/testkit.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

using namespace penpls;
using testkit::centered;

namespace {

int failures = 0;

enum class Outcome { Pass, Fail, Skipped, Deviation };

void report(int id, const std::string& name, Outcome o, const std::string& detail) {
  const char* tag = o == Outcome::Pass      ? "PASS"
                    : o == Outcome::Fail    ? "FAIL"
                    : o == Outcome::Skipped ? "SKIPPED"
                                            : "DEVIATION";
  if (o == Outcome::Fail) ++failures;
  std::printf("[%s] %2d %s: %s\n", tag, id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

// Centered spline design with a random per-variable difference penalty.
struct Instance {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  PenaltySpec penalty;
  Preconditioner M;
};

Instance spline_instance(std::uint64_t seed, int n, int p, int K) {
  testkit::SyntheticSpec s;
  s.seed = seed;
  s.n = n;
  s.p = p;
  s.noise = 0.3;
  s.truths = {testkit::Truth::Sine, testkit::Truth::Quadratic, testkit::Truth::Step, testkit::Truth::Linear};
  const auto d = testkit::gen_additive(s);
  testkit::Rng rng(seed * 7919 + 1);
  PenaltySpec pen;
  pen.K = K;
  pen.q = 2;
  for (int j = 0; j < p; ++j) pen.lambdas.push_back(std::pow(10.0, -1.0 + 4.0 * rng.uniform()));
  const auto Z = transform(d.X, BasisExpansion::fit(d.X, K, 3));
  return {centered(Z), centered(d.y), pen, make_preconditioner(pen)};
}

// Criteria 1 and 2 share their instances.
std::vector<Instance> small_instances() {
  std::vector<Instance> v;
  for (std::uint64_t s = 1; s <= 50; ++s) v.push_back(spline_instance(1000 + s, 30, 2, 10));
  return v;
}

void criterion_1(const std::vector<Instance>& inst) {
  Timer t;
  double worst = 0.0;
  int checks = 0;
  for (const auto& I : inst) {
    const auto fit = penalized_pls_fit(I.X, I.y, I.M, FitConfig{10});
    for (int m = 1; m <= fit.components(); ++m) {
      const Eigen::VectorXd cf = closed_form_beta(I.X, I.y, fit.W.leftCols(m));
      worst = std::max(worst, rel(fit.betaPath.col(m - 1), cf));
      ++checks;
    }
  }
  const double sec = t.seconds();
  report(1, "iterative coefficients equal closed form W(W'X'XW)^-1 W'X'y",
         worst <= 1e-8 && sec <= 5.0 ? Outcome::Pass : Outcome::Fail,
         fmt("max rel err %.3g", worst) + " over " + std::to_string(checks) + " (instance, m) pairs, " +
             fmt("%.2f s", sec));
}

void criterion_2(const std::vector<Instance>& inst) {
  Timer t;
  double worst = 0.0;
  int checks = 0;
  for (const auto& I : inst) {
    const auto fit = penalized_pls_fit(I.X, I.y, I.M, FitConfig{10});
    const Eigen::MatrixXd cg = pcg_iterates(I.X, I.y, I.M, fit.components());
    const int k = std::min<int>(cg.cols(), fit.components());
    if (k < fit.components()) worst = INFINITY;
    for (int m = 0; m < k; ++m) {
      worst = std::max(worst, rel(cg.col(m), fit.betaPath.col(m)));
      ++checks;
    }
  }
  const double sec = t.seconds();
  report(2, "preconditioned CG iterates equal penalized PLS path",
         worst <= 1e-6 && sec <= 5.0 ? Outcome::Pass : Outcome::Fail,
         fmt("max rel err %.3g", worst) + " over " + std::to_string(checks) + " iterates, " + fmt("%.2f s", sec));
}

void criterion_3() {
  Timer t;
  double worst = 0.0;
  int wide = 0;
  for (std::uint64_t s = 1; s <= 50; ++s) {
    const bool isWide = s % 2 == 0;
    const auto I = isWide ? spline_instance(2000 + s, 25, 3, 20) : spline_instance(2000 + s, 30, 2, 10);
    wide += isWide && I.X.cols() > I.X.rows();
    const auto primal = penalized_pls_fit(I.X, I.y, I.M, FitConfig{10});
    const auto dual = kernel_penalized_pls_fit(gram_matrix(I.X, I.M), I.y, 10);
    const int k = std::min(primal.components(), dual.components());
    if (primal.components() != dual.components()) worst = INFINITY;
    for (int m = 0; m < k; ++m)
      worst = std::max(worst, (I.X * primal.betaPath.col(m) - dual.fitted.col(m)).norm() / I.y.norm());
  }
  const double sec = t.seconds();
  report(3, "primal and dual (kernel) fitted values agree",
         worst <= 1e-8 && sec <= 5.0 && wide == 25 ? Outcome::Pass : Outcome::Fail,
         fmt("max err/||y|| %.3g", worst) + " on 50 instances (" + std::to_string(wide) + " with pK=60 > n=25), " +
             fmt("%.2f s", sec));
}

void criterion_4() {
  double worst = 0.0;
  testkit::Rng rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    Eigen::MatrixXd X;
    Eigen::VectorXd y;
    if (trial % 2 == 0) {
      const auto I = spline_instance(4000 + trial, 30, 2, 10);
      X = I.X;
      y = I.y;
    } else {
      X = centered(rng.normal_matrix(25, 3 + trial % 10));
      y = centered(rng.normal_vector(25));
    }
    const auto a = nipals_fit(X, y, FitConfig{8});
    const auto b = penalized_pls_fit(X, y, identity_preconditioner(static_cast<int>(X.cols())), FitConfig{8});
    if (a.components() != b.components()) {
      worst = INFINITY;
      continue;
    }
    worst = std::max(worst, (a.W - b.W).norm() / a.W.norm());
    worst = std::max(worst, (a.T - b.T).norm() / a.T.norm());
    for (int m = 0; m < a.components(); ++m) worst = std::max(worst, rel(b.betaPath.col(m), a.betaPath.col(m)));
  }
  report(4, "zero penalty reduces to NIPALS (weights, components, coefficients)",
         worst <= 1e-10 ? Outcome::Pass : Outcome::Fail, fmt("max rel err %.3g", worst) + " on 40 instances");
}

void criterion_5() {
  double worst = 0.0;
  testkit::Rng rng(5);
  int fits = 0;
  for (int trial = 0; trial < 44; ++trial) {
    const int d = 2 + trial % 11;
    const Eigen::MatrixXd X = centered(rng.normal_matrix(30, d));
    const Eigen::VectorXd y = centered(rng.normal_vector(30));
    const Eigen::VectorXd ls = testkit::dense_ls_oracle(X, y);
    const bool penalized = trial % 2 == 1;
    const Preconditioner M = penalized ? make_preconditioner(PenaltySpec{{std::pow(10.0, 3.0 * rng.uniform())},
                                                                         std::min(2, d - 1), d})
                                       : identity_preconditioner(d);
    const auto fit = penalized_pls_fit(X, y, M, FitConfig{d});
    ++fits;
    if (fit.components() != d) {
      worst = INFINITY;
      continue;
    }
    worst = std::max(worst, rel(fit.beta(), ls));
  }
  report(5, "d steps reach the least squares solution (P = 0 and difference penalties)",
         worst <= 1e-6 ? Outcome::Pass : Outcome::Fail,
         fmt("max rel err %.3g", worst) + " on " + std::to_string(fits) + " fits, d = 2..12");
}

struct SeededFits {
  std::vector<Instance> inst;
  std::vector<PlsFit> fits;
};

SeededFits seeded_fits(const std::vector<Instance>& small) {
  SeededFits s;
  for (const auto& I : small) s.inst.push_back(I);
  for (std::uint64_t k = 1; k <= 10; ++k) s.inst.push_back(spline_instance(6000 + k, 25, 3, 20));
  for (const auto& I : s.inst) s.fits.push_back(penalized_pls_fit(I.X, I.y, I.M, FitConfig{10}));
  return s;
}

void criterion_6(const SeededFits& s) {
  double worst = 0.0;
  for (const auto& fit : s.fits) {
    const double rmax = fit.R.cwiseAbs().maxCoeff();
    for (int i = 0; i < fit.components(); ++i)
      for (int j = 0; j < fit.components(); ++j)
        if (j != i && j != i + 1) worst = std::max(worst, std::abs(fit.R(i, j)) / rmax);
  }
  report(6, "R = T'XW is upper bidiagonal", worst <= 1e-8 ? Outcome::Pass : Outcome::Fail,
         fmt("max off-bidiagonal / max|R| %.3g", worst) + " on " + std::to_string(s.fits.size()) + " fits");
}

void criterion_7(const SeededFits& s) {
  int bad = 0, checks = 0;
  for (std::size_t k = 0; k < s.fits.size(); ++k) {
    const auto& I = s.inst[k];
    const auto& fit = s.fits[k];
    const testkit::LinearMap A_M = [&](const Eigen::VectorXd& v) {
      return I.M.apply(Eigen::VectorXd(I.X.transpose() * (I.X * v)));
    };
    const Eigen::VectorXd b = I.M.apply(Eigen::VectorXd(I.X.transpose() * I.y));
    // up to the numerical rank of the Krylov basis itself
    for (int m = 1; m <= fit.components(); ++m) {
      const Eigen::MatrixXd Kb = testkit::krylov_basis(A_M, b, m);
      if (testkit::numerical_rank(Kb) < m) break;
      const Eigen::MatrixXd Wn = testkit::normalize_columns(fit.W.leftCols(m));
      Eigen::MatrixXd both(Wn.rows(), 2 * m);
      both << Wn, Kb;
      ++checks;
      if (testkit::numerical_rank(Wn) != m || testkit::numerical_rank(both) != m) ++bad;
    }
  }
  report(7, "weights span the Krylov space K_m(MA, Mb)", bad == 0 && checks > 0 ? Outcome::Pass : Outcome::Fail,
         std::to_string(checks - bad) + "/" + std::to_string(checks) + " (fit, m) rank checks");
}

void criterion_8() {
  double unity = 0.0;
  testkit::Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(40);
    for (auto& x : v) x = std::pow(rng.uniform(), 1 + trial % 3);
    const auto B = make_basis(v, 5 + trial, trial % 4);
    for (int i = 0; i <= 1000; ++i) {
      const double x = B.lower() + (B.upper() - B.lower()) * i / 1000.0;
      unity = std::max(unity, std::abs(B.eval(x).sum() - 1.0));
    }
  }
  double nullspace = 0.0;
  for (int K = 3; K <= 30; ++K) {
    const Eigen::MatrixXd K2 = penalty_kernel(K, 2);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(K);
    const Eigen::VectorXd ramp = Eigen::VectorXd::LinSpaced(K, 1, K);
    nullspace = std::max({nullspace, (K2 * ones).cwiseAbs().maxCoeff(), (K2 * ramp).cwiseAbs().maxCoeff()});
  }
  Eigen::MatrixXd K4(4, 4);
  K4 << 1, -2, 1, 0, -2, 5, -4, 1, 1, -4, 5, -2, 0, 1, -2, 1;
  const bool exact = penalty_kernel(4, 2) == K4;
  report(8, "partition of unity, K_2 null space, K_4 (q=2) matrix",
         unity <= 1e-12 && nullspace <= 1e-12 && exact ? Outcome::Pass : Outcome::Fail,
         fmt("unity err %.3g", unity) + fmt(", null space err %.3g", nullspace) +
             (exact ? ", K_4 exact" : ", K_4 differs"));
}

void criterion_9() {
  double worst = 0.0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const auto I = spline_instance(9000 + s, 30, 2, 10);
    const Eigen::MatrixXd L = testkit::metric_factor(I.M.dense());
    const auto pen = penalized_pls_fit(I.X, I.y, I.M, FitConfig{8});
    const auto ord = nipals_fit(I.X * L, I.y, FitConfig{8});
    if (pen.components() != ord.components()) {
      worst = INFINITY;
      continue;
    }
    for (int m = 0; m < pen.components(); ++m)
      worst = std::max(worst, rel(Eigen::VectorXd(L * ord.betaPath.col(m)), pen.betaPath.col(m)));
  }
  report(9, "penalized PLS on X equals ordinary PLS on XL mapped back by L",
         worst <= 1e-8 ? Outcome::Pass : Outcome::Fail, fmt("max rel err %.3g", worst) + " on 20 instances");
}

void criterion_10() {
  const auto d = fixtures::roughness_fixture();
  std::string detail;
  bool ok = true;
  double prev = -1.0;
  int k = 0;
  for (int m : fixtures::kRoughnessComponents) {
    const auto model =
        fit_gam(d.X, d.y, PenaltySpec::shared(3, fixtures::kRoughnessLambda, 20), BasisConfig{}, m, true);
    const double r = roughness(fitted_function(model, 0, 200).values);
    const double golden = fixtures::kRoughnessGolden[k++];
    ok = ok && r >= prev && std::abs(r - golden) <= 1e-6 * golden;
    prev = r;
    detail += (detail.empty() ? "" : ", ") + std::string("m=") + std::to_string(m) + fmt(": %.6g", r);
  }
  report(10, "curve roughness nondecreasing in m on the seeded fixture (lambda=2000)",
         ok ? Outcome::Pass : Outcome::Fail, detail);
}

void criterion_11() {
  const char* path = std::getenv("PENPLS_BIRTH_DATA");
  const std::string name = "birth data LOO error 0.090 +- 0.01 at m=2, lambda in 300..360";
  if (!path || !*path) {
    report(11, name, Outcome::Skipped, "set PENPLS_BIRTH_DATA (and PENPLS_BIRTH_RESPONSE) to run");
    return;
  }
  const char* resp = std::getenv("PENPLS_BIRTH_RESPONSE");
  const auto out = std::filesystem::temp_directory_path() / ("penpls_accept_" + std::to_string(::getpid()));
  const std::string cmd = std::string("\"") + PENPLS_CLI_PATH + "\" cv --data \"" + path + "\" --response \"" +
                          (resp ? resp : "y") +
                          "\" --lambda-grid 300,310,320,330,340,350,360 --max-components 10 "
                          "--normalize-response > \"" +
                          out.string() + "\"";
  const int status = std::system(cmd.c_str());
  std::ifstream in(out);
  std::string line, chosen;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  std::filesystem::remove(out);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0 || lines.size() < 3) {
    report(11, name, Outcome::Fail, "penpls cv failed on " + std::string(path));
    return;
  }
  chosen = lines.back();
  // best error in the m=2 column
  double bestM2 = INFINITY;
  for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
    std::stringstream ss(lines[i]);
    std::string cell;
    for (int c = 0; c <= 2 && std::getline(ss, cell, ','); ++c)
      if (c == 2) bestM2 = std::min(bestM2, parse_double(cell).value_or(INFINITY));
  }
  const bool within = std::abs(bestM2 - 0.090) <= 0.01 && chosen.find(", m=2,") != std::string::npos;
  report(11, name, within ? Outcome::Pass : Outcome::Deviation, chosen + fmt("; best m=2 error %.4g", bestM2));
}

}  // namespace

int main() {
  const auto small = small_instances();
  criterion_1(small);
  criterion_2(small);
  criterion_3();
  criterion_4();
  criterion_5();
  const auto seeded = seeded_fits(small);
  criterion_6(seeded);
  criterion_7(seeded);
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  std::printf("%s: %d failing criteria\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
