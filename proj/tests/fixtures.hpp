#pragma once

#include "penpls/testkit.hpp"

// Seeded fixture for the roughness-versus-components regression check:
// 42 observations, three predictors, lambda = 2000, normalized response.
namespace fixtures {

inline penpls::testkit::SyntheticData roughness_fixture() {
  penpls::testkit::SyntheticSpec s;
  s.seed = 11;
  s.n = 42;
  s.p = 3;
  s.noise = 0.3;
  s.truths = {penpls::testkit::Truth::Sine, penpls::testkit::Truth::Quadratic, penpls::testkit::Truth::Linear};
  return penpls::testkit::gen_additive(s);
}

inline constexpr double kRoughnessLambda = 2000.0;
inline constexpr int kRoughnessComponents[] = {1, 5, 9, 13};
// Sum of squared second differences of f_1 on a 200-point grid, recorded at first build.
inline constexpr double kRoughnessGolden[] = {1.5340035741687356e-05, 0.00011610529581636567,
                                              0.00023071872429916213, 0.00036719338032376595};

}  // namespace fixtures
