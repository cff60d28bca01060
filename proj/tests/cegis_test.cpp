// Copyright 2026 The ShieldSyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "cegis.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

namespace shieldsyn {
namespace {

Polynomial P(const std::string& s, int n) { return Polynomial::Parse(s, n); }

LinearProgramPolicy Program(std::initializer_list<double> row) {
  Eigen::MatrixXd theta(1, static_cast<int>(row.size()));
  int j = 0;
  for (double v : row) theta(0, j++) = v;
  return LinearProgramPolicy({static_cast<int>(row.size()) - 1, 1, true}, theta);
}

BarrierCertificate Cert(const std::string& e, int n) {
  BarrierCertificate c;
  c.E = P(e, n);
  c.degree = 2;
  return c;
}

// s' = s + a, S0 = [-1, 1], safe box [-2, 2].
EnvironmentSpec Line() {
  EnvironmentSpec env;
  env.name = "line";
  env.n = 1;
  env.m = 1;
  env.f = {P("x0 + x1", 2)};
  env.s0_set = BoxSet({-1.0}, {1.0});
  env.unsafe = UnsafeSet(BoxSet({-2.0}, {2.0}));
  env.validate();
  return env;
}

EnvironmentSpec Duffing() {
  EnvironmentSpec env;
  env.name = "duffing";
  env.n = 2;
  env.m = 1;
  env.f = {P("x1", 3), P("-0.6 * x1 - x0 - x0^3 + x2", 3)};
  env.s0_set = BoxSet({-2.5, -2.0}, {2.5, 2.0});
  env.unsafe = UnsafeSet(BoxSet({-5.0, -5.0}, {5.0, 5.0}));
  env.validate();
  return env;
}

CegisConfig FastConfig() {
  CegisConfig cfg;
  cfg.synth.iterations = 150;
  cfg.synth.horizon = 100;
  cfg.coverage.grid_points = 2500;
  cfg.coverage.random_samples = 500;
  return cfg;
}

TEST(ShieldPolicyTest, FirstMatchDispatch) {
  ShieldPolicy sp(1, 1);
  sp.add({Program({-1.0, 0.0}), Cert("x0^2 - 1", 1)});
  sp.add({Program({-3.0, 0.0}), Cert("x0^2 - 4", 1)});
  // Inside both: the first entry governs.
  auto d = shield_program_eval(sp, Vector{0.5});
  EXPECT_EQ(d.entry, 0);
  EXPECT_DOUBLE_EQ(d.action[0], -0.5);
  // Only inside the second.
  d = shield_program_eval(sp, Vector{1.5});
  EXPECT_EQ(d.entry, 1);
  EXPECT_DOUBLE_EQ(d.action[0], -4.5);
  // Outside every invariant.
  d = shield_program_eval(sp, Vector{3.0});
  EXPECT_TRUE(d.aborted());
  EXPECT_TRUE(d.action.empty());
  EXPECT_THROW(shield_program_eval(sp, Vector{1.0, 2.0}), DimensionError);
  EXPECT_THROW(sp.add({Program({1.0, 2.0, 0.0}), Cert("x0", 2)}),
               DimensionError);
  EXPECT_EQ(sp.max_invariant_terms(), 2);
}

TEST(ShieldPolicyTest, EmptyShieldAlwaysAborts) {
  const ShieldPolicy sp(1, 1);
  EXPECT_TRUE(shield_program_eval(sp, Vector{0.0}).aborted());
}

TEST(CoverageTest, CoveredBoxHasNoCounterexample) {
  const std::vector<Polynomial> covers = {P("x0^2 + x1^2 - 1", 2)};
  EXPECT_FALSE(coverage_counterexample(BoxSet({-0.5, -0.5}, {0.5, 0.5}),
                                       covers, {}));
}

TEST(CoverageTest, FindsUncoveredPoint) {
  const std::vector<Polynomial> covers = {P("x0^2 + x1^2 - 1", 2)};
  const auto x = coverage_counterexample(BoxSet({-2.0, -2.0}, {2.0, 2.0}),
                                         covers, {});
  ASSERT_TRUE(x);
  EXPECT_GT((*x)[0] * (*x)[0] + (*x)[1] * (*x)[1], 1.0);
  // The most uncovered point is a corner.
  EXPECT_DOUBLE_EQ(std::abs((*x)[0]), 2.0);
  EXPECT_DOUBLE_EQ(std::abs((*x)[1]), 2.0);
}

TEST(CoverageTest, UnionOfCovers) {
  // Two discs covering the two halves of [-1, 1] x [-0.2, 0.2].
  const std::vector<Polynomial> covers = {
      P("(x0 - 0.5)^2 + x1^2 - 0.35", 2), P("(x0 + 0.5)^2 + x1^2 - 0.35", 2)};
  EXPECT_FALSE(coverage_counterexample(BoxSet({-1.0, -0.2}, {1.0, 0.2}),
                                       covers, {}));
  EXPECT_TRUE(coverage_counterexample(BoxSet({-1.0, -0.2}, {1.0, 0.2}),
                                      {covers[0]}, {}));
}

TEST(CoverageTest, EmptyCoversGiveRandomPoint) {
  const BoxSet box({-1.0, 3.0}, {1.0, 4.0});
  CoverageConfig cfg;
  const auto a = coverage_counterexample(box, {}, cfg);
  ASSERT_TRUE(a);
  EXPECT_TRUE(box.contains(*a));
  EXPECT_EQ(*a, *coverage_counterexample(box, {}, cfg));
  cfg.seed = 2;
  EXPECT_NE(*a, *coverage_counterexample(box, {}, cfg));
}

TEST(CoverageTest, GridResolution) {
  CoverageConfig cfg;
  EXPECT_EQ(cfg.grid_per_dim(2), 100);
  EXPECT_EQ(cfg.grid_per_dim(4), 10);
  EXPECT_EQ(cfg.doubled(2).grid_per_dim(2), 200);
  EXPECT_EQ(cfg.doubled(2).random_samples, 2 * cfg.random_samples);
  cfg.grid_points = 0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(CegisTest, ValidatesConfig) {
  CegisConfig cfg;
  cfg.degree_bound = 3;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.degree_bound = 4;
  cfg.r_min = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(CegisTest, LineNeedsOneEntry) {
  const auto env = Line();
  const PolicyFn oracle = [](std::span<const double> s) {
    return Vector{-2.0 * s[0]};
  };
  const auto res = cegis(oracle, {1, 1, true}, env, FastConfig());
  ASSERT_TRUE(res.ok()) << res.message;
  EXPECT_EQ(res.policy.size(), 1u);
  EXPECT_EQ(res.attempts.size(), 1u);
  EXPECT_EQ(res.attempts[0].region, env.s0_set);
  EXPECT_NEAR(res.policy.entries()[0].program.theta()(0, 0), -2.0, 0.1);
}

TEST(CegisTest, UnsafeInitialStateHitsRadiusFloor) {
  auto env = Line();
  env.s0_set = BoxSet({1.0}, {3.0});
  const PolicyFn oracle = [](std::span<const double> s) {
    return Vector{-2.0 * s[0]};
  };
  auto cfg = FastConfig();
  cfg.r_min = 0.1;
  cfg.synth.iterations = 30;
  const auto res = cegis(oracle, {1, 1, true}, env, cfg);
  EXPECT_FALSE(res.ok());
  EXPECT_EQ(res.status, CegisStatus::kRadiusFloor);
  EXPECT_NE(res.message.find("unsafe initial state"), std::string::npos);
}

TEST(CegisTest, TimeBudgetKeepsPartialResult) {
  const PolicyFn oracle = [](std::span<const double> s) {
    return Vector{-2.0 * s[0]};
  };
  auto cfg = FastConfig();
  cfg.time_budget = 1e-12;
  const auto res = cegis(oracle, {1, 1, true}, Line(), cfg);
  EXPECT_EQ(res.status, CegisStatus::kTimeBudget);
  EXPECT_TRUE(res.policy.empty());
  EXPECT_EQ(res.policy.state_dim(), 1);
}

TEST(CegisTest, DuffingCoversInitialSet) {
  const auto env = Duffing();
  const PolicyFn oracle = [](std::span<const double> s) {
    return Vector{0.39 * s[0] - 1.41 * s[1]};
  };
  const auto cfg = FastConfig();
  const auto res = cegis(oracle, {2, 1, true}, env, cfg);
  ASSERT_TRUE(res.ok()) << res.message;
  ASSERT_GE(res.policy.size(), 1u);

  // Coverage holds at double resolution.
  std::vector<Polynomial> covers;
  for (const auto& e : res.policy.entries()) covers.push_back(e.certificate.E);
  EXPECT_FALSE(coverage_counterexample(env.s0_set, covers,
                                       cfg.coverage.doubled(2)));

  // Each entry is falsifier-clean on its own region.
  for (const auto& e : res.policy.entries()) {
    const auto task = make_task(env, e.program, e.certificate.region);
    EXPECT_FALSE(falsify(e.certificate.E, task).has_value());
  }

  // Stepwise inductiveness under the governing program.
  std::mt19937_64 rng(3);
  for (int k = 0; k < 50; ++k) {
    Vector s = sample_initial(env.s0_set, rng);
    for (int t = 0; t < 400; ++t) {
      const auto d = shield_program_eval(res.policy, s);
      ASSERT_FALSE(d.aborted());
      const Vector next = euler_step(env, s, d.action);
      ASSERT_TRUE(res.policy.entries()[d.entry].certificate.holds(next));
      ASSERT_FALSE(is_unsafe(env, next));
      s = next;
    }
  }
}

TEST(CegisTest, Deterministic) {
  const PolicyFn oracle = [](std::span<const double> s) {
    return Vector{0.39 * s[0] - 1.41 * s[1]};
  };
  const auto a = cegis(oracle, {2, 1, true}, Duffing(), FastConfig());
  const auto b = cegis(oracle, {2, 1, true}, Duffing(), FastConfig());
  ASSERT_EQ(a.policy.size(), b.policy.size());
  for (size_t i = 0; i < a.policy.size(); ++i) {
    EXPECT_EQ(a.policy.entries()[i].program, b.policy.entries()[i].program);
    EXPECT_EQ(a.policy.entries()[i].certificate.E,
              b.policy.entries()[i].certificate.E);
  }
}

}  // namespace
}  // namespace shieldsyn
