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


#include "synthesis.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace shieldsyn {
namespace {

// s' = s + a on [-1, 1], safe box [-2, 2].
EnvironmentSpec UnstableLine() {
  EnvironmentSpec env;
  env.name = "line";
  env.n = 1;
  env.m = 1;
  env.f = {Polynomial::Parse("x0 + x1", 2)};
  env.s0_set = BoxSet({-1.0}, {1.0});
  env.unsafe = UnsafeSet(BoxSet({-2.0}, {2.0}));
  env.validate();
  return env;
}

const PolicyFn kLinearOracle = [](std::span<const double> s) {
  return Vector{-2.0 * s[0]};
};

LinearProgramPolicy Program(double a, double b, double c) {
  Eigen::MatrixXd theta(1, 3);
  theta << a, b, c;
  return LinearProgramPolicy({2, 1, true}, theta);
}

TEST(ProgramTest, EvalExamples) {
  EXPECT_DOUBLE_EQ(program_eval(Program(-12.05, -5.87, 0), Vector{1, 0})[0],
                   -12.05);
  EXPECT_EQ(program_eval(LinearProgramPolicy({2, 1, true}), Vector{3, 4})[0],
            0.0);
  EXPECT_DOUBLE_EQ(program_eval(Program(0.39, -1.41, 0), Vector{0, 1})[0],
                   -1.41);
  EXPECT_DOUBLE_EQ(program_eval(Program(1, 2, 0.5), Vector{1, 1})[0], 3.5);
}

TEST(ProgramTest, ParamsRoundTrip) {
  const LinearSketch with_bias{2, 2, true};
  Eigen::VectorXd p(6);
  p << 1, 2, 3, 4, 5, 6;
  const auto prog = LinearProgramPolicy::FromParams(with_bias, p);
  EXPECT_EQ(prog.theta()(1, 2), 6.0);
  EXPECT_EQ(prog.params(), p);

  const LinearSketch no_bias{2, 1, false};
  EXPECT_EQ(no_bias.num_params(), 2);
  Eigen::VectorXd q(2);
  q << -1, 4;
  const auto lin = LinearProgramPolicy::FromParams(no_bias, q);
  EXPECT_EQ(lin.theta()(0, 2), 0.0);
  EXPECT_EQ(lin.params(), q);
  EXPECT_THROW(LinearProgramPolicy::FromParams(no_bias, p), DimensionError);
}

TEST(ProgramTest, ToString) {
  const std::vector<std::string> names = {"x", "y"};
  EXPECT_EQ(Program(0.5, -1.25, 2).to_string(names),
            "0.5 * x + -1.25 * y + 2");
}

TEST(DistanceTest, Examples) {
  const EnvironmentSpec env = UnstableLine();
  const PolicyFn half = [](std::span<const double>) { return Vector{0.5}; };
  Eigen::MatrixXd one(1, 2);
  one << 0.0, 1.0;
  const LinearProgramPolicy constant_one({1, 1, true}, one);
  Trajectory safe;
  safe.states = {{0.5}};
  EXPECT_EQ(distance(env, constant_one.as_fn(), constant_one, safe, 1e4), 0.0);
  EXPECT_DOUBLE_EQ(distance(env, half, constant_one, safe, 1e4), -0.25);
  Trajectory unsafe;
  unsafe.states = {{2.5}};
  EXPECT_EQ(distance(env, half, constant_one, unsafe, 1e4), -1e4);
  EXPECT_THROW(distance(env, half, constant_one, Trajectory{}, 1e4),
               ConfigError);
}

TEST(DistanceTest, InvariantUnderStateReordering) {
  const EnvironmentSpec env = UnstableLine();
  const LinearProgramPolicy p = LinearProgramPolicy::FromParams(
      {1, 1, true}, Eigen::Vector2d(-1.0, 0.2));
  Trajectory h;
  h.states = {{0.1}, {-0.7}, {1.5}, {3.0}, {-1.9}};
  const double d = distance(env, kLinearOracle, p, h, 1e4);
  Trajectory r = h;
  std::reverse(r.states.begin(), r.states.end());
  EXPECT_DOUBLE_EQ(distance(env, kLinearOracle, p, r, 1e4), d);
  EXPECT_LE(d, 0.0);
}

TEST(SynthesisTest, EstimatorMatchesGradientDirection) {
  Eigen::VectorXd star(4);
  star << 1.0, -2.0, 0.5, 3.0;
  const auto g = [&](const Eigen::VectorXd& t) {
    return -(t - star).squaredNorm();
  };
  const Eigen::VectorXd theta = Eigen::VectorXd::Zero(4);
  std::mt19937_64 rng(12);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(4);
  for (int i = 0; i < 10000; ++i) {
    mean += random_search_direction(g, theta, 0.1, rng);
  }
  mean /= 10000.0;
  const Eigen::VectorXd grad = -2.0 * (theta - star);
  EXPECT_GE(mean.dot(grad) / (mean.norm() * grad.norm()), 0.95);
}

TEST(SynthesisTest, ZeroIterationsReturnsZero) {
  SynthConfig cfg;
  cfg.iterations = 0;
  const SynthResult r =
      synthesize(kLinearOracle, {1, 1, true}, UnstableLine(), cfg);
  EXPECT_TRUE(r.program.theta().isZero(0.0));
  EXPECT_EQ(r.iterations, 0);
}

TEST(SynthesisTest, RecoversLinearOracle) {
  const EnvironmentSpec env = UnstableLine();
  SynthConfig cfg;
  cfg.iterations = 500;
  cfg.seed = 4;
  const SynthResult r = synthesize(kLinearOracle, {1, 1, true}, env, cfg);
  EXPECT_LE(r.iterations, 500);
  EXPECT_NEAR(r.program.theta()(0, 0), -2.0, 0.1);
  EXPECT_NEAR(r.program.theta()(0, 1), 0.0, 0.1);

  // Brute-force grid over the same sampled objective.
  double best = -INFINITY, best_k = 0, best_b = 0;
  for (double k = -3.0; k <= -1.0 + 1e-9; k += 0.05) {
    for (double b = -0.5; b <= 0.5 + 1e-9; b += 0.05) {
      const double d = sampled_distance(
          env, kLinearOracle,
          LinearProgramPolicy::FromParams({1, 1, true}, Eigen::Vector2d(k, b)),
          cfg.eval_trajectories, cfg.horizon, cfg.max_penalty, 99);
      if (d > best) best = d, best_k = k, best_b = b;
    }
  }
  EXPECT_NEAR(best_k, -2.0, 1e-9);
  EXPECT_NEAR(best_b, 0.0, 1e-9);
  EXPECT_NEAR(r.program.theta()(0, 0), best_k, 0.1);
  EXPECT_NEAR(r.program.theta()(0, 1), best_b, 0.1);
}

TEST(SynthesisTest, DeterministicTrace) {
  SynthConfig cfg;
  cfg.iterations = 60;
  const SynthResult a =
      synthesize(kLinearOracle, {1, 1, true}, UnstableLine(), cfg);
  const SynthResult b =
      synthesize(kLinearOracle, {1, 1, true}, UnstableLine(), cfg);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (size_t i = 0; i < a.trace.size(); ++i) EXPECT_EQ(a.trace[i], b.trace[i]);
  EXPECT_EQ(a.program, b.program);
}

TEST(SynthesisTest, PenaltyDominance) {
  // With a huge MAX the returned program never crashes more often than
  // theta = 0 on the evaluation set.
  const EnvironmentSpec env = UnstableLine();
  const PolicyFn pushy = [](std::span<const double> s) {
    return Vector{2.0 * s[0]};
  };
  SynthConfig cfg;
  cfg.iterations = 100;
  cfg.max_penalty = 1e9;
  const SynthResult r = synthesize(pushy, {1, 1, true}, env, cfg);
  auto crashes = [&](const LinearProgramPolicy& p) {
    std::mt19937_64 rng(31);
    int count = 0;
    for (int i = 0; i < 50; ++i) {
      const Vector s0 = sample_initial(env.s0_set, rng);
      if (rollout(env, p.as_fn(), s0, cfg.horizon).unsafe_hit) ++count;
    }
    return count;
  };
  EXPECT_LE(crashes(r.program), crashes(LinearProgramPolicy({1, 1, true})));
}

TEST(SynthesisTest, ValidatesConfig) {
  SynthConfig cfg;
  cfg.noise = 0.0;
  EXPECT_THROW(synthesize(kLinearOracle, {1, 1, true}, UnstableLine(), cfg),
               ConfigError);
  EXPECT_THROW(
      synthesize(kLinearOracle, {2, 1, true}, UnstableLine(), SynthConfig{}),
      DimensionError);
}

}  // namespace
}  // namespace shieldsyn
