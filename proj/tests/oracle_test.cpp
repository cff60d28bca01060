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


#include "oracle.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

namespace shieldsyn {
namespace {

// s' = a, r = -s^2, S0 = [-1, 1].
EnvironmentSpec Integrator() {
  EnvironmentSpec env;
  env.name = "integrator";
  env.n = 1;
  env.m = 1;
  env.f = {Polynomial::Parse("x1", 2)};
  env.s0_set = BoxSet({-1.0}, {1.0});
  env.unsafe = UnsafeSet(BoxSet({-3.0}, {3.0}));
  env.reward_name = "state_quadratic";
  env.horizon = 100;
  env.validate();
  return env;
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

TEST(MlpPolicyTest, ZeroNetworkGivesZeroAction) {
  const MlpPolicy p({2, 4, 1}, {1.0});
  EXPECT_EQ(p.forward(Vector{0.3, -7.0}), (Vector{0.0}));
}

TEST(MlpPolicyTest, LinearSingleLayer) {
  MlpPolicy p({1, 1}, {1.0});
  p.mutable_layers()[0].weight(0, 0) = 1.0;
  EXPECT_EQ(p.forward(Vector{0.5}), (Vector{0.5}));
}

TEST(MlpPolicyTest, OutputIsClamped) {
  MlpPolicy p({1, 1}, {1.0});
  p.mutable_layers()[0].bias(0) = 3.7;
  EXPECT_EQ(p.forward(Vector{0.0}), (Vector{1.0}));
  p.mutable_layers()[0].bias(0) = -3.7;
  EXPECT_EQ(p.forward(Vector{0.0}), (Vector{-1.0}));
}

TEST(MlpPolicyTest, ForwardMatchesHandComputation) {
  MlpPolicy p({2, 2, 1}, {100.0});
  auto& l = p.mutable_layers();
  l[0].weight << 1.0, -2.0, 0.5, 0.25;
  l[0].bias << 0.1, -0.2;
  l[1].weight << 3.0, -1.0;
  l[1].bias << 0.5;
  const double x = 0.3, y = -0.4;
  const double h0 = std::tanh(1.0 * x - 2.0 * y + 0.1);
  const double h1 = std::tanh(0.5 * x + 0.25 * y - 0.2);
  EXPECT_NEAR(p.forward(Vector{x, y})[0], 3.0 * h0 - h1 + 0.5, 1e-15);
}

TEST(MlpPolicyTest, ForwardErrors) {
  const MlpPolicy p({2, 4, 1}, {1.0});
  EXPECT_THROW(p.forward(Vector{1.0}), DimensionError);
  EXPECT_THROW(p.forward(Vector{1.0, NAN}), NumericalError);
}

TEST(MlpPolicyTest, SampledGradientsAreFinite) {
  std::mt19937_64 rng(4);
  const MlpPolicy p = MlpPolicy::Random({2, 16, 16, 1}, {5.0}, rng);
  auto& layers = const_cast<MlpPolicy&>(p).mutable_layers();
  layers.back().weight.setConstant(0.3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const double h = 1e-6;
  for (int i = 0; i < 200; ++i) {
    const Vector s = {u(rng), u(rng)};
    for (int d = 0; d < 2; ++d) {
      Vector sp = s;
      sp[d] += h;
      const double g = (p.forward(sp)[0] - p.forward(s)[0]) / h;
      EXPECT_TRUE(std::isfinite(g));
      EXPECT_LT(std::abs(g), 1e3);
    }
  }
}

TEST(MlpPolicyTest, ParamsRoundTrip) {
  std::mt19937_64 rng(1);
  MlpPolicy p = MlpPolicy::Random({3, 5, 2}, {1.0, 2.0}, rng);
  EXPECT_EQ(p.num_params(), 3 * 5 + 5 + 5 * 2 + 2);
  Eigen::VectorXd theta = p.params();
  theta(0) = 42.0;
  p.set_params(theta);
  EXPECT_EQ(p.layers()[0].weight(0, 0), 42.0);
  EXPECT_EQ(p.params(), theta);
}

TEST(MlpPolicyTest, SaveLoadIsBitExact) {
  std::mt19937_64 rng(2);
  MlpPolicy p = MlpPolicy::Random({2, 8, 8, 1}, {3.0}, rng);
  p.mutable_layers().back().weight.setRandom();
  const std::string path = TempPath("shieldsyn_oracle_roundtrip.txt");
  p.save(path);
  const MlpPolicy q = MlpPolicy::Load(path);
  EXPECT_EQ(p, q);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    const Vector s = {u(rng), u(rng)};
    EXPECT_EQ(p.forward(s), q.forward(s));
  }
  std::filesystem::remove(path);
}

TEST(MlpPolicyTest, LoadErrors) {
  EXPECT_THROW(MlpPolicy::FromText(""), ParseError);
  EXPECT_THROW(MlpPolicy::FromText("shieldsyn-mlp 1\ndims 1 1\n"), ParseError);
  EXPECT_THROW(
      MlpPolicy::FromText("shieldsyn-mlp 1\ndims 1 1\naction_scale 1\n"
                          "layer 0 1 1\nabc\nbias 0\n"),
      ParseError);
  EXPECT_NO_THROW(
      MlpPolicy::FromText("shieldsyn-mlp 1\ndims 1 1\naction_scale 1\n"
                          "layer 0 1 1\n2\nbias 0\n"));

  std::mt19937_64 rng(3);
  const std::string path = TempPath("shieldsyn_oracle_dims.txt");
  MlpPolicy::Random({3, 4, 1}, {1.0}, rng).save(path);
  EXPECT_THROW(load_weights(path, Integrator()), DimensionError);
  std::filesystem::remove(path);

  const std::string empty = TempPath("shieldsyn_oracle_empty.txt");
  std::ofstream(empty).close();
  EXPECT_THROW(MlpPolicy::Load(empty), ParseError);
  std::filesystem::remove(empty);
}

TEST(TrainTest, EpisodeReturnMatchesDirectSum) {
  const EnvironmentSpec env = Integrator();
  const PolicyFn p = [](std::span<const double> s) {
    return Vector{-2.0 * s[0]};
  };
  // s_k = 0.98^k s0 for k = 0..100.
  double expected = 0.0;
  for (int k = 0; k <= 100; ++k) expected -= std::pow(0.98, 2 * k) * 0.25;
  EXPECT_NEAR(episode_return(env, p, Vector{0.5}, 100), expected, 1e-12);
}

TEST(TrainTest, CrashRepeatsUnsafeReward) {
  EnvironmentSpec env = Integrator();
  const PolicyFn push = [](std::span<const double>) { return Vector{100.0}; };
  // 2.5 -> 3.5 after one step (unsafe), then repeated for the rest.
  const double r = episode_return(env, push, Vector{2.5}, 10);
  EXPECT_DOUBLE_EQ(r, -6.25 - 10 * 12.25);
}

TEST(TrainTest, ZeroPolicyBaseline) {
  // E[-101 s0^2] for s0 ~ U[-1, 1] is -101/3.
  const EnvironmentSpec env = Integrator();
  const MlpPolicy zero({1, 8, 1}, {10.0});
  const double r = evaluate_policy(env, zero.as_fn(), 20000, 100, 5);
  EXPECT_NEAR(r, -101.0 / 3.0, 0.5);
}

TEST(TrainTest, ZeroIterationsReturnsInitialPolicy) {
  TrainConfig cfg;
  cfg.iterations = 0;
  cfg.horizon = 100;
  const TrainResult r = train(Integrator(), {8}, {10.0}, cfg);
  std::mt19937_64 rng(cfg.seed);
  EXPECT_EQ(r.policy, MlpPolicy::Random({1, 8, 1}, {10.0}, rng));
  EXPECT_EQ(r.curve.size(), 1u);
}

TEST(TrainTest, LearnsIntegratorAndIsDeterministic) {
  const EnvironmentSpec env = Integrator();
  TrainConfig cfg;
  cfg.iterations = 150;
  cfg.horizon = 100;
  cfg.seed = 3;
  cfg.step_size = 0.05;
  cfg.noise = 0.05;
  const TrainResult r = train(env, {8}, {10.0}, cfg);
  const double trained = evaluate_policy(env, r.policy.as_fn(), 20, 100, 77);
  const PolicyFn hand = [](std::span<const double> s) {
    return Vector{-2.0 * s[0]};
  };
  const double bar = evaluate_policy(env, hand, 20, 100, 77);
  const MlpPolicy zero({1, 8, 1}, {10.0});
  const double zero_r = evaluate_policy(env, zero.as_fn(), 20, 100, 77);
  EXPECT_GT(trained, -5.0);
  EXPECT_GT(trained, bar);
  EXPECT_GE(r.best_reward, r.initial_reward);
  EXPECT_GE(trained, zero_r);
  for (size_t i = 1; i < r.curve.size(); ++i) {
    EXPECT_GE(r.curve[i].best_reward, r.curve[i - 1].best_reward - 1e-9);
  }
  const TrainResult again = train(env, {8}, {10.0}, cfg);
  EXPECT_EQ(r.policy, again.policy);
}

}  // namespace
}  // namespace shieldsyn
