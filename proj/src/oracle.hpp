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


#ifndef SHIELDSYN_ORACLE_HPP_
#define SHIELDSYN_ORACLE_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "environment.hpp"

namespace shieldsyn {

/// Feed-forward network with tanh hidden layers, a linear output layer and a
/// per-dimension output clamp.
class MlpPolicy {
 public:
  struct Layer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;
  };

  MlpPolicy() = default;
  /// All-zero network with the given layer sizes (input, hidden..., output).
  MlpPolicy(std::vector<int> dims, Vector action_scale);
  /// Hidden layers drawn from N(0, 1/fan_in); the output layer starts at zero
  /// so the initial policy is the zero controller.
  static MlpPolicy Random(std::vector<int> dims, Vector action_scale,
                          std::mt19937_64& rng);

  const std::vector<int>& dims() const { return dims_; }
  int input_dim() const { return dims_.front(); }
  int output_dim() const { return dims_.back(); }
  const Vector& action_scale() const { return action_scale_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }

  Vector forward(std::span<const double> s) const;
  PolicyFn as_fn() const;

  int num_params() const;
  Eigen::VectorXd params() const;
  void set_params(const Eigen::VectorXd& p);

  std::string to_text() const;
  static MlpPolicy FromText(const std::string& text);
  void save(const std::string& path) const;
  static MlpPolicy Load(const std::string& path);

  friend bool operator==(const MlpPolicy& a, const MlpPolicy& b);

 private:
  std::vector<int> dims_;
  Vector action_scale_;
  std::vector<Layer> layers_;
};

/// Loads weights and checks them against an environment's dimensions.
MlpPolicy load_weights(const std::string& path, const EnvironmentSpec& env);

struct TrainConfig {
  int iterations = 300;
  int directions = 8;
  /// Directions kept for the update (the best by max(r+, r-)).
  int top_directions = 4;
  double step_size = 0.02;
  double noise = 0.03;
  int rollouts = 4;
  int horizon = 200;
  int eval_episodes = 20;
  int eval_every = 10;
  uint64_t seed = 1;

  void validate() const;
};

struct TrainingPoint {
  int iteration = 0;
  double eval_reward = 0.0;
  double best_reward = 0.0;
};

struct TrainResult {
  MlpPolicy policy;
  std::vector<TrainingPoint> curve;
  double initial_reward = 0.0;
  double best_reward = 0.0;
};

/// Episode return sum_{k=0..T} r(s_k, a_k). If the episode enters the unsafe
/// set at step k < T, the reward of the unsafe state is repeated for the
/// remaining steps.
double episode_return(const EnvironmentSpec& env, const PolicyFn& policy,
                      std::span<const double> s0, int steps,
                      DisturbanceSampler* disturbance = nullptr);

/// Mean episode return over `episodes` starts drawn from S0 with `seed`.
double evaluate_policy(const EnvironmentSpec& env, const PolicyFn& policy,
                       int episodes, int steps, uint64_t seed);

/// Random-search training of a network with the given hidden sizes. Returns
/// the best checkpoint on a fixed evaluation set.
TrainResult train(const EnvironmentSpec& env, const std::vector<int>& hidden,
                  const Vector& action_scale, const TrainConfig& cfg);

}  // namespace shieldsyn

#endif  // SHIELDSYN_ORACLE_HPP_
