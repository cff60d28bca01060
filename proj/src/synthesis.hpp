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


#ifndef SHIELDSYN_SYNTHESIS_HPP_
#define SHIELDSYN_SYNTHESIS_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "environment.hpp"

namespace shieldsyn {

/// Affine program family a = theta (s, 1).
struct LinearSketch {
  int n = 0;
  int m = 0;
  bool includes_bias = true;

  int num_params() const { return m * (n + (includes_bias ? 1 : 0)); }
  friend bool operator==(const LinearSketch&, const LinearSketch&) = default;
};

class LinearProgramPolicy {
 public:
  LinearProgramPolicy() = default;
  /// Zero program.
  explicit LinearProgramPolicy(LinearSketch sketch);
  /// `theta` is m x (n + 1); the last column is the bias.
  LinearProgramPolicy(LinearSketch sketch, Eigen::MatrixXd theta);

  const LinearSketch& sketch() const { return sketch_; }
  const Eigen::MatrixXd& theta() const { return theta_; }

  /// Free parameters in row-major order (bias column omitted when unused).
  Eigen::VectorXd params() const;
  static LinearProgramPolicy FromParams(const LinearSketch& sketch,
                                        const Eigen::VectorXd& params);

  Vector eval(std::span<const double> s) const;
  PolicyFn as_fn() const;
  /// One affine expression per action, e.g. "0.39 * x + -1.41 * y".
  std::string to_string(std::span<const std::string> names = {}) const;

  friend bool operator==(const LinearProgramPolicy& a,
                         const LinearProgramPolicy& b) {
    return a.sketch_ == b.sketch_ && a.theta_ == b.theta_;
  }

 private:
  LinearSketch sketch_;
  Eigen::MatrixXd theta_;
};

Vector program_eval(const LinearProgramPolicy& p, std::span<const double> s);

/// sum_t -||p(s_t) - oracle(s_t)||^2 over safe states, -max_penalty for each
/// unsafe state.
double distance(const EnvironmentSpec& env, const PolicyFn& oracle,
                const LinearProgramPolicy& p, const Trajectory& h,
                double max_penalty);

struct SynthConfig {
  double step_size = 0.1;
  double noise = 0.05;
  int iterations = 500;
  int trajectories_per_side = 5;
  int horizon = 200;
  double max_penalty = 1e4;
  double tolerance = 1e-4;
  /// Consecutive small updates needed to stop early.
  int patience = 10;
  /// Updates longer than this are scaled back onto the ball (0 disables).
  double max_step = 1.0;
  int eval_trajectories = 10;
  int eval_every = 10;
  uint64_t seed = 1;

  void validate() const;
};

struct SynthResult {
  LinearProgramPolicy program;
  double best_distance = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Parameter vector after every iteration (index 0 is the start).
  std::vector<Eigen::VectorXd> trace;
};

/// One random-search update direction [(g(theta + nu d) - g(theta - nu d)) / nu] d
/// for a Gaussian d drawn from `rng`.
Eigen::VectorXd random_search_direction(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& theta, double nu, std::mt19937_64& rng);

/// Mean per-state distance of program p over `count` rollouts from the
/// initial set of `env`, seeded by `seed` (start states and disturbances).
/// A rollout that stops at an unsafe state is charged MAX for every step it
/// did not reach.
double sampled_distance(const EnvironmentSpec& env, const PolicyFn& oracle,
                        const LinearProgramPolicy& p, int count, int horizon,
                        double max_penalty, uint64_t seed);

/// Random search from theta = 0 towards the oracle.
SynthResult synthesize(const PolicyFn& oracle, const LinearSketch& sketch,
                       const EnvironmentSpec& env, const SynthConfig& cfg);

}  // namespace shieldsyn

#endif  // SHIELDSYN_SYNTHESIS_HPP_
