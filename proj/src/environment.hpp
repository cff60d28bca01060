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


#ifndef SHIELDSYN_ENVIRONMENT_HPP_
#define SHIELDSYN_ENVIRONMENT_HPP_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "polynomial.hpp"

namespace shieldsyn {

using Vector = std::vector<double>;

/// Closed axis-aligned box {x : lower <= x <= upper}. Bounds may be infinite.
class BoxSet {
 public:
  BoxSet() = default;
  BoxSet(Vector lower, Vector upper);
  static BoxSet Symmetric(const Vector& half_width);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  Vector center() const;
  Vector half_width() const;
  bool bounded() const;

  bool contains(std::span<const double> x, double tol = 0.0) const;
  /// Empty result is signalled by std::nullopt.
  std::optional<BoxSet> intersect(const BoxSet& other) const;
  /// Scales every half-width by `factor` around the center.
  BoxSet inflated(double factor) const;

  friend bool operator==(const BoxSet&, const BoxSet&) = default;

 private:
  Vector lower_;
  Vector upper_;
};

/// Complement of a closed safe box, i.e. the union of the 2n open half-spaces
/// x_i > upper_i and x_i < lower_i. Infinite bounds contribute no half-space.
class UnsafeSet {
 public:
  UnsafeSet() = default;
  explicit UnsafeSet(BoxSet safe_box) : safe_box_(std::move(safe_box)) {}

  const BoxSet& safe_box() const { return safe_box_; }
  bool contains(std::span<const double> x) const {
    return !safe_box_.contains(x);
  }
  bool empty() const { return half_spaces().empty(); }

  struct HalfSpace {
    int dim = 0;
    bool upper = true;  // x_dim >= bound if upper, x_dim <= bound otherwise
    double bound = 0.0;
  };
  std::vector<HalfSpace> half_spaces() const;

  friend bool operator==(const UnsafeSet&, const UnsafeSet&) = default;

 private:
  BoxSet safe_box_;
};

/// Polynomial ODE s' = f(s, a) + d with box sets, time step and reward.
struct EnvironmentSpec {
  std::string name;
  int n = 0;
  int m = 0;
  /// One polynomial per state derivative over (s_0..s_{n-1}, a_0..a_{m-1}).
  std::vector<Polynomial> f;
  BoxSet s0_set;
  UnsafeSet unsafe;
  double dt = 0.01;
  int horizon = 5000;
  /// Per-dimension bound on |d_i|; empty or all zero means undisturbed.
  Vector disturbance;
  std::string reward_name = "quadratic";
  /// Optional display names for the n + m variables.
  std::vector<std::string> var_names;
  /// State dimensions declared as angles (degrees in config files).
  std::vector<int> angle_dims;

  void validate() const;
  bool has_disturbance() const;
  Vector disturbance_bounds() const;
  std::vector<std::string> state_names() const;

  friend bool operator==(const EnvironmentSpec&,
                         const EnvironmentSpec&) = default;
};

struct Trajectory {
  std::vector<Vector> states;
  std::vector<Vector> actions;
  std::optional<int> unsafe_hit;
};

using PolicyFn = std::function<Vector(std::span<const double>)>;

/// Uniform per-step disturbance on the declared bound box.
class DisturbanceSampler {
 public:
  DisturbanceSampler(const EnvironmentSpec& env, uint64_t seed);
  Vector operator()();

 private:
  Vector bounds_;
  std::mt19937_64 rng_;
};

/// s' = s + (f(s, a) + d) dt. An empty `d` means zero disturbance.
Vector euler_step(const EnvironmentSpec& env, std::span<const double> s,
                  std::span<const double> a, std::span<const double> d = {});

/// Simulates up to `steps` transitions, stopping at the first unsafe state.
Trajectory rollout(const EnvironmentSpec& env, const PolicyFn& policy,
                   std::span<const double> s0, int steps,
                   DisturbanceSampler* disturbance = nullptr);

Vector sample_initial(const BoxSet& region, std::mt19937_64& rng);
Vector sample_initial(const EnvironmentSpec& env, const BoxSet& region,
                      uint64_t seed);

bool is_unsafe(const EnvironmentSpec& env, std::span<const double> s);

/// The 2^q corners of the disturbance box over its q nonzero dimensions
/// (q <= 6), or a single zero vector when undisturbed.
std::vector<Vector> disturbance_corners(const Vector& bounds);

/// Named reward r(s, a): "quadratic" is -s's - 0.01 a'a, "state_quadratic"
/// drops the action term.
double reward(const EnvironmentSpec& env, std::span<const double> s,
              std::span<const double> a);

/// Sum of r(s_k, a_k) for k = 0..T where the final action is policy(s_T).
double cumulative_reward(const EnvironmentSpec& env, const Trajectory& traj,
                         const PolicyFn& policy);

}  // namespace shieldsyn

#endif  // SHIELDSYN_ENVIRONMENT_HPP_
