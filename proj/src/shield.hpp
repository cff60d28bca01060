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


#ifndef SHIELDSYN_SHIELD_HPP_
#define SHIELDSYN_SHIELD_HPP_

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "cegis.hpp"
#include "environment.hpp"

namespace shieldsyn {

struct ShieldStep {
  Vector action;
  bool intervened = false;
  /// Governing entry when the program acted, else -1.
  int entry = -1;
};

/// Next states for `a` at every corner of the disturbance box.
std::vector<Vector> predict_next(const EnvironmentSpec& env,
                                 std::span<const double> s,
                                 std::span<const double> a);

/// Keeps the neural action when every predicted next state lies in some
/// invariant, otherwise returns the governing program's action. Throws
/// InvariantBreach if s itself is outside every invariant.
ShieldStep shield_step(std::span<const double> s, const EnvironmentSpec& env,
                       const PolicyFn& oracle, const ShieldPolicy& sp);

/// Per-variant outcome over paired episodes.
struct VariantMetrics {
  /// Episodes that entered the unsafe set (each stops at its first entry).
  int unsafe_entries = 0;
  /// Mean first step of a 50-step run inside the steady band; episodes that
  /// never settle count as `steps`.
  double steps_to_steady = 0.0;
  int settled_episodes = 0;
  double mean_step_seconds = 0.0;
  double mean_reward = 0.0;
};

struct ShieldedRunMetrics {
  int episodes = 0;
  int steps_per_episode = 0;
  VariantMetrics unshielded;
  VariantMetrics shielded;
  VariantMetrics program;
  long interventions = 0;
  long decisions = 0;
  double intervention_rate = 0.0;
  /// Mean shielded step time over mean unshielded step time, minus one.
  double overhead_fraction = 0.0;
  /// Mean wall time of one shield_step call in microseconds.
  double shield_step_us = 0.0;
};

struct ShieldRunOptions {
  /// False runs the unshielded oracle only; the shield may then be empty.
  bool run_shield = true;
  bool run_unshielded = true;
  bool run_program = true;
  /// Per-step rows "episode,step,state...,intervened,entry" of the shielded
  /// variant.
  std::ostream* step_log = nullptr;
  /// Steady band as a fraction of the safe-box half-width.
  double steady_fraction = 0.05;
  int steady_steps = 50;
};

/// Runs `episodes` paired episodes (same start state and disturbance stream
/// for every variant) of `steps` steps each.
ShieldedRunMetrics run_shielded(const EnvironmentSpec& env,
                                const PolicyFn& oracle, const ShieldPolicy& sp,
                                int episodes, int steps, uint64_t seed,
                                const ShieldRunOptions& options = {});

/// Half-widths defining the steady band: the safe box where bounded, the
/// initial set otherwise.
Vector steady_half_width(const EnvironmentSpec& env);

}  // namespace shieldsyn

#endif  // SHIELDSYN_SHIELD_HPP_
