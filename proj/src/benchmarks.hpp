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


#ifndef SHIELDSYN_BENCHMARKS_HPP_
#define SHIELDSYN_BENCHMARKS_HPP_

#include <string>
#include <vector>

#include "cegis.hpp"
#include "environment.hpp"
#include "oracle.hpp"
#include "synthesis.hpp"

namespace shieldsyn {

/// A named environment with the presets used to train, distill and verify.
struct BenchmarkDef {
  std::string name;
  EnvironmentSpec env;
  /// Benchmark whose environment trains the oracle; empty means this one.
  std::string oracle_from;
  std::vector<int> hidden = {32, 32};
  Vector action_scale;
  TrainConfig train;
  SynthConfig synth;
  CegisConfig cegis;
  /// Human-readable expected outcome, e.g. "CEGIS succeeds at degree 4".
  std::string expected;
};

/// Built-in benchmarks: toy1d, duffing, pendulum, pendulum-restricted,
/// cartpole.
const std::vector<BenchmarkDef>& benchmarks();

/// Throws ConfigError for an unknown name.
const BenchmarkDef& find_benchmark(const std::string& name);

std::vector<std::string> benchmark_names();

/// Environment the oracle of `b` is trained in.
const EnvironmentSpec& training_env(const BenchmarkDef& b);

}  // namespace shieldsyn

#endif  // SHIELDSYN_BENCHMARKS_HPP_
