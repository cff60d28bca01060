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


#include "benchmarks.hpp"

#include <limits>
#include <numbers>

#include "error.hpp"

namespace shieldsyn {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<Polynomial> Dynamics(const std::vector<std::string>& text,
                                 const std::vector<std::string>& names) {
  std::vector<Polynomial> f;
  for (const auto& t : text) {
    f.push_back(Polynomial::Parse(t, static_cast<int>(names.size()), names));
  }
  return f;
}

BenchmarkDef Toy() {
  BenchmarkDef b;
  b.name = "toy1d";
  b.env.name = b.name;
  b.env.n = 1;
  b.env.m = 1;
  b.env.var_names = {"s", "a"};
  b.env.f = Dynamics({"s + a"}, b.env.var_names);
  b.env.s0_set = BoxSet({-1.0}, {1.0});
  b.env.unsafe = UnsafeSet(BoxSet({-2.0}, {2.0}));
  b.hidden = {8};
  b.action_scale = {5.0};
  b.train.iterations = 60;
  b.train.horizon = 100;
  b.synth.iterations = 200;
  b.synth.horizon = 100;
  b.cegis.degree_bound = 2;
  b.expected = "CEGIS succeeds at degree 2 with one entry";
  return b;
}

BenchmarkDef Duffing() {
  BenchmarkDef b;
  b.name = "duffing";
  b.env.name = b.name;
  b.env.n = 2;
  b.env.m = 1;
  b.env.var_names = {"x", "y", "a"};
  b.env.f = Dynamics({"y", "-0.6 * y - x - x^3 + a"}, b.env.var_names);
  b.env.s0_set = BoxSet({-2.5, -2.0}, {2.5, 2.0});
  b.env.unsafe = UnsafeSet(BoxSet({-5.0, -5.0}, {5.0, 5.0}));
  b.env.disturbance = {0.0, 0.1};
  b.action_scale = {10.0};
  b.train.horizon = 500;
  b.cegis.degree_bound = 4;
  b.expected = "CEGIS succeeds at degree 4";
  return b;
}

EnvironmentSpec PendulumEnv(const std::string& name, const Vector& safe_hw) {
  EnvironmentSpec env;
  env.name = name;
  env.n = 2;
  env.m = 1;
  env.var_names = {"eta", "omega", "a"};
  env.f = Dynamics({"omega", "9.8 * eta - 1.6333333333333333 * eta^3 + a"},
                   env.var_names);
  env.s0_set = BoxSet::Symmetric({20.0 * kDeg, 20.0 * kDeg});
  env.unsafe = UnsafeSet(BoxSet::Symmetric(safe_hw));
  env.disturbance = {0.0, 0.1};
  env.angle_dims = {0, 1};
  return env;
}

BenchmarkDef Pendulum() {
  BenchmarkDef b;
  b.name = "pendulum";
  b.env = PendulumEnv(b.name, {90.0 * kDeg, 90.0 * kDeg});
  b.action_scale = {15.0};
  b.train.horizon = 500;
  b.cegis.degree_bound = 4;
  b.expected = "CEGIS succeeds at degree 4";
  return b;
}

BenchmarkDef PendulumRestricted() {
  BenchmarkDef b = Pendulum();
  b.name = "pendulum-restricted";
  b.env = PendulumEnv(b.name, {23.0 * kDeg, 23.0 * kDeg});
  b.oracle_from = "pendulum";
  b.expected =
      "CEGIS fails at degree 2 within budget, succeeds at degree 4; the "
      "shield keeps the pendulum oracle inside the 23 degree box";
  return b;
}

BenchmarkDef Cartpole() {
  BenchmarkDef b;
  b.name = "cartpole";
  b.env.name = b.name;
  b.env.n = 4;
  b.env.m = 1;
  b.env.var_names = {"x", "v", "theta", "omega", "a"};
  b.env.f = Dynamics(
      {"v",
       "0.5305175490779298 * theta^3 - 0.071386079714455676 * theta^2 a"
       " + 0.048780487804878049 * theta omega^2 - 0.71707317073170729 * theta"
       " + 0.97560975609756095 * a",
       "omega",
       "-3.783581201665675 * theta^3 + 0.83878643664485429 * theta^2 a"
       " - 0.073170731707317069 * theta omega^2 + 15.77560975609756 * theta"
       " - 1.4634146341463414 * a"},
      b.env.var_names);
  b.env.s0_set = BoxSet::Symmetric({0.05, 0.05, 0.05, 0.05});
  b.env.unsafe = UnsafeSet(
      BoxSet({-0.3, -kInf, -30.0 * kDeg, -kInf}, {0.3, kInf, 30.0 * kDeg, kInf}));
  b.env.angle_dims = {2, 3};
  b.action_scale = {10.0};
  b.train.horizon = 1000;
  b.train.iterations = 600;
  b.synth.horizon = 1000;
  b.synth.noise = 1.0;
  b.cegis.degree_bound = 4;
  b.expected =
      "degree 2 cannot certify; degree 4 certifies stable programs, but "
      "distillation does not reach one on every seed";
  return b;
}

}  // namespace

const std::vector<BenchmarkDef>& benchmarks() {
  static const std::vector<BenchmarkDef> all = [] {
    std::vector<BenchmarkDef> v = {Toy(), Duffing(), Pendulum(),
                                   PendulumRestricted(), Cartpole()};
    for (auto& b : v) {
      b.env.validate();
      b.cegis.validate();
    }
    return v;
  }();
  return all;
}

const BenchmarkDef& find_benchmark(const std::string& name) {
  for (const auto& b : benchmarks()) {
    if (b.name == name) return b;
  }
  std::string known;
  for (const auto& n : benchmark_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown benchmark '" + name + "' (known: " + known + ")");
}

std::vector<std::string> benchmark_names() {
  std::vector<std::string> names;
  for (const auto& b : benchmarks()) names.push_back(b.name);
  return names;
}

const EnvironmentSpec& training_env(const BenchmarkDef& b) {
  return b.oracle_from.empty() ? b.env : find_benchmark(b.oracle_from).env;
}

}  // namespace shieldsyn
