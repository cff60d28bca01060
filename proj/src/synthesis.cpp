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
#include <cstdio>

namespace shieldsyn {

LinearProgramPolicy::LinearProgramPolicy(LinearSketch sketch)
    : sketch_(sketch), theta_(Eigen::MatrixXd::Zero(sketch.m, sketch.n + 1)) {}

LinearProgramPolicy::LinearProgramPolicy(LinearSketch sketch,
                                         Eigen::MatrixXd theta)
    : sketch_(sketch), theta_(std::move(theta)) {
  if (theta_.rows() != sketch_.m || theta_.cols() != sketch_.n + 1) {
    throw DimensionError("theta must be m x (n + 1)");
  }
  if (!theta_.allFinite()) throw NumericalError("theta is not finite");
  if (!sketch_.includes_bias && !theta_.col(sketch_.n).isZero(0.0)) {
    throw ConfigError("sketch has no bias but theta sets one");
  }
}

Eigen::VectorXd LinearProgramPolicy::params() const {
  const int cols = sketch_.n + (sketch_.includes_bias ? 1 : 0);
  Eigen::VectorXd p(sketch_.m * cols);
  for (int i = 0; i < sketch_.m; ++i)
    for (int j = 0; j < cols; ++j) p(i * cols + j) = theta_(i, j);
  return p;
}

LinearProgramPolicy LinearProgramPolicy::FromParams(
    const LinearSketch& sketch, const Eigen::VectorXd& params) {
  if (params.size() != sketch.num_params()) {
    throw DimensionError("parameter count does not match sketch");
  }
  const int cols = sketch.n + (sketch.includes_bias ? 1 : 0);
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(sketch.m, sketch.n + 1);
  for (int i = 0; i < sketch.m; ++i)
    for (int j = 0; j < cols; ++j) theta(i, j) = params(i * cols + j);
  return LinearProgramPolicy(sketch, theta);
}

Vector LinearProgramPolicy::eval(std::span<const double> s) const {
  if (static_cast<int>(s.size()) != sketch_.n) {
    throw DimensionError("program input dimension mismatch");
  }
  Vector a(sketch_.m);
  for (int i = 0; i < sketch_.m; ++i) {
    double v = theta_(i, sketch_.n);
    for (int j = 0; j < sketch_.n; ++j) v += theta_(i, j) * s[j];
    a[i] = v;
  }
  return a;
}

PolicyFn LinearProgramPolicy::as_fn() const {
  return [this](std::span<const double> s) { return eval(s); };
}

std::string LinearProgramPolicy::to_string(
    std::span<const std::string> names) const {
  std::string out;
  char buf[64];
  for (int i = 0; i < sketch_.m; ++i) {
    if (i) out += "; ";
    for (int j = 0; j < sketch_.n; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", theta_(i, j));
      if (j) out += " + ";
      out += buf;
      out += " * ";
      out += static_cast<size_t>(j) < names.size() ? names[j]
                                                   : "x" + std::to_string(j);
    }
    if (sketch_.includes_bias) {
      std::snprintf(buf, sizeof(buf), "%.17g", theta_(i, sketch_.n));
      out += " + ";
      out += buf;
    }
  }
  return out;
}

Vector program_eval(const LinearProgramPolicy& p, std::span<const double> s) {
  return p.eval(s);
}

double distance(const EnvironmentSpec& env, const PolicyFn& oracle,
                const LinearProgramPolicy& p, const Trajectory& h,
                double max_penalty) {
  if (h.states.empty()) throw ConfigError("distance of an empty trajectory");
  double d = 0.0;
  for (const Vector& s : h.states) {
    if (is_unsafe(env, s)) {
      d -= max_penalty;
      continue;
    }
    const Vector a = p.eval(s);
    const Vector b = oracle(s);
    for (size_t i = 0; i < a.size(); ++i) d -= (a[i] - b[i]) * (a[i] - b[i]);
  }
  return d;
}

void SynthConfig::validate() const {
  if (!(step_size > 0.0) || !(noise > 0.0)) {
    throw ConfigError("step size and noise radius must be > 0");
  }
  if (!(max_penalty > 0.0)) throw ConfigError("MAX must be > 0");
  if (iterations < 0 || trajectories_per_side < 1 || horizon < 1 ||
      eval_trajectories < 1 || eval_every < 1 || patience < 1) {
    throw ConfigError("synthesis counts must be positive");
  }
  if (!(tolerance >= 0.0)) throw ConfigError("tolerance must be >= 0");
  if (!(max_step >= 0.0)) throw ConfigError("max_step must be >= 0");
}

Eigen::VectorXd random_search_direction(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& theta, double nu, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXd delta(theta.size());
  for (int i = 0; i < delta.size(); ++i) delta(i) = g(rng);
  const double plus = objective(theta + nu * delta);
  const double minus = objective(theta - nu * delta);
  return ((plus - minus) / nu) * delta;
}

double sampled_distance(const EnvironmentSpec& env, const PolicyFn& oracle,
                        const LinearProgramPolicy& p, int count, int horizon,
                        double max_penalty, uint64_t seed) {
  std::mt19937_64 rng(seed);
  double total = 0.0;
  for (int k = 0; k < count; ++k) {
    const Vector s0 = sample_initial(env.s0_set, rng);
    DisturbanceSampler d(env, rng());
    const Trajectory h = rollout(env, p.as_fn(), s0, horizon, &d);
    total += distance(env, oracle, p, h, max_penalty);
    // States cut off after the first unsafe one stay unsafe.
    total -= max_penalty * static_cast<double>(horizon + 1 - h.states.size());
  }
  return total / (static_cast<double>(count) * (horizon + 1));
}

SynthResult synthesize(const PolicyFn& oracle, const LinearSketch& sketch,
                       const EnvironmentSpec& env, const SynthConfig& cfg) {
  cfg.validate();
  if (sketch.n != env.n || sketch.m != env.m) {
    throw DimensionError("sketch does not match environment dimensions");
  }
  if (cfg.horizon > env.horizon) throw ConfigError("horizon exceeds env");
  std::mt19937_64 rng(cfg.seed);
  const uint64_t eval_seed = rng();

  auto evaluate = [&](const Eigen::VectorXd& theta) {
    return sampled_distance(env, oracle,
                            LinearProgramPolicy::FromParams(sketch, theta),
                            cfg.eval_trajectories, cfg.horizon,
                            cfg.max_penalty, eval_seed);
  };

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(sketch.num_params());
  SynthResult result;
  result.trace.push_back(theta);
  result.program = LinearProgramPolicy(sketch);
  result.best_distance = evaluate(theta);
  int small_steps = 0;

  for (int it = 1; it <= cfg.iterations; ++it) {
    // The same start states and disturbances for both sides.
    const uint64_t batch_seed = rng();
    auto objective = [&](const Eigen::VectorXd& t) {
      return sampled_distance(env, oracle,
                              LinearProgramPolicy::FromParams(sketch, t),
                              cfg.trajectories_per_side, cfg.horizon,
                              cfg.max_penalty, batch_seed);
    };
    Eigen::VectorXd step =
        cfg.step_size * random_search_direction(objective, theta, cfg.noise,
                                                rng);
    if (!step.allFinite()) {
      throw NumericalError("synthesis update is not finite at iteration " +
                           std::to_string(it));
    }
    if (cfg.max_step > 0.0 && step.norm() > cfg.max_step) {
      step *= cfg.max_step / step.norm();
    }
    theta += step;
    result.trace.push_back(theta);
    result.iterations = it;

    small_steps = step.norm() < cfg.tolerance ? small_steps + 1 : 0;
    const bool done = small_steps >= cfg.patience || it == cfg.iterations;
    if (it % cfg.eval_every == 0 || done) {
      const double d = evaluate(theta);
      if (d > result.best_distance) {
        result.best_distance = d;
        result.program = LinearProgramPolicy::FromParams(sketch, theta);
      }
    }
    if (small_steps >= cfg.patience) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace shieldsyn
