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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace shieldsyn {

namespace {

constexpr const char* kWeightHeader = "shieldsyn-mlp 1";

void check_dims(const std::vector<int>& dims, const Vector& scale) {
  if (dims.size() < 2) throw ConfigError("network needs input and output");
  for (int d : dims) {
    if (d < 1) throw ConfigError("layer sizes must be positive");
  }
  if (static_cast<int>(scale.size()) != dims.back()) {
    throw DimensionError("action_scale must have one entry per output");
  }
  for (double s : scale) {
    if (!(s > 0.0)) throw ConfigError("action_scale entries must be > 0");
  }
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

MlpPolicy::MlpPolicy(std::vector<int> dims, Vector action_scale)
    : dims_(std::move(dims)), action_scale_(std::move(action_scale)) {
  check_dims(dims_, action_scale_);
  for (size_t l = 0; l + 1 < dims_.size(); ++l) {
    layers_.push_back({Eigen::MatrixXd::Zero(dims_[l + 1], dims_[l]),
                       Eigen::VectorXd::Zero(dims_[l + 1])});
  }
}

MlpPolicy MlpPolicy::Random(std::vector<int> dims, Vector action_scale,
                            std::mt19937_64& rng) {
  MlpPolicy p(std::move(dims), std::move(action_scale));
  for (size_t l = 0; l + 1 < p.layers_.size(); ++l) {
    Layer& layer = p.layers_[l];
    std::normal_distribution<double> g(
        0.0, 1.0 / std::sqrt(static_cast<double>(layer.weight.cols())));
    for (int i = 0; i < layer.weight.rows(); ++i) {
      for (int j = 0; j < layer.weight.cols(); ++j) layer.weight(i, j) = g(rng);
    }
  }
  return p;
}

Vector MlpPolicy::forward(std::span<const double> s) const {
  if (layers_.empty()) throw ConfigError("network has no layers");
  if (static_cast<int>(s.size()) != input_dim()) {
    throw DimensionError("network input dimension mismatch");
  }
  Eigen::VectorXd h(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s[i])) throw NumericalError("non-finite network input");
    h(i) = s[i];
  }
  for (size_t l = 0; l < layers_.size(); ++l) {
    Eigen::VectorXd z = layers_[l].weight * h + layers_[l].bias;
    h = l + 1 < layers_.size() ? Eigen::VectorXd(z.array().tanh()) : z;
  }
  Vector out(h.size());
  for (int i = 0; i < h.size(); ++i) {
    out[i] = std::clamp(h(i), -action_scale_[i], action_scale_[i]);
  }
  return out;
}

PolicyFn MlpPolicy::as_fn() const {
  return [this](std::span<const double> s) { return forward(s); };
}

int MlpPolicy::num_params() const {
  int n = 0;
  for (const auto& l : layers_) n += l.weight.size() + l.bias.size();
  return n;
}

Eigen::VectorXd MlpPolicy::params() const {
  Eigen::VectorXd p(num_params());
  int k = 0;
  for (const auto& l : layers_) {
    for (int i = 0; i < l.weight.rows(); ++i)
      for (int j = 0; j < l.weight.cols(); ++j) p(k++) = l.weight(i, j);
    for (int i = 0; i < l.bias.size(); ++i) p(k++) = l.bias(i);
  }
  return p;
}

void MlpPolicy::set_params(const Eigen::VectorXd& p) {
  if (p.size() != num_params()) throw DimensionError("parameter count");
  int k = 0;
  for (auto& l : layers_) {
    for (int i = 0; i < l.weight.rows(); ++i)
      for (int j = 0; j < l.weight.cols(); ++j) l.weight(i, j) = p(k++);
    for (int i = 0; i < l.bias.size(); ++i) l.bias(i) = p(k++);
  }
}

std::string MlpPolicy::to_text() const {
  std::ostringstream out;
  out << kWeightHeader << "\ndims";
  for (int d : dims_) out << ' ' << d;
  out << "\naction_scale";
  for (double s : action_scale_) out << ' ' << fmt(s);
  out << '\n';
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    out << "layer " << l << ' ' << layer.weight.rows() << ' '
        << layer.weight.cols() << '\n';
    for (int i = 0; i < layer.weight.rows(); ++i) {
      for (int j = 0; j < layer.weight.cols(); ++j) {
        out << (j ? " " : "") << fmt(layer.weight(i, j));
      }
      out << '\n';
    }
    out << "bias";
    for (int i = 0; i < layer.bias.size(); ++i) out << ' ' << fmt(layer.bias(i));
    out << '\n';
  }
  return out.str();
}

MlpPolicy MlpPolicy::FromText(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kWeightHeader) {
    throw ParseError("weight file: missing '" + std::string(kWeightHeader) +
                     "' header");
  }
  auto expect_key = [&](const std::string& key) {
    std::string k;
    if (!(in >> k) || k != key) {
      throw ParseError("weight file: expected '" + key + "'");
    }
  };
  auto read_double = [&]() {
    std::string tok;
    if (!(in >> tok)) throw ParseError("weight file: truncated");
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
      throw ParseError("weight file: bad number '" + tok + "'");
    }
    return v;
  };
  expect_key("dims");
  std::getline(in, line);
  std::istringstream dims_line(line);
  std::vector<int> dims;
  int d = 0;
  while (dims_line >> d) dims.push_back(d);
  if (dims.size() < 2) throw ParseError("weight file: bad dims line");
  expect_key("action_scale");
  Vector scale(dims.back());
  for (double& s : scale) s = read_double();
  MlpPolicy p;
  try {
    p = MlpPolicy(dims, scale);
  } catch (const Error& e) {
    throw ParseError(std::string("weight file: ") + e.what());
  }
  for (size_t l = 0; l < p.layers_.size(); ++l) {
    Layer& layer = p.layers_[l];
    expect_key("layer");
    long idx = -1, rows = -1, cols = -1;
    if (!(in >> idx >> rows >> cols) || idx != static_cast<long>(l) ||
        rows != layer.weight.rows() || cols != layer.weight.cols()) {
      throw ParseError("weight file: bad layer header");
    }
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) layer.weight(i, j) = read_double();
    expect_key("bias");
    for (int i = 0; i < rows; ++i) layer.bias(i) = read_double();
  }
  std::string rest;
  if (in >> rest) throw ParseError("weight file: trailing content");
  return p;
}

void MlpPolicy::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << to_text();
  if (!out) throw Error("write failed for '" + path + "'");
}

MlpPolicy MlpPolicy::Load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return FromText(buf.str());
}

bool operator==(const MlpPolicy& a, const MlpPolicy& b) {
  if (a.dims_ != b.dims_ || a.action_scale_ != b.action_scale_) return false;
  for (size_t l = 0; l < a.layers_.size(); ++l) {
    if (a.layers_[l].weight != b.layers_[l].weight ||
        a.layers_[l].bias != b.layers_[l].bias) {
      return false;
    }
  }
  return true;
}

MlpPolicy load_weights(const std::string& path, const EnvironmentSpec& env) {
  MlpPolicy p = MlpPolicy::Load(path);
  if (p.input_dim() != env.n || p.output_dim() != env.m) {
    throw DimensionError("network is " + std::to_string(p.input_dim()) +
                         " -> " + std::to_string(p.output_dim()) +
                         " but environment '" + env.name + "' is " +
                         std::to_string(env.n) + " -> " +
                         std::to_string(env.m));
  }
  return p;
}

void TrainConfig::validate() const {
  if (iterations < 0) throw ConfigError("iterations must be >= 0");
  if (directions < 1 || top_directions < 1 || top_directions > directions) {
    throw ConfigError("need 1 <= top_directions <= directions");
  }
  if (!(step_size > 0.0) || !(noise > 0.0)) {
    throw ConfigError("step size and noise must be > 0");
  }
  if (rollouts < 1 || horizon < 1 || eval_episodes < 1 || eval_every < 1) {
    throw ConfigError("rollout counts must be positive");
  }
}

double episode_return(const EnvironmentSpec& env, const PolicyFn& policy,
                      std::span<const double> s0, int steps,
                      DisturbanceSampler* disturbance) {
  const Trajectory t = rollout(env, policy, s0, steps, disturbance);
  if (!t.unsafe_hit) return cumulative_reward(env, t, policy);
  double total = 0.0;
  for (size_t k = 0; k < t.actions.size(); ++k) {
    total += reward(env, t.states[k], t.actions[k]);
  }
  const Vector& last = t.states.back();
  const Vector a = policy(last);
  total += reward(env, last, a) * (steps + 1 - static_cast<int>(t.actions.size()));
  return total;
}

double evaluate_policy(const EnvironmentSpec& env, const PolicyFn& policy,
                       int episodes, int steps, uint64_t seed) {
  std::mt19937_64 rng(seed);
  double sum = 0.0;
  for (int e = 0; e < episodes; ++e) {
    const Vector s0 = sample_initial(env.s0_set, rng);
    DisturbanceSampler d(env, rng());
    sum += episode_return(env, policy, s0, steps, &d);
  }
  return sum / episodes;
}

TrainResult train(const EnvironmentSpec& env, const std::vector<int>& hidden,
                  const Vector& action_scale, const TrainConfig& cfg) {
  env.validate();
  cfg.validate();
  if (cfg.horizon > env.horizon) throw ConfigError("horizon exceeds env");
  std::vector<int> dims = {env.n};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(env.m);
  std::mt19937_64 rng(cfg.seed);
  MlpPolicy policy = MlpPolicy::Random(dims, action_scale, rng);
  const uint64_t eval_seed = rng();

  TrainResult result;
  result.policy = policy;
  result.initial_reward = evaluate_policy(env, policy.as_fn(),
                                          cfg.eval_episodes, cfg.horizon,
                                          eval_seed);
  result.best_reward = result.initial_reward;
  result.curve.push_back({0, result.initial_reward, result.best_reward});

  Eigen::VectorXd theta = policy.params();
  const int np = static_cast<int>(theta.size());
  MlpPolicy probe = policy;
  std::normal_distribution<double> gauss(0.0, 1.0);

  auto batch_return = [&](const Eigen::VectorXd& p, uint64_t batch_seed) {
    probe.set_params(p);
    const double r = evaluate_policy(env, probe.as_fn(), cfg.rollouts,
                                     cfg.horizon, batch_seed);
    return r;
  };

  for (int it = 1; it <= cfg.iterations; ++it) {
    const uint64_t batch_seed = rng();
    std::vector<Eigen::VectorXd> deltas(cfg.directions);
    std::vector<double> plus(cfg.directions), minus(cfg.directions);
    for (int k = 0; k < cfg.directions; ++k) {
      deltas[k].resize(np);
      for (int i = 0; i < np; ++i) deltas[k](i) = gauss(rng);
      plus[k] = batch_return(theta + cfg.noise * deltas[k], batch_seed);
      minus[k] = batch_return(theta - cfg.noise * deltas[k], batch_seed);
      if (!std::isfinite(plus[k]) || !std::isfinite(minus[k])) {
        throw NumericalError("training diverged at iteration " +
                             std::to_string(it) + ": returns " +
                             std::to_string(plus[k]) + ", " +
                             std::to_string(minus[k]));
      }
    }
    std::vector<int> order(cfg.directions);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return std::max(plus[a], minus[a]) > std::max(plus[b], minus[b]);
    });
    std::vector<double> used;
    for (int j = 0; j < cfg.top_directions; ++j) {
      used.push_back(plus[order[j]]);
      used.push_back(minus[order[j]]);
    }
    const double mean =
        std::accumulate(used.begin(), used.end(), 0.0) / used.size();
    double var = 0.0;
    for (double r : used) var += (r - mean) * (r - mean);
    const double sigma = std::sqrt(var / used.size());
    if (sigma > 0.0) {
      Eigen::VectorXd step = Eigen::VectorXd::Zero(np);
      for (int j = 0; j < cfg.top_directions; ++j) {
        const int k = order[j];
        step += (plus[k] - minus[k]) * deltas[k];
      }
      theta += cfg.step_size / (cfg.top_directions * sigma) * step;
    }
    if (!theta.allFinite()) {
      throw NumericalError("training produced non-finite weights at iteration " +
                           std::to_string(it));
    }
    if (it % cfg.eval_every == 0 || it == cfg.iterations) {
      probe.set_params(theta);
      const double r = evaluate_policy(env, probe.as_fn(), cfg.eval_episodes,
                                       cfg.horizon, eval_seed);
      if (!std::isfinite(r)) {
        throw NumericalError("evaluation reward diverged at iteration " +
                             std::to_string(it));
      }
      if (r > result.best_reward) {
        result.best_reward = r;
        result.policy = probe;
      }
      result.curve.push_back({it, r, result.best_reward});
    }
  }
  return result;
}

}  // namespace shieldsyn
