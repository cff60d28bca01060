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


#include "environment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace shieldsyn {

BoxSet::BoxSet(Vector lower, Vector upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw DimensionError("box bounds have different lengths");
  }
  for (size_t i = 0; i < lower_.size(); ++i) {
    if (std::isnan(lower_[i]) || std::isnan(upper_[i])) {
      throw NumericalError("box bound is NaN");
    }
    if (lower_[i] > upper_[i]) throw ConfigError("box has lower > upper");
  }
}

BoxSet BoxSet::Symmetric(const Vector& half_width) {
  Vector lo(half_width.size());
  for (size_t i = 0; i < lo.size(); ++i) lo[i] = -half_width[i];
  return BoxSet(lo, half_width);
}

Vector BoxSet::center() const {
  Vector c(lower_.size());
  for (size_t i = 0; i < c.size(); ++i) c[i] = 0.5 * (lower_[i] + upper_[i]);
  return c;
}

Vector BoxSet::half_width() const {
  Vector h(lower_.size());
  for (size_t i = 0; i < h.size(); ++i) h[i] = 0.5 * (upper_[i] - lower_[i]);
  return h;
}

bool BoxSet::bounded() const {
  for (size_t i = 0; i < lower_.size(); ++i) {
    if (!std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) return false;
  }
  return true;
}

bool BoxSet::contains(std::span<const double> x, double tol) const {
  if (x.size() != lower_.size()) throw DimensionError("box dimension mismatch");
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower_[i] - tol && x[i] <= upper_[i] + tol)) return false;
  }
  return true;
}

std::optional<BoxSet> BoxSet::intersect(const BoxSet& other) const {
  if (other.dim() != dim()) throw DimensionError("box dimension mismatch");
  Vector lo(lower_.size()), hi(lower_.size());
  for (size_t i = 0; i < lo.size(); ++i) {
    lo[i] = std::max(lower_[i], other.lower_[i]);
    hi[i] = std::min(upper_[i], other.upper_[i]);
    if (lo[i] > hi[i]) return std::nullopt;
  }
  return BoxSet(lo, hi);
}

BoxSet BoxSet::inflated(double factor) const {
  const Vector c = center(), h = half_width();
  Vector lo(c.size()), hi(c.size());
  for (size_t i = 0; i < c.size(); ++i) {
    lo[i] = c[i] - factor * h[i];
    hi[i] = c[i] + factor * h[i];
  }
  return BoxSet(lo, hi);
}

std::vector<UnsafeSet::HalfSpace> UnsafeSet::half_spaces() const {
  std::vector<HalfSpace> out;
  for (int i = 0; i < safe_box_.dim(); ++i) {
    if (std::isfinite(safe_box_.upper()[i])) {
      out.push_back({i, true, safe_box_.upper()[i]});
    }
    if (std::isfinite(safe_box_.lower()[i])) {
      out.push_back({i, false, safe_box_.lower()[i]});
    }
  }
  return out;
}

void EnvironmentSpec::validate() const {
  if (n < 1 || m < 0) throw ConfigError("environment needs n >= 1, m >= 0");
  if (static_cast<int>(f.size()) != n) {
    throw ConfigError("expected one dynamics polynomial per state");
  }
  for (const auto& fi : f) {
    if (fi.nvars() != n + m) {
      throw DimensionError("dynamics polynomial must have n + m variables");
    }
  }
  if (s0_set.dim() != n || unsafe.safe_box().dim() != n) {
    throw DimensionError("initial/safe box dimension must equal n");
  }
  if (!s0_set.bounded()) throw ConfigError("initial set must be bounded");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
  if (horizon < 1) throw ConfigError("horizon must be >= 1");
  if (!disturbance.empty()) {
    if (static_cast<int>(disturbance.size()) != n) {
      throw DimensionError("disturbance bounds must have n entries");
    }
    for (double b : disturbance) {
      if (!(b >= 0.0) || !std::isfinite(b)) {
        throw ConfigError("disturbance bounds must be finite and >= 0");
      }
    }
  }
  if (reward_name != "quadratic" && reward_name != "state_quadratic") {
    throw ConfigError("unknown reward '" + reward_name + "'");
  }
  if (!var_names.empty() && static_cast<int>(var_names.size()) != n + m) {
    throw ConfigError("var_names must list n + m names");
  }
  for (int d : angle_dims) {
    if (d < 0 || d >= n) throw ConfigError("angle dimension out of range");
  }
}

bool EnvironmentSpec::has_disturbance() const {
  return std::any_of(disturbance.begin(), disturbance.end(),
                     [](double b) { return b > 0.0; });
}

std::vector<Vector> disturbance_corners(const Vector& bounds) {
  std::vector<int> dims;
  for (int i = 0; i < static_cast<int>(bounds.size()); ++i) {
    if (bounds[i] > 0.0) dims.push_back(i);
  }
  if (dims.size() > 6) throw ConfigError("at most 6 disturbed dimensions");
  std::vector<Vector> out;
  for (int mask = 0; mask < (1 << dims.size()); ++mask) {
    Vector d(bounds.size(), 0.0);
    for (size_t k = 0; k < dims.size(); ++k) {
      d[dims[k]] = (mask >> k) & 1 ? bounds[dims[k]] : -bounds[dims[k]];
    }
    out.push_back(std::move(d));
  }
  return out;
}

Vector EnvironmentSpec::disturbance_bounds() const {
  return disturbance.empty() ? Vector(n, 0.0) : disturbance;
}

std::vector<std::string> EnvironmentSpec::state_names() const {
  std::vector<std::string> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(var_names.empty() ? "x" + std::to_string(i) : var_names[i]);
  }
  return out;
}

DisturbanceSampler::DisturbanceSampler(const EnvironmentSpec& env,
                                       uint64_t seed)
    : bounds_(env.disturbance_bounds()), rng_(seed) {}

Vector DisturbanceSampler::operator()() {
  Vector d(bounds_.size(), 0.0);
  for (size_t i = 0; i < d.size(); ++i) {
    if (bounds_[i] > 0.0) {
      d[i] = std::uniform_real_distribution<double>(-bounds_[i],
                                                    bounds_[i])(rng_);
    }
  }
  return d;
}

Vector euler_step(const EnvironmentSpec& env, std::span<const double> s,
                  std::span<const double> a, std::span<const double> d) {
  if (static_cast<int>(s.size()) != env.n ||
      static_cast<int>(a.size()) != env.m) {
    throw DimensionError("state/action dimension mismatch");
  }
  if (!d.empty() && static_cast<int>(d.size()) != env.n) {
    throw DimensionError("disturbance dimension mismatch");
  }
  const Vector bounds = env.disturbance_bounds();
  for (size_t i = 0; i < d.size(); ++i) {
    if (std::abs(d[i]) > bounds[i] * (1.0 + 1e-12)) {
      throw ConfigError("disturbance exceeds declared bound");
    }
  }
  Vector sa(s.begin(), s.end());
  sa.insert(sa.end(), a.begin(), a.end());
  Vector next(env.n);
  for (int i = 0; i < env.n; ++i) {
    const double di = d.empty() ? 0.0 : d[i];
    next[i] = s[i] + (env.f[i].eval(sa) + di) * env.dt;
  }
  return next;
}

Trajectory rollout(const EnvironmentSpec& env, const PolicyFn& policy,
                   std::span<const double> s0, int steps,
                   DisturbanceSampler* disturbance) {
  if (static_cast<int>(s0.size()) != env.n) {
    throw DimensionError("initial state dimension mismatch");
  }
  if (steps < 0 || steps > env.horizon) {
    throw ConfigError("rollout steps must lie in [0, horizon]");
  }
  Trajectory traj;
  traj.states.emplace_back(s0.begin(), s0.end());
  if (is_unsafe(env, s0)) {
    traj.unsafe_hit = 0;
    return traj;
  }
  for (int k = 0; k < steps; ++k) {
    const Vector& s = traj.states.back();
    Vector a = policy(s);
    for (double v : a) {
      if (!std::isfinite(v)) throw NumericalError("policy returned non-finite");
    }
    Vector next = disturbance ? euler_step(env, s, a, (*disturbance)())
                              : euler_step(env, s, a);
    traj.actions.push_back(std::move(a));
    traj.states.push_back(std::move(next));
    if (is_unsafe(env, traj.states.back())) {
      traj.unsafe_hit = k + 1;
      break;
    }
  }
  return traj;
}

Vector sample_initial(const BoxSet& region, std::mt19937_64& rng) {
  if (region.dim() == 0) throw ConfigError("cannot sample an empty region");
  if (!region.bounded()) throw ConfigError("cannot sample an unbounded box");
  Vector x(region.dim());
  for (int i = 0; i < region.dim(); ++i) {
    const double lo = region.lower()[i], hi = region.upper()[i];
    x[i] = lo == hi ? lo : std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  return x;
}

Vector sample_initial(const EnvironmentSpec& env, const BoxSet& region,
                      uint64_t seed) {
  const auto r = region.intersect(env.s0_set);
  if (!r) throw ConfigError("sampling region does not meet the initial set");
  std::mt19937_64 rng(seed);
  return sample_initial(*r, rng);
}

bool is_unsafe(const EnvironmentSpec& env, std::span<const double> s) {
  if (static_cast<int>(s.size()) != env.n) {
    throw DimensionError("state dimension mismatch");
  }
  return env.unsafe.contains(s);
}

double reward(const EnvironmentSpec& env, std::span<const double> s,
              std::span<const double> a) {
  double r = 0.0;
  for (double v : s) r -= v * v;
  if (env.reward_name == "quadratic") {
    for (double v : a) r -= 0.01 * v * v;
  }
  return r;
}

double cumulative_reward(const EnvironmentSpec& env, const Trajectory& traj,
                         const PolicyFn& policy) {
  double total = 0.0;
  for (size_t k = 0; k < traj.actions.size(); ++k) {
    total += reward(env, traj.states[k], traj.actions[k]);
  }
  const Vector& last = traj.states.back();
  total += reward(env, last, policy(last));
  return total;
}

}  // namespace shieldsyn
