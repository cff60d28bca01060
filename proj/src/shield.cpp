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


#include "shield.hpp"

#include <chrono>
#include <cmath>
#include <random>

namespace shieldsyn {

std::vector<Vector> predict_next(const EnvironmentSpec& env,
                                 std::span<const double> s,
                                 std::span<const double> a) {
  std::vector<Vector> out;
  for (const Vector& d : disturbance_corners(env.disturbance_bounds())) {
    out.push_back(euler_step(env, s, a, d));
  }
  return out;
}

ShieldStep shield_step(std::span<const double> s, const EnvironmentSpec& env,
                       const PolicyFn& oracle, const ShieldPolicy& sp) {
  ShieldStep step;
  step.action = oracle(s);
  bool inside = true;
  for (const Vector& next : predict_next(env, s, step.action)) {
    if (!sp.covers(next)) {
      inside = false;
      break;
    }
  }
  if (inside) return step;
  const ProgramDecision d = shield_program_eval(sp, s);
  if (d.aborted()) {
    throw InvariantBreach("shield: state outside every invariant");
  }
  step.action = d.action;
  step.intervened = true;
  step.entry = d.entry;
  return step;
}

Vector steady_half_width(const EnvironmentSpec& env) {
  Vector w = env.unsafe.safe_box().half_width();
  const Vector s0 = env.s0_set.half_width();
  for (int i = 0; i < env.n; ++i) {
    if (!std::isfinite(w[i])) w[i] = s0[i];
  }
  return w;
}

namespace {

using Clock = std::chrono::steady_clock;

struct EpisodeOutcome {
  bool unsafe = false;
  int steady_at = -1;
  double seconds = 0.0;
  int steps = 0;
  double reward = 0.0;
};

class SteadyTracker {
 public:
  SteadyTracker(Vector band, int needed) : band_(std::move(band)), needed_(needed) {}

  // Records the start of the first qualifying run once it completes.
  void observe(std::span<const double> s, int t) {
    if (found_ >= 0) return;
    bool in = true;
    for (size_t i = 0; i < band_.size(); ++i) in &= std::abs(s[i]) <= band_[i];
    if (!in) {
      run_ = 0;
      return;
    }
    if (run_++ == 0) start_ = t;
    if (run_ >= needed_) found_ = start_;
  }
  int found() const { return found_; }

 private:
  Vector band_;
  int needed_;
  int run_ = 0;
  int start_ = 0;
  int found_ = -1;
};

template <typename Act>
EpisodeOutcome RunEpisode(const EnvironmentSpec& env, const Vector& s0,
                          int steps, uint64_t dist_seed, const Vector& band,
                          int steady_steps, Act act) {
  EpisodeOutcome out;
  DisturbanceSampler dist(env, dist_seed);
  SteadyTracker steady(band, steady_steps);
  Vector s = s0;
  steady.observe(s, 0);
  for (int t = 0; t < steps; ++t) {
    const auto t0 = Clock::now();
    const Vector a = act(s, t);
    out.seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    out.reward += reward(env, s, a);
    s = euler_step(env, s, a, dist());
    ++out.steps;
    if (is_unsafe(env, s)) {
      out.unsafe = true;
      break;
    }
    steady.observe(s, t + 1);
  }
  out.steady_at = steady.found();
  return out;
}

void Accumulate(VariantMetrics& m, const EpisodeOutcome& o, int steps,
                double* seconds, long* count) {
  m.unsafe_entries += o.unsafe ? 1 : 0;
  if (o.steady_at >= 0) {
    m.steps_to_steady += o.steady_at;
    ++m.settled_episodes;
  } else {
    m.steps_to_steady += steps;
  }
  m.mean_reward += o.reward;
  *seconds += o.seconds;
  *count += o.steps;
}

void Finalize(VariantMetrics& m, int episodes, double seconds, long count) {
  m.steps_to_steady /= episodes;
  m.mean_reward /= episodes;
  m.mean_step_seconds = count ? seconds / count : 0.0;
}

}  // namespace

ShieldedRunMetrics run_shielded(const EnvironmentSpec& env,
                                const PolicyFn& oracle, const ShieldPolicy& sp,
                                int episodes, int steps, uint64_t seed,
                                const ShieldRunOptions& options) {
  if (episodes < 1 || steps < 1) {
    throw ConfigError("run_shielded: episodes and steps must be >= 1");
  }
  if (options.run_shield &&
      (sp.state_dim() != env.n || sp.action_dim() != env.m)) {
    throw DimensionError("shield does not match environment");
  }
  if (!options.run_shield && !options.run_unshielded) {
    throw ConfigError("run_shielded: nothing to run");
  }
  ShieldedRunMetrics m;
  m.episodes = episodes;
  m.steps_per_episode = steps;
  Vector band = steady_half_width(env);
  for (double& b : band) b *= options.steady_fraction;

  double sec_u = 0, sec_s = 0, sec_p = 0, shield_sec = 0;
  long cnt_u = 0, cnt_s = 0, cnt_p = 0;
  std::mt19937_64 starts(seed);
  for (int e = 0; e < episodes; ++e) {
    const Vector s0 = sample_initial(env.s0_set, starts);
    const uint64_t dist_seed = seed * 1000003ULL + static_cast<uint64_t>(e);
    if (options.run_unshielded) {
      const auto o = RunEpisode(env, s0, steps, dist_seed, band,
                                options.steady_steps,
                                [&](const Vector& s, int) { return oracle(s); });
      Accumulate(m.unshielded, o, steps, &sec_u, &cnt_u);
    }
    if (options.run_shield) {
      const auto o = RunEpisode(
          env, s0, steps, dist_seed, band, options.steady_steps,
          [&](const Vector& s, int t) {
            const auto t0 = Clock::now();
            const ShieldStep st = shield_step(s, env, oracle, sp);
            shield_sec += std::chrono::duration<double>(Clock::now() - t0).count();
            ++m.decisions;
            if (st.intervened) ++m.interventions;
            if (options.step_log) {
              std::ostream& log = *options.step_log;
              log << e << ',' << t;
              for (double v : s) log << ',' << v;
              log << ',' << (st.intervened ? 1 : 0) << ',' << st.entry << '\n';
            }
            return st.action;
          });
      Accumulate(m.shielded, o, steps, &sec_s, &cnt_s);
    }
    if (options.run_shield && options.run_program) {
      const auto o = RunEpisode(
          env, s0, steps, dist_seed, band, options.steady_steps,
          [&](const Vector& s, int) {
            const ProgramDecision d = shield_program_eval(sp, s);
            if (d.aborted()) {
              throw InvariantBreach("program: state outside every invariant");
            }
            return d.action;
          });
      Accumulate(m.program, o, steps, &sec_p, &cnt_p);
    }
  }
  Finalize(m.unshielded, episodes, sec_u, cnt_u);
  Finalize(m.shielded, episodes, sec_s, cnt_s);
  Finalize(m.program, episodes, sec_p, cnt_p);
  m.intervention_rate =
      m.decisions ? static_cast<double>(m.interventions) / m.decisions : 0.0;
  if (options.run_shield && options.run_unshielded &&
      m.unshielded.mean_step_seconds > 0.0) {
    m.overhead_fraction =
        m.shielded.mean_step_seconds / m.unshielded.mean_step_seconds - 1.0;
  }
  m.shield_step_us = m.decisions ? 1e6 * shield_sec / m.decisions : 0.0;
  return m;
}

}  // namespace shieldsyn
