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


#include "cegis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

namespace shieldsyn {

void ShieldPolicy::add(ShieldEntry entry) {
  if (entry.program.sketch().n != n_ || entry.program.sketch().m != m_ ||
      entry.certificate.E.nvars() != n_) {
    throw DimensionError("shield entry does not match the shield dimensions");
  }
  entries_.push_back(std::move(entry));
}

int ShieldPolicy::governing(std::span<const double> s) const {
  if (static_cast<int>(s.size()) != n_) {
    throw DimensionError("shield: state has wrong dimension");
  }
  for (size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].certificate.holds(s)) return static_cast<int>(i);
  }
  return -1;
}

int ShieldPolicy::max_invariant_terms() const {
  size_t terms = 0;
  for (const auto& e : entries_) terms = std::max(terms, e.certificate.E.terms().size());
  return static_cast<int>(terms);
}

ProgramDecision shield_program_eval(const ShieldPolicy& sp,
                                    std::span<const double> s) {
  ProgramDecision d;
  d.entry = sp.governing(s);
  if (d.entry >= 0) d.action = program_eval(sp.entries()[d.entry].program, s);
  return d;
}

// ----------------------------------------------------------- coverage

int CoverageConfig::grid_per_dim(int n) const {
  if (n < 1) throw DimensionError("coverage: dimension must be >= 1");
  const double k = std::pow(static_cast<double>(grid_points), 1.0 / n);
  return std::max(2, static_cast<int>(std::lround(k)));
}

CoverageConfig CoverageConfig::doubled(int n) const {
  CoverageConfig c = *this;
  c.grid_points = 1;
  for (int i = 0; i < n; ++i) c.grid_points *= 2L * grid_per_dim(n);
  c.random_samples = 2 * random_samples;
  return c;
}

void CoverageConfig::validate() const {
  if (grid_points < 1 || random_samples < 0 || ascent_steps < 0 ||
      ascent_starts < 0) {
    throw ConfigError("coverage: counts must be non-negative (grid >= 1)");
  }
}

namespace {

double MinE(const std::vector<Polynomial>& covers, std::span<const double> s) {
  double v = std::numeric_limits<double>::infinity();
  for (const auto& e : covers) v = std::min(v, e.eval(s));
  return v;
}

Vector UniformIn(const BoxSet& box, std::mt19937_64& rng) {
  Vector x(box.dim());
  for (int i = 0; i < box.dim(); ++i) {
    std::uniform_real_distribution<double> u(box.lower()[i], box.upper()[i]);
    x[i] = box.lower()[i] == box.upper()[i] ? box.lower()[i] : u(rng);
  }
  return x;
}

// Coordinate ascent of `score` inside the box.
Vector Ascend(Vector x, const BoxSet& box, int steps,
              const std::function<double(const Vector&)>& score) {
  const int n = box.dim();
  Vector step(n);
  for (int i = 0; i < n; ++i) step[i] = 0.05 * (box.upper()[i] - box.lower()[i]);
  double best = score(x);
  for (int it = 0; it < steps; ++it) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector y = x;
        y[i] = std::clamp(y[i] + sign * step[i], box.lower()[i], box.upper()[i]);
        const double v = score(y);
        if (v > best) {
          best = v;
          x = std::move(y);
          improved = true;
        }
      }
    }
    if (!improved) {
      for (double& s : step) s *= 0.5;
    }
  }
  return x;
}

}  // namespace

std::optional<Vector> coverage_counterexample(
    const BoxSet& s0_set, const std::vector<Polynomial>& covers,
    const CoverageConfig& cfg) {
  cfg.validate();
  if (!s0_set.bounded()) throw ConfigError("coverage: initial set must be bounded");
  std::mt19937_64 rng(cfg.seed);
  if (covers.empty()) return UniformIn(s0_set, rng);

  const int n = s0_set.dim();
  const int k = cfg.grid_per_dim(n);
  // Best few samples by min_i E_i, kept sorted descending.
  std::vector<std::pair<double, Vector>> top;
  const size_t keep = static_cast<size_t>(std::max(1, cfg.ascent_starts));
  auto consider = [&](Vector x) {
    const double v = MinE(covers, x);
    if (top.size() < keep || v > top.back().first) {
      top.emplace_back(v, std::move(x));
      std::sort(top.begin(), top.end(),
                [](const auto& a, const auto& b) { return a.first > b.first; });
      if (top.size() > keep) top.pop_back();
    }
  };

  std::vector<int> idx(n, 0);
  for (bool done = false; !done;) {
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      const double t = k == 1 ? 0.5 : static_cast<double>(idx[i]) / (k - 1);
      x[i] = s0_set.lower()[i] + t * (s0_set.upper()[i] - s0_set.lower()[i]);
    }
    consider(std::move(x));
    int d = 0;
    while (d < n && ++idx[d] == k) idx[d++] = 0;
    done = d == n;
  }
  for (int i = 0; i < cfg.random_samples; ++i) consider(UniformIn(s0_set, rng));

  std::optional<Vector> best;
  double best_v = 0.0;
  for (auto& [v, x] : top) {
    if (v > best_v) best_v = v, best = x;
    const Vector y = Ascend(x, s0_set, cfg.ascent_steps,
                            [&](const Vector& p) { return MinE(covers, p); });
    const double vy = MinE(covers, y);
    if (vy > best_v) best_v = vy, best = y;
  }
  return best;
}

// ----------------------------------------------------------- CEGIS

void CegisConfig::validate() const {
  if (max_outer_iterations < 1) throw ConfigError("cegis: max_outer_iterations must be >= 1");
  if (!(r_min > 0.0) || r_min > 1.0) throw ConfigError("cegis: r_min must be in (0, 1]");
  if (degree_bound < 2 || degree_bound % 2 != 0) {
    throw ConfigError("invariant degree must be even and >= 2, got " +
                      std::to_string(degree_bound));
  }
  if (time_budget < 0.0) throw ConfigError("cegis: time_budget must be >= 0");
  coverage.validate();
  synth.validate();
}

const char* to_string(CegisStatus s) {
  switch (s) {
    case CegisStatus::kSuccess: return "success";
    case CegisStatus::kRadiusFloor: return "radius floor";
    case CegisStatus::kMaxIterations: return "max outer iterations";
    case CegisStatus::kTimeBudget: return "time budget";
  }
  return "?";
}

namespace {

std::string PointString(const Vector& x) {
  std::string s = "(";
  for (size_t i = 0; i < x.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%.6g", i ? ", " : "", x[i]);
    s += buf;
  }
  return s + ")";
}

}  // namespace

CegisResult cegis(const PolicyFn& oracle, const LinearSketch& sketch,
                  const EnvironmentSpec& env, const CegisConfig& cfg) {
  env.validate();
  cfg.validate();
  if (sketch.n != env.n || sketch.m != env.m) {
    throw DimensionError("cegis: sketch does not match environment");
  }
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(Clock::now() - start).count();
  };

  CegisResult result;
  result.policy = ShieldPolicy(env.n, env.m);
  std::vector<Polynomial> covers;
  // Full width, so the first box around any s0 contains the initial set.
  Vector full = env.s0_set.half_width();
  for (double& w : full) w *= 2.0;
  Vector r_floor(env.n);
  for (int i = 0; i < env.n; ++i) r_floor[i] = 0.5 * cfg.r_min * full[i];
  uint64_t attempt_seed = cfg.seed;

  auto finish = [&](CegisStatus status, std::string msg) {
    result.status = status;
    result.message = std::move(msg);
    result.seconds = elapsed();
    return result;
  };

  for (int outer = 0;; ++outer) {
    CoverageConfig cov = cfg.coverage;
    cov.seed = cfg.coverage.seed + 7919ULL * outer;
    const std::optional<Vector> s0 =
        coverage_counterexample(env.s0_set, covers, cov);
    if (!s0) {
      return finish(CegisStatus::kSuccess,
                    std::to_string(result.policy.size()) +
                        " verified entries cover the initial set");
    }
    if (outer == cfg.max_outer_iterations) {
      return finish(CegisStatus::kMaxIterations,
                    "initial set not covered after " +
                        std::to_string(cfg.max_outer_iterations) +
                        " outer iterations");
    }
    Vector r = full;
    while (true) {
      bool below = false;
      for (int i = 0; i < env.n; ++i) below |= full[i] > 0.0 && r[i] < r_floor[i];
      if (below) {
        return finish(CegisStatus::kRadiusFloor,
                      "no verified program around " + PointString(*s0) +
                          ": sketch insufficient or unsafe initial state");
      }
      if (cfg.time_budget > 0.0 && elapsed() > cfg.time_budget) {
        return finish(CegisStatus::kTimeBudget, "time budget exhausted");
      }
      Vector lo(env.n), hi(env.n);
      for (int i = 0; i < env.n; ++i) lo[i] = (*s0)[i] - r[i], hi[i] = (*s0)[i] + r[i];
      const BoxSet region = *env.s0_set.intersect(BoxSet(lo, hi));

      CegisAttempt attempt;
      attempt.outer = outer;
      attempt.s0 = *s0;
      attempt.region = region;
      EnvironmentSpec local = env;
      local.s0_set = region;
      SynthConfig scfg = cfg.synth;
      scfg.seed = attempt_seed++;
      auto t0 = Clock::now();
      attempt.program = synthesize(oracle, sketch, local, scfg).program;
      attempt.synth_seconds =
          std::chrono::duration<double>(Clock::now() - t0).count();
      t0 = Clock::now();
      CertificateResult cert;
      if (env.unsafe.contains(*s0)) {
        cert.reason = "initial state is unsafe";
      } else {
        cert = synthesize_certificate(region, env, attempt.program,
                                      cfg.degree_bound, cfg.certificate);
      }
      attempt.verify_seconds =
          std::chrono::duration<double>(Clock::now() - t0).count();
      attempt.verified = cert.certificate.has_value();
      attempt.note = attempt.verified ? "verified" : cert.reason;
      result.attempts.push_back(attempt);
      if (attempt.verified) {
        covers.push_back(cert.certificate->E);
        result.policy.add({attempt.program, std::move(*cert.certificate)});
        break;
      }
      for (double& ri : r) ri *= 0.5;
    }
  }
}

CegisResult cegis(const MlpPolicy& oracle, const LinearSketch& sketch,
                  const EnvironmentSpec& env, const CegisConfig& cfg) {
  return cegis(oracle.as_fn(), sketch, env, cfg);
}

}  // namespace shieldsyn
