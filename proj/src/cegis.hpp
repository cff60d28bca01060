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


#ifndef SHIELDSYN_CEGIS_HPP_
#define SHIELDSYN_CEGIS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "certificate.hpp"
#include "environment.hpp"
#include "oracle.hpp"
#include "synthesis.hpp"

namespace shieldsyn {

/// One verified (program, invariant) pair.
struct ShieldEntry {
  LinearProgramPolicy program;
  BarrierCertificate certificate;
};

/// Result of first-match dispatch; `entry < 0` means no invariant holds.
struct ProgramDecision {
  int entry = -1;
  Vector action;

  bool aborted() const { return entry < 0; }
};

/// Guarded program "if phi_1(s): P_1(s) elif phi_2(s): P_2(s) ... else abort".
class ShieldPolicy {
 public:
  ShieldPolicy() = default;
  ShieldPolicy(int n, int m) : n_(n), m_(m) {}

  int state_dim() const { return n_; }
  int action_dim() const { return m_; }
  const std::vector<ShieldEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }

  void add(ShieldEntry entry);

  /// Index of the first entry whose invariant holds at s, or -1.
  int governing(std::span<const double> s) const;
  bool covers(std::span<const double> s) const { return governing(s) >= 0; }
  /// Largest monomial count over the invariants.
  int max_invariant_terms() const;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<ShieldEntry> entries_;
};

ProgramDecision shield_program_eval(const ShieldPolicy& sp,
                                    std::span<const double> s);

struct CoverageConfig {
  /// Total grid points over the box, spread evenly over the dimensions.
  long grid_points = 10000;
  int random_samples = 2000;
  /// Local ascent steps of min_i E_i from the best samples.
  int ascent_steps = 50;
  int ascent_starts = 5;
  uint64_t seed = 1;

  /// Per-dimension grid resolution for an n-dimensional box.
  int grid_per_dim(int n) const;
  /// Twice the per-dimension resolution and twice the random samples.
  CoverageConfig doubled(int n) const;
  void validate() const;
};

/// A point of s0_set outside every cover {E_i <= 0} (the one with the largest
/// min_i E_i found), or nullopt. With no covers a uniform random point.
std::optional<Vector> coverage_counterexample(
    const BoxSet& s0_set, const std::vector<Polynomial>& covers,
    const CoverageConfig& cfg);

struct CegisConfig {
  int max_outer_iterations = 20;
  /// r* floor as a fraction of the initial-set half-width (per dimension).
  double r_min = 1.0 / 64.0;
  int degree_bound = 4;
  CoverageConfig coverage;
  SynthConfig synth;
  CertificateConfig certificate;
  /// Wall-clock budget in seconds; 0 disables.
  double time_budget = 0.0;
  uint64_t seed = 1;

  void validate() const;
};

enum class CegisStatus {
  kSuccess,
  kRadiusFloor,
  kMaxIterations,
  kTimeBudget,
};

const char* to_string(CegisStatus s);

/// One inner-loop step: a program synthesized for a region and the outcome
/// of its verification.
struct CegisAttempt {
  int outer = 0;
  Vector s0;
  BoxSet region;
  LinearProgramPolicy program;
  bool verified = false;
  std::string note;
  double synth_seconds = 0.0;
  double verify_seconds = 0.0;
};

struct CegisResult {
  CegisStatus status = CegisStatus::kSuccess;
  /// Verified entries so far (complete on success, partial otherwise).
  ShieldPolicy policy;
  std::string message;
  std::vector<CegisAttempt> attempts;
  double seconds = 0.0;

  bool ok() const { return status == CegisStatus::kSuccess; }
};

/// Counterexample-guided partition of the initial set into verified regions.
CegisResult cegis(const PolicyFn& oracle, const LinearSketch& sketch,
                  const EnvironmentSpec& env, const CegisConfig& cfg);
CegisResult cegis(const MlpPolicy& oracle, const LinearSketch& sketch,
                  const EnvironmentSpec& env, const CegisConfig& cfg);

}  // namespace shieldsyn

#endif  // SHIELDSYN_CEGIS_HPP_
