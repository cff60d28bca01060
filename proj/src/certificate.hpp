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


#ifndef SHIELDSYN_CERTIFICATE_HPP_
#define SHIELDSYN_CERTIFICATE_HPP_

#include <optional>
#include <string>
#include <vector>

#include "environment.hpp"
#include "polynomial.hpp"
#include "sdp_solver.hpp"
#include "synthesis.hpp"

namespace shieldsyn {

/// E[c](X) = sum_i c_i b_i(X) over all monomials of degree <= degree_bound.
struct InvariantSketch {
  int n = 0;
  int degree_bound = 0;
  std::vector<Monomial> basis;

  static InvariantSketch Full(int n, int degree_bound);
  int unknowns() const { return static_cast<int>(basis.size()); }
};

/// phi(s) := E(s) <= 0, proven for the closed loop started in `region`.
struct BarrierCertificate {
  Polynomial E;
  int degree = 0;
  double epsilon = 0.0;
  BoxSet region;
  /// Extra margin found by the solver on top of epsilon.
  double margin = 0.0;
  int mult_degree = 0;
  /// Solver diagnostics of the accepted SDP solution.
  double equality_residual = 0.0;
  double min_eigenvalue = 0.0;
  /// Samples per condition used by the falsifier that accepted E.
  int falsifier_samples = 0;

  bool holds(std::span<const double> s) const { return E.eval(s) <= 0.0; }
};

/// Closed-loop next-state polynomials s + dt f(s, theta (s, 1)).
std::vector<Polynomial> closed_loop(const EnvironmentSpec& env,
                                    const LinearProgramPolicy& p);

/// Everything the three conditions talk about.
struct VerificationTask {
  BoxSet region;
  UnsafeSet unsafe;
  std::vector<Polynomial> next;
  /// Box on which the decrease condition is imposed.
  BoxSet domain;
  double dt = 0.01;
  /// Per-dimension bound on the disturbance added to the derivative.
  Vector disturbance;
};

/// Task for `p` on `region` in `env`. The domain is the safe box inflated by
/// `inflation` around its center. An infinite safe bound is replaced by the
/// initial-set center plus or minus `unbounded_scale` initial-set half-widths
/// and counts as unsafe beyond it, so the invariant stays inside the domain.
VerificationTask make_task(const EnvironmentSpec& env,
                           const LinearProgramPolicy& p, const BoxSet& region,
                           double inflation = 1.1,
                           double unbounded_scale = 10.0);

/// Affine change of variables u = (s - anchor) / scale used to condition the
/// SOS program.
struct Frame {
  Vector anchor;
  Vector scale;
  /// True when anchor is a fixed point of the closed loop.
  bool at_equilibrium = false;

  std::vector<Polynomial> to_u(int n) const;    // s -> u
  std::vector<Polynomial> from_u(int n) const;  // u -> s
};

/// Fixed point of `next` inside `domain` found by Newton's method, if any.
std::optional<Vector> find_equilibrium(const std::vector<Polynomial>& next,
                                       const BoxSet& domain,
                                       const Vector& start);

struct SosOptions {
  double epsilon = 1e-3;
  /// Drop the constant monomial where the equilibrium forces it to vanish.
  bool facial_reduction = true;
  SdpOptions sdp;
};

/// One SOS constraint "target(c, tau) - sum_j sigma_j g_j is SOS".
struct SosConstraintInfo {
  std::string name;
  int gram_block = -1;
  std::vector<Monomial> gram_basis;
  std::vector<int> multiplier_blocks;
  std::vector<std::vector<Monomial>> multiplier_bases;
  std::vector<Polynomial> multiplier_guards;  // g_j in u coordinates
  Polynomial target_const;                    // part without c and tau
  std::vector<Polynomial> target_c;           // coefficient of c_i
  Polynomial target_tau;
};

/// SDP encoding of the three conditions for one sketch and multiplier degree.
struct SosProgram {
  SdpProblem sdp;
  InvariantSketch sketch;
  Frame frame;
  int c_offset = 0;  // first free variable holding c
  int tau_block = -1;
  int mult_degree = 0;
  std::vector<SosConstraintInfo> constraints;

  /// E in original state coordinates.
  Polynomial certificate(const SdpSolution& sol) const;
  double margin(const SdpSolution& sol) const;
  /// Largest coefficient mismatch between each target and its SOS
  /// decomposition (one entry per constraint).
  std::vector<double> reconstruction_errors(const SdpSolution& sol) const;
};

/// Builds the conditions: (a) E - eps - tau - sigma g_u SOS for every unsafe
/// half-space, (b) -E - tau - sum sigma_j g_j SOS on the region,
/// (c) -(E(next) - E) - tau dt |u|^2 - sum sigma_j g_j SOS on the domain, with
/// E(region center) = -1 and tau >= 0 maximized. Throws StructuralError naming
/// the monomial when a coefficient cannot be matched.
SosProgram build_vcs(const VerificationTask& task,
                     const InvariantSketch& sketch, int mult_degree,
                     const SosOptions& options = {});

enum class Condition { kUnsafe, kInitial, kDecrease };

const char* to_string(Condition c);

struct Counterexample {
  Condition condition = Condition::kUnsafe;
  Vector state;
  double value = 0.0;
  std::string describe() const;
};

struct FalsifyOptions {
  int samples = 100000;
  /// Index of the first quasi-random point; disjoint offsets give
  /// independent sample sets.
  long offset = 0;
  double tolerance = 1e-7;
  int refine_steps = 200;
};

/// Sampled check of the three conditions on quasi-random points plus local
/// refinement of the worst sample of each condition. Returns the first
/// violation found.
std::optional<Counterexample> falsify(const Polynomial& E,
                                      const VerificationTask& task,
                                      const FalsifyOptions& options = {});

/// i-th point (i >= 1) of the Halton sequence in [0, 1)^dim.
Vector halton(long index, int dim);

struct CertificateConfig {
  SosOptions sos;
  FalsifyOptions falsify;
  int round_digits = 12;
  double domain_inflation = 1.1;
  double unbounded_scale = 10.0;
};

struct CertificateAttempt {
  int mult_degree = 0;
  SdpStatus status = SdpStatus::kUndecided;
  int iterations = 0;
  double seconds = 0.0;
  double margin = 0.0;
  std::string note;
};

struct CertificateResult {
  std::optional<BarrierCertificate> certificate;
  std::string reason;
  std::vector<CertificateAttempt> attempts;
  double seconds = 0.0;
};

/// Escalates the multiplier degree over 0, 2, ..., degree_bound until an SDP
/// solution survives rounding and falsification.
CertificateResult synthesize_certificate(const VerificationTask& task,
                                         int degree_bound,
                                         const CertificateConfig& cfg = {});
CertificateResult synthesize_certificate(const BoxSet& region,
                                         const EnvironmentSpec& env,
                                         const LinearProgramPolicy& p,
                                         int degree_bound,
                                         const CertificateConfig& cfg = {});

}  // namespace shieldsyn

#endif  // SHIELDSYN_CERTIFICATE_HPP_
