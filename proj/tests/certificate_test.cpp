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


#include "certificate.hpp"

#include <cmath>

#include <gtest/gtest.h>

namespace shieldsyn {
namespace {

// next(s) = 0.99 s, S0 = [-1, 1], safe box [-2, 2].
VerificationTask Toy() {
  VerificationTask t;
  t.region = BoxSet({-1.0}, {1.0});
  t.unsafe = UnsafeSet(BoxSet({-2.0}, {2.0}));
  t.next = {Polynomial::Parse("0.99 * x0", 1)};
  t.domain = BoxSet({-2.0}, {2.0}).inflated(1.1);
  t.dt = 0.01;
  t.disturbance = {0.0};
  return t;
}

// Duffing oscillator.
EnvironmentSpec Duffing() {
  EnvironmentSpec env;
  env.name = "duffing";
  env.n = 2;
  env.m = 1;
  env.f = {Polynomial::Parse("x1", 3),
           Polynomial::Parse("-0.6 * x1 - x0 - x0^3 + x2", 3)};
  env.s0_set = BoxSet({-2.5, -2.0}, {2.5, 2.0});
  env.unsafe = UnsafeSet(BoxSet({-5.0, -5.0}, {5.0, 5.0}));
  env.validate();
  return env;
}

// Reference oscillator program a = 0.39 x - 1.41 y.
LinearProgramPolicy DuffingProgram() {
  Eigen::MatrixXd theta(1, 3);
  theta << 0.39, -1.41, 0.0;
  return LinearProgramPolicy({2, 1, true}, theta);
}

Polynomial P(const std::string& s, int n = 1) { return Polynomial::Parse(s, n); }

TEST(SketchTest, FullBasis) {
  const auto s = InvariantSketch::Full(2, 4);
  EXPECT_EQ(s.unknowns(), 15);
  EXPECT_EQ(InvariantSketch::Full(1, 2).unknowns(), 3);
  EXPECT_THROW(InvariantSketch::Full(0, 2), ConfigError);
}

TEST(ClosedLoopTest, SubstitutesProgram) {
  const auto next = closed_loop(Duffing(), DuffingProgram());
  ASSERT_EQ(next.size(), 2u);
  const Vector s = {0.3, -0.7};
  const double u = 0.39 * 0.3 - 1.41 * -0.7;
  EXPECT_NEAR(next[0].eval(s), 0.3 + 0.01 * -0.7, 1e-14);
  EXPECT_NEAR(next[1].eval(s),
              -0.7 + 0.01 * (-0.6 * -0.7 - 0.3 - 0.027 + u), 1e-14);
}

TEST(TaskTest, DomainIsInflatedSafeBox) {
  const auto t = make_task(Duffing(), DuffingProgram(), Duffing().s0_set);
  EXPECT_EQ(t.domain, BoxSet({-5.5, -5.5}, {5.5, 5.5}));
  EXPECT_EQ(t.disturbance, (Vector{0.0, 0.0}));
}

TEST(EquilibriumTest, FindsFixedPoint) {
  const std::vector<Polynomial> next = {P("x0 + 0.01 * (x0 - 0.5)")};
  const auto eq = find_equilibrium(next, BoxSet({-2.0}, {2.0}), {1.5});
  ASSERT_TRUE(eq.has_value());
  EXPECT_NEAR((*eq)[0], 0.5, 1e-12);
  EXPECT_FALSE(find_equilibrium(next, BoxSet({1.0}, {2.0}), {1.5}));
  EXPECT_FALSE(find_equilibrium({P("x0 + 0.01")}, BoxSet({-2.0}, {2.0}), {0.0}));
}

TEST(HaltonTest, FirstPoints) {
  EXPECT_EQ(halton(1, 2), (Vector{0.5, 1.0 / 3.0}));
  EXPECT_EQ(halton(2, 2), (Vector{0.25, 2.0 / 3.0}));
  EXPECT_DOUBLE_EQ(halton(3, 1)[0], 0.75);
  EXPECT_THROW(halton(1, 40), ConfigError);
}

TEST(FalsifyTest, ToyExamples) {
  const auto t = Toy();
  EXPECT_FALSE(falsify(P("x0^2 - 3"), t).has_value());

  const auto cex = falsify(P("x0^2 - 5"), t);
  ASSERT_TRUE(cex.has_value());
  EXPECT_EQ(cex->condition, Condition::kUnsafe);
  EXPECT_DOUBLE_EQ(std::abs(cex->state[0]), 2.0);
  EXPECT_DOUBLE_EQ(cex->value, -1.0);
}

TEST(FalsifyTest, EachConditionDetected) {
  const auto t = Toy();
  // Negative everywhere: unsafe states are inside the invariant.
  EXPECT_EQ(falsify(P("-1"), t)->condition, Condition::kUnsafe);
  // Too tight: E > 0 at the edge of S0.
  const auto c7 = falsify(P("x0^2 - 0.5"), t);
  ASSERT_TRUE(c7);
  EXPECT_EQ(c7->condition, Condition::kInitial);
  // Increasing along trajectories.
  VerificationTask grow = t;
  grow.next = {P("1.01 * x0")};
  const auto c8 = falsify(P("x0^2 - 3"), grow);
  ASSERT_TRUE(c8);
  EXPECT_EQ(c8->condition, Condition::kDecrease);
  EXPECT_GT(c8->value, 0.0);
}

TEST(FalsifyTest, DisturbanceCornersChecked) {
  auto t = Toy();
  EXPECT_FALSE(falsify(P("x0^2 - 3"), t));
  // |d| <= 5 can push 0.99 s outward near the level set s^2 = 3.
  t.disturbance = {5.0};
  const auto cex = falsify(P("x0^2 - 3"), t);
  ASSERT_TRUE(cex);
  EXPECT_EQ(cex->condition, Condition::kDecrease);
}

TEST(FalsifyTest, BoundaryShellFoundWithFewSamples) {
  // A neutral loop with a small push leaves {s^2 <= 1} only from a shell of
  // width dt * d inside |s| = 1, which 50 quasi-random points miss.
  auto t = Toy();
  t.next = {P("x0")};
  t.disturbance = {0.5};
  FalsifyOptions few;
  few.samples = 50;
  few.refine_steps = 0;
  const auto cex = falsify(P("x0^2 - 1"), t, few);
  ASSERT_TRUE(cex);
  EXPECT_EQ(cex->condition, Condition::kDecrease);
  EXPECT_NEAR(std::abs(cex->state[0]), 1.0, 1e-9);
}

TEST(FalsifyTest, OffsetDrawsFreshPoints) {
  const auto t = Toy();
  FalsifyOptions fresh;
  fresh.offset = 1000000;
  EXPECT_FALSE(falsify(P("x0^2 - 3"), t, fresh));
  EXPECT_EQ(falsify(P("x0^2 - 5"), t, fresh)->condition, Condition::kUnsafe);
  fresh.offset = -1;
  EXPECT_THROW(falsify(P("x0^2 - 3"), t, fresh), ConfigError);
}

TEST(BuildVcsTest, ToyStructure) {
  const auto prog = build_vcs(Toy(), InvariantSketch::Full(1, 2), 0, {});
  // Two unsafe half-spaces, the initial region and the decrease condition.
  ASSERT_EQ(prog.constraints.size(), 4u);
  EXPECT_TRUE(prog.frame.at_equilibrium);
  EXPECT_NEAR(prog.frame.anchor[0], 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(prog.frame.scale[0], 2.2);
  EXPECT_EQ(prog.sdp.num_free, 3);
  EXPECT_THROW(build_vcs(Toy(), InvariantSketch::Full(1, 2), 1, {}),
               ConfigError);
}

TEST(BuildVcsTest, UnreachableMonomialIsStructuralError) {
  // A linear sketch cannot cover the quadratic decrease strictness term.
  InvariantSketch sketch{1, 1, {Monomial(), Monomial::Var(0)}};
  try {
    const auto prog = build_vcs(Toy(), sketch, 0, {});
    const auto sol = sdp_solve(prog.sdp);
    EXPECT_NE(sol.status, SdpStatus::kFeasible);
  } catch (const StructuralError& e) {
    EXPECT_NE(std::string(e.what()).find("monomial"), std::string::npos);
  }
}

TEST(SynthesizeTest, ToyDegreeTwo) {
  const auto t = Toy();
  const auto res = synthesize_certificate(t, 2, {});
  ASSERT_TRUE(res.certificate.has_value()) << res.reason;
  const Polynomial& E = res.certificate->E;
  const double a = E.coeff(Monomial::Var(0, 2));
  const double b = E.coeff(Monomial::Var(0, 1));
  const double c = E.coeff(Monomial());
  ASSERT_GT(a, 0.0);
  EXPECT_NEAR(b / a, 0.0, 1e-6);
  const double k = -c / a;
  EXPECT_GT(k, 2.0);
  EXPECT_LT(k, 4.0);
  EXPECT_GT(res.certificate->margin, 0.0);
  // E(center) = -1 normalization.
  EXPECT_NEAR(E.eval(Vector{0.0}), -1.0, 1e-9);
}

TEST(SynthesizeTest, ReconstructionAndSolverInvariants) {
  const auto prog = build_vcs(Toy(), InvariantSketch::Full(1, 2), 0, {});
  const auto sol = sdp_solve(prog.sdp);
  ASSERT_EQ(sol.status, SdpStatus::kFeasible);
  EXPECT_GE(sol.min_eigenvalue, -1e-8);
  EXPECT_LE(sol.equality_residual, 1e-6);
  for (double e : prog.reconstruction_errors(sol)) EXPECT_LE(e, 1e-6);
}

TEST(SynthesizeTest, EmptyUnsafeSetIsTrivial) {
  auto t = Toy();
  t.unsafe = UnsafeSet(BoxSet({-INFINITY}, {INFINITY}));
  const auto res = synthesize_certificate(t, 2, {});
  ASSERT_TRUE(res.certificate.has_value()) << res.reason;
  EXPECT_FALSE(falsify(res.certificate->E, t).has_value());
}

TEST(SynthesizeTest, HugeEpsilonIsNotFound) {
  CertificateConfig cfg;
  cfg.sos.epsilon = 100.0;
  const auto res = synthesize_certificate(Toy(), 2, cfg);
  EXPECT_FALSE(res.certificate.has_value());
  EXPECT_FALSE(res.reason.empty());
  ASSERT_FALSE(res.attempts.empty());
  EXPECT_NE(res.attempts.front().status, SdpStatus::kFeasible);
}

TEST(SynthesizeTest, RejectsOddDegree) {
  EXPECT_THROW(synthesize_certificate(Toy(), 3, {}), ConfigError);
  EXPECT_THROW(synthesize_certificate(Toy(), 0, {}), ConfigError);
}

TEST(SynthesizeTest, UnstableLoopHasNoCertificate) {
  auto t = Toy();
  t.next = {P("1.01 * x0")};
  const auto res = synthesize_certificate(t, 2, {});
  EXPECT_FALSE(res.certificate.has_value());
}

TEST(SynthesizeTest, DuffingDegreeFour) {
  // Sub-box around the sampled initial state (-0.46, -0.36).
  const auto env = Duffing();
  const BoxSet region({-1.96, -1.86}, {1.04, 1.14});
  const auto res = synthesize_certificate(region, env, DuffingProgram(), 4, {});
  ASSERT_TRUE(res.certificate.has_value()) << res.reason;
  const auto t = make_task(env, DuffingProgram(), region);
  FalsifyOptions dense;
  dense.samples = 100000;
  EXPECT_FALSE(falsify(res.certificate->E, t, dense).has_value());
  EXPECT_LT(res.seconds, 30.0);
}

TEST(SynthesizeTest, MidpointOfCertificatesPasses) {
  const auto t = Toy();
  const auto e1 = synthesize_certificate(t, 2, {});
  CertificateConfig other;
  other.sos.epsilon = 0.3;
  const auto e2 = synthesize_certificate(t, 4, other);
  ASSERT_TRUE(e1.certificate && e2.certificate);
  const Polynomial mid = (e1.certificate->E + e2.certificate->E) * 0.5;
  EXPECT_FALSE(falsify(mid, t).has_value());
}

TEST(SynthesizeTest, HigherDegreeAlsoSucceeds) {
  const auto t = Toy();
  for (int d : {2, 4, 6}) {
    const auto res = synthesize_certificate(t, d, {});
    EXPECT_TRUE(res.certificate.has_value()) << "degree " << d << ": "
                                             << res.reason;
  }
}

}  // namespace
}  // namespace shieldsyn
