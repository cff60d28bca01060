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


#include "polynomial.hpp"

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

namespace shieldsyn {
namespace {

Polynomial P(const std::string& text, int nvars,
             const std::vector<std::string>& names = {}) {
  return Polynomial::Parse(text, nvars, names);
}

double NaivePow(double x, int e) {
  double r = 1.0;
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

// Straight-line evaluation used as an independent reference.
double Reference(const Polynomial& p, const std::vector<double>& x) {
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double t = c;
    for (int i = 0; i < static_cast<int>(x.size()); ++i) {
      t *= NaivePow(x[i], m.exponent(i));
    }
    sum += t;
  }
  return sum;
}

Polynomial RandomPoly(std::mt19937_64& rng, int nvars, int max_degree,
                      int terms) {
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_int_distribution<int> exp(0, max_degree);
  Polynomial p(nvars);
  for (int t = 0; t < terms; ++t) {
    std::vector<int> e(nvars);
    int budget = max_degree;
    for (int i = 0; i < nvars; ++i) {
      e[i] = std::min(budget, exp(rng) / nvars);
      budget -= e[i];
    }
    p.add_term(Monomial::FromExponents(e), coef(rng));
  }
  p.prune();
  return p;
}

TEST(PolynomialTest, EvalExamples) {
  const Polynomial p = P("x0^2 + 2 x0 x1", 2);
  EXPECT_EQ(p.eval(std::vector<double>{0, 5}), 0.0);
  EXPECT_EQ(p.eval(std::vector<double>{1, 1}), 3.0);
  const Polynomial duffing_like = P("12.8 x^4 + 0.9 x^3 y", 2, {"x", "y"});
  EXPECT_NEAR(duffing_like.eval(std::vector<double>{1, 1}), 13.7, 1e-12);
}

TEST(PolynomialTest, EvalDimensionMismatchThrows) {
  const Polynomial p = P("x0 + x1", 2);
  EXPECT_THROW(p.eval(std::vector<double>{1.0}), DimensionError);
}

TEST(PolynomialTest, ArithmeticExamples) {
  const Polynomial x0 = Polynomial::Var(2, 0);
  const Polynomial x1 = Polynomial::Var(2, 1);
  EXPECT_TRUE((x0 - x0).is_zero());
  EXPECT_EQ((x0 + x1) * (x0 - x1), x0 * x0 - x1 * x1);
  const Polynomial scaled = (x0 * 0.39 - x1 * 1.41) * 2.0;
  EXPECT_NEAR(scaled.coeff(Monomial::Var(0)), 0.78, 1e-15);
  EXPECT_NEAR(scaled.coeff(Monomial::Var(1)), -2.82, 1e-15);
  EXPECT_EQ(scaled.terms().size(), 2u);
}

TEST(PolynomialTest, MixedSpacesThrow) {
  EXPECT_THROW(Polynomial::Var(2, 0) + Polynomial::Var(3, 0), DimensionError);
  EXPECT_THROW(Polynomial::Var(2, 0) * Polynomial::Var(1, 0), DimensionError);
}

TEST(PolynomialTest, DegreeOfProduct) {
  const Polynomial p = P("x0^3 + x1 - 1", 2);
  const Polynomial q = P("x0 x1^2 + 4", 2);
  EXPECT_EQ((p * q).degree(), p.degree() + q.degree());
}

TEST(PolynomialTest, SubstituteExamples) {
  // a := x + y in a^2, variables (x, y, a).
  const Polynomial a2 = P("a^2", 3, {"x", "y", "a"});
  const Polynomial sum = P("x + y", 3, {"x", "y", "a"});
  EXPECT_EQ(a2.substitute(2, sum), P("x^2 + 2 x y + y^2", 3, {"x", "y", "a"}));

  const Polynomial x0 = Polynomial::Var(1, 0);
  EXPECT_EQ(x0.substitute(0, x0), x0);

  const std::vector<std::string> names = {"x", "y", "a"};
  const Polynomial ydot = P("-0.6 y - x - x^3 + a", 3, names);
  const Polynomial p1 = P("0.39 x - 1.41 y", 3, names);
  const Polynomial closed = ydot.substitute(2, p1);
  EXPECT_NEAR(closed.coeff(Monomial::Var(0)), -0.61, 1e-14);
  EXPECT_NEAR(closed.coeff(Monomial::Var(1)), -2.01, 1e-14);
  EXPECT_NEAR(closed.coeff(Monomial::Var(0, 3)), -1.0, 1e-14);
  EXPECT_EQ(closed.terms().size(), 3u);
}

TEST(PolynomialTest, SubstituteOutOfRangeThrows) {
  const Polynomial p = P("x0", 2);
  EXPECT_THROW(p.substitute(2, p), Error);
}

TEST(PolynomialTest, MonomialCounts) {
  EXPECT_EQ(monomials_up_to_degree(2, 2).size(), 6u);
  EXPECT_EQ(monomials_up_to_degree(2, 4).size(), 15u);
  const auto one = monomials_up_to_degree(1, 0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_TRUE(one[0].is_constant());
}

TEST(PolynomialTest, MonomialOrderIsGraded) {
  const auto b = monomials_up_to_degree(2, 2);
  std::vector<std::string> text;
  for (const auto& m : b) text.push_back(m.to_string());
  EXPECT_EQ(text, (std::vector<std::string>{"1", "x0", "x1", "x0^2", "x0 x1",
                                            "x1^2"}));
}

int Binomial(int n, int k) {
  long long r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return static_cast<int>(r);
}

TEST(PolynomialTest, MonomialEnumerationProperties) {
  for (int n = 1; n <= 4; ++n) {
    for (int d = 0; d <= 8; ++d) {
      const auto basis = monomials_up_to_degree(n, d);
      EXPECT_EQ(static_cast<int>(basis.size()), Binomial(n + d, d));
      std::set<Monomial> unique(basis.begin(), basis.end());
      EXPECT_EQ(unique.size(), basis.size());
      for (size_t i = 0; i < basis.size(); ++i) {
        EXPECT_LE(basis[i].degree(), d);
        if (i > 0) EXPECT_TRUE(basis[i - 1] < basis[i]);
      }
    }
  }
}

TEST(PolynomialTest, RingHomomorphism) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 4;
    const Polynomial p = RandomPoly(rng, n, 4, 6);
    const Polynomial q = RandomPoly(rng, n, 4, 6);
    std::vector<double> x(n);
    for (double& v : x) v = u(rng);
    const double pv = Reference(p, x), qv = Reference(q, x);
    const double scale = 1.0 + std::abs(pv) + std::abs(qv) +
                         std::abs(pv * qv);
    EXPECT_NEAR((p + q).eval(x), pv + qv, 1e-9 * scale);
    EXPECT_NEAR((p - q).eval(x), pv - qv, 1e-9 * scale);
    EXPECT_NEAR((p * q).eval(x), pv * qv, 1e-9 * scale);
    EXPECT_NEAR((p * 3.5).eval(x), 3.5 * pv, 1e-9 * scale);
  }
}

TEST(PolynomialTest, SubstitutionProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.2, 1.2);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 3;
    const int var = trial % n;
    const Polynomial p = RandomPoly(rng, n, 4, 5);
    const Polynomial q = RandomPoly(rng, n, 2, 3);
    std::vector<double> x(n);
    for (double& v : x) v = u(rng);
    std::vector<double> y = x;
    y[var] = Reference(q, x);
    const double expected = Reference(p, y);
    const double scale = 1.0 + std::abs(expected) + p.max_abs_coeff() * 50;
    EXPECT_NEAR(p.substitute(var, q).eval(x), expected, 1e-9 * scale);
  }
}

TEST(PolynomialTest, ComposeMatchesSequentialEvaluation) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Polynomial p = RandomPoly(rng, 3, 4, 6);
    std::vector<Polynomial> reps;
    for (int i = 0; i < 3; ++i) reps.push_back(RandomPoly(rng, 2, 2, 3));
    std::vector<double> x = {u(rng), u(rng)};
    std::vector<double> y = {Reference(reps[0], x), Reference(reps[1], x),
                             Reference(reps[2], x)};
    const double expected = Reference(p, y);
    EXPECT_NEAR(p.compose(reps).eval(x), expected,
                1e-9 * (1.0 + std::abs(expected) + 100 * p.max_abs_coeff()));
  }
}

TEST(PolynomialTest, Derivative) {
  const std::vector<std::string> names = {"x", "y"};
  EXPECT_EQ(P("x^3 y + 2 y^2 - x", 2, names).derivative(0),
            P("3 x^2 y - 1", 2, names));
  EXPECT_EQ(P("x^3 y + 2 y^2 - x", 2, names).derivative(1),
            P("x^3 + 4 y", 2, names));
  EXPECT_TRUE(P("7", 2, names).derivative(1).is_zero());
  EXPECT_THROW(P("x", 2, names).derivative(2), DimensionError);
}

TEST(PolynomialTest, PrintParseRoundTripIsExact) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + trial % 4;
    const Polynomial p = RandomPoly(rng, n, 6, 8);
    const Polynomial back = Polynomial::Parse(p.to_string(), n);
    EXPECT_EQ(back, p) << p.to_string();
  }
  EXPECT_EQ(Polynomial::Parse("0", 2).to_string(), "0");
}

TEST(PolynomialTest, ParserGrammar) {
  const std::vector<std::string> names = {"x", "y"};
  EXPECT_EQ(P("(x + y)^2", 2, names), P("x^2 + 2*x*y + y^2", 2, names));
  EXPECT_EQ(P("-x - -y", 2, names), P("y - x", 2, names));
  EXPECT_EQ(P("2(x)(y)", 2, names), P("2 x y", 2, names));
  EXPECT_EQ(P("1e-3 * x0", 2), Polynomial::Var(2, 0) * 1e-3);
  EXPECT_THROW(P("x + ", 2, names), ParseError);
  EXPECT_THROW(P("z", 2, names), ParseError);
  EXPECT_THROW(P("x2", 2), ParseError);
  EXPECT_THROW(P("", 2), ParseError);
  EXPECT_THROW(P("x^y", 2, names), ParseError);
}

TEST(PolynomialTest, PruningRemovesDust) {
  Polynomial p = P("x0 + 1e-13 x1", 2);
  EXPECT_EQ(p.terms().size(), 1u);
  const Polynomial q = P("x0 + 1", 1) * P("x0 - 1", 1) - P("x0^2", 1);
  EXPECT_EQ(q, Polynomial::Constant(1, -1.0));
}

TEST(PolynomialTest, RoundedKeepsSignificantDigits) {
  const Polynomial p = P("0.123456789012345678 x0 + 98765.4321098765 x0^2", 1);
  const Polynomial r = p.rounded(12);
  EXPECT_EQ(r.coeff(Monomial::Var(0)), 0.123456789012);
  EXPECT_EQ(r.coeff(Monomial::Var(0, 2)), 98765.4321099);
}

TEST(GramMatchTest, PerfectSquare) {
  const std::vector<Monomial> basis = {Monomial::Var(0), Monomial::Var(1)};
  const auto cons = gram_match(P("x0^2 + 2 x0 x1 + x1^2", 2), basis);
  ASSERT_EQ(cons.size(), 3u);
  // Q = [[1,1],[1,2]] satisfies the x0^2 and cross constraints but not x1^2.
  const double bad[2][2] = {{1, 1}, {1, 2}};
  const double good[2][2] = {{1, 1}, {1, 1}};
  auto satisfied = [&](const double q[2][2]) {
    for (const auto& c : cons) {
      double s = 0;
      for (auto [i, j] : c.pairs) s += q[i][j];
      if (std::abs(s - c.rhs) > 1e-12) return false;
    }
    return true;
  };
  EXPECT_FALSE(satisfied(bad));
  EXPECT_TRUE(satisfied(good));
  for (const auto& c : cons) {
    if (c.monomial == Monomial::Var(0) * Monomial::Var(1)) {
      EXPECT_EQ(c.pairs.size(), 2u);
      EXPECT_EQ(c.rhs, 2.0);
    } else {
      EXPECT_EQ(c.pairs.size(), 1u);
      EXPECT_EQ(c.rhs, 1.0);
    }
  }
}

TEST(GramMatchTest, IndefiniteFormForcesNegativeDiagonal) {
  const std::vector<Monomial> basis = {Monomial::Var(0), Monomial::Var(1)};
  const auto cons = gram_match(P("x0^2 - x1^2", 2), basis);
  bool found = false;
  for (const auto& c : cons) {
    if (c.monomial == Monomial::Var(1, 2)) {
      ASSERT_EQ(c.pairs.size(), 1u);
      EXPECT_EQ(c.pairs[0], std::make_pair(1, 1));
      EXPECT_EQ(c.rhs, -1.0);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(GramMatchTest, SingleElementBasis) {
  const std::vector<Monomial> basis = {Monomial::Var(0)};
  const auto cons = gram_match(P("2 x0^2", 1), basis);
  ASSERT_EQ(cons.size(), 1u);
  EXPECT_EQ(cons[0].rhs, 2.0);
}

TEST(GramMatchTest, UnrepresentableMonomialThrows) {
  const std::vector<Monomial> basis = {Monomial::Var(0), Monomial::Var(1)};
  EXPECT_THROW(gram_match(P("x0^3", 2), basis), StructuralError);
  EXPECT_THROW(gram_match(P("1 + x0^2", 2), basis), StructuralError);
}

TEST(GramMatchTest, RoundTripWithPsdMatrix) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g(0.0, 1.0);
  const auto basis = monomials_up_to_degree(2, 2);
  const int n = static_cast<int>(basis.size());
  for (int trial = 0; trial < 50; ++trial) {
    // Q = L L^T is PSD; its polynomial must match every constraint rhs.
    std::vector<double> l(n * n), q(n * n, 0.0);
    for (double& v : l) v = g(rng);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) q[i * n + j] += l[i * n + k] * l[j * n + k];
    const Polynomial p = gram_reconstruct(basis, q, 2);
    const auto cons = gram_match(p, basis);
    for (const auto& c : cons) {
      double s = 0.0;
      for (auto [i, j] : c.pairs) s += q[i * n + j];
      EXPECT_NEAR(s, c.rhs, 1e-8);
    }
    EXPECT_EQ(gram_reconstruct(basis, q, 2).terms().size(), p.terms().size());
  }
}

}  // namespace
}  // namespace shieldsyn
