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

#ifndef SHIELDSYN_POLYNOMIAL_HPP_
#define SHIELDSYN_POLYNOMIAL_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"

namespace shieldsyn {

/// A product of variables with positive integer exponents, stored sparsely as
/// (variable index, exponent) pairs sorted by variable index.
class Monomial {
 public:
  Monomial() = default;
  /// Builds a monomial from a dense exponent vector (zeros are dropped).
  static Monomial FromExponents(std::span<const int> exponents);
  static Monomial Var(int index, int exponent = 1);

  int degree() const { return degree_; }
  int exponent(int var) const;
  bool is_constant() const { return factors_.empty(); }
  /// Largest variable index present plus one (0 for the constant monomial).
  int min_nvars() const {
    return factors_.empty() ? 0 : factors_.back().first + 1;
  }
  const std::vector<std::pair<int, int>>& factors() const { return factors_; }
  std::vector<int> dense(int nvars) const;

  Monomial operator*(const Monomial& other) const;
  /// Exact division; returns false when `other` does not divide *this.
  bool divide(const Monomial& other, Monomial* quotient) const;

  double eval(std::span<const double> x) const;

  /// Graded order: lower total degree first, ties broken so that
  /// x0^2 < x0 x1 < x1^2.
  friend bool operator<(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.factors_ == b.factors_;
  }

  std::string to_string(std::span<const std::string> names = {}) const;

 private:
  std::vector<std::pair<int, int>> factors_;
  int degree_ = 0;
};

/// All monomials in `nvars` variables with total degree <= `max_degree`, in
/// canonical order. There are C(nvars + max_degree, max_degree) of them.
std::vector<Monomial> monomials_up_to_degree(int nvars, int max_degree);

/// Sparse multivariate polynomial with double coefficients.
///
/// Coefficients with magnitude below kPruneTolerance are dropped after every
/// arithmetic operation.
class Polynomial {
 public:
  static constexpr double kPruneTolerance = 1e-12;
  using Terms = std::map<Monomial, double>;

  Polynomial() = default;
  explicit Polynomial(int nvars) : nvars_(nvars) {}
  static Polynomial Constant(int nvars, double value);
  static Polynomial Var(int nvars, int index);
  static Polynomial FromTerms(int nvars, Terms terms);

  int nvars() const { return nvars_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;
  double coeff(const Monomial& m) const;

  /// Adds `c` to the coefficient of `m` without pruning.
  void add_term(const Monomial& m, double c);
  void prune(double tol = kPruneTolerance);

  double eval(std::span<const double> x) const;

  Polynomial operator+(const Polynomial& q) const;
  Polynomial operator-(const Polynomial& q) const;
  Polynomial operator*(const Polynomial& q) const;
  Polynomial operator*(double c) const;
  Polynomial operator-() const { return *this * -1.0; }
  Polynomial& operator+=(const Polynomial& q);
  Polynomial pow(int k) const;

  /// Replaces variable `var` by `q` (q must live in the same variable space).
  Polynomial substitute(int var, const Polynomial& q) const;
  /// Simultaneous substitution x_i := replacements[i]. The result lives in the
  /// variable space of the replacements (all must agree on nvars).
  Polynomial compose(std::span<const Polynomial> replacements) const;
  /// Partial derivative with respect to variable `var`.
  Polynomial derivative(int var) const;
  /// Re-embeds into a space of `nvars` variables (must cover every index used).
  Polynomial with_nvars(int nvars) const;
  /// Rounds every coefficient to `digits` significant decimal digits.
  Polynomial rounded(int digits) const;

  double max_abs_coeff() const;

  /// Canonical text form "c * x0^a x1^b + ..." using %.17g coefficients.
  std::string to_string(std::span<const std::string> names = {}) const;
  /// Parses a polynomial expression over variables named x0..x{nvars-1} (or
  /// the given names). Accepts + - * ^ parentheses, numeric literals, and
  /// juxtaposition as multiplication.
  static Polynomial Parse(std::string_view text, int nvars,
                          std::span<const std::string> names = {});

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
  }

 private:
  void check_same_space(const Polynomial& q) const;

  int nvars_ = 0;
  Terms terms_;
};

/// Coefficient-matching constraint for p = z^T Q z: the sum over `pairs`
/// (i, j) of Q(i, j) must equal `rhs`. Pairs list both (i, j) and (j, i) for
/// off-diagonal products.
struct GramConstraint {
  Monomial monomial;
  std::vector<std::pair<int, int>> pairs;
  double rhs = 0.0;
};

/// Builds the linear equalities on a Gram matrix Q indexed by `basis` that
/// make z^T Q z equal to p. Throws StructuralError when p has a monomial that
/// no product of basis elements produces.
std::vector<GramConstraint> gram_match(const Polynomial& p,
                                       std::span<const Monomial> basis);

/// sum_{i,j} Q(i,j) b_i b_j for a dense row-major n x n matrix.
Polynomial gram_reconstruct(std::span<const Monomial> basis,
                            std::span<const double> q_row_major, int nvars);

}  // namespace shieldsyn

#endif  // SHIELDSYN_POLYNOMIAL_HPP_
