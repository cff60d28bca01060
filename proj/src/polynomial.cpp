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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace shieldsyn {

// ---------------------------------------------------------------- Monomial

Monomial Monomial::FromExponents(std::span<const int> exponents) {
  Monomial m;
  for (size_t i = 0; i < exponents.size(); ++i) {
    if (exponents[i] < 0) throw Error("negative exponent in monomial");
    if (exponents[i] > 0) {
      m.factors_.emplace_back(static_cast<int>(i), exponents[i]);
      m.degree_ += exponents[i];
    }
  }
  return m;
}

Monomial Monomial::Var(int index, int exponent) {
  Monomial m;
  if (index < 0 || exponent < 0) throw Error("bad variable/exponent");
  if (exponent > 0) {
    m.factors_.emplace_back(index, exponent);
    m.degree_ = exponent;
  }
  return m;
}

int Monomial::exponent(int var) const {
  for (const auto& [v, e] : factors_) {
    if (v == var) return e;
    if (v > var) break;
  }
  return 0;
}

std::vector<int> Monomial::dense(int nvars) const {
  std::vector<int> out(nvars, 0);
  for (const auto& [v, e] : factors_) {
    if (v >= nvars) throw DimensionError("monomial variable out of range");
    out[v] = e;
  }
  return out;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial r;
  r.factors_.reserve(factors_.size() + other.factors_.size());
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() || b != other.factors_.end()) {
    if (b == other.factors_.end() ||
        (a != factors_.end() && a->first < b->first)) {
      r.factors_.push_back(*a++);
    } else if (a == factors_.end() || b->first < a->first) {
      r.factors_.push_back(*b++);
    } else {
      r.factors_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  r.degree_ = degree_ + other.degree_;
  return r;
}

bool Monomial::divide(const Monomial& other, Monomial* quotient) const {
  Monomial q;
  auto b = other.factors_.begin();
  for (const auto& [v, e] : factors_) {
    if (b != other.factors_.end() && b->first < v) return false;
    int sub = 0;
    if (b != other.factors_.end() && b->first == v) sub = (b++)->second;
    if (sub > e) return false;
    if (e - sub > 0) q.factors_.emplace_back(v, e - sub);
  }
  if (b != other.factors_.end()) return false;
  q.degree_ = degree_ - other.degree_;
  *quotient = std::move(q);
  return true;
}

double Monomial::eval(std::span<const double> x) const {
  double r = 1.0;
  for (const auto& [v, e] : factors_) {
    const double xv = x[v];
    double p = xv;
    for (int k = 1; k < e; ++k) p *= xv;
    r *= p;
  }
  return r;
}

bool operator<(const Monomial& a, const Monomial& b) {
  if (a.degree_ != b.degree_) return a.degree_ < b.degree_;
  // Same degree: the monomial with the larger exponent on the lowest
  // differing variable sorts first.
  auto ia = a.factors_.begin();
  auto ib = b.factors_.begin();
  while (ia != a.factors_.end() && ib != b.factors_.end()) {
    if (ia->first != ib->first) return ia->first < ib->first;
    if (ia->second != ib->second) return ia->second > ib->second;
    ++ia;
    ++ib;
  }
  return ia != a.factors_.end() && ib == b.factors_.end();
}

std::string Monomial::to_string(std::span<const std::string> names) const {
  std::string out;
  for (const auto& [v, e] : factors_) {
    if (!out.empty()) out += ' ';
    if (static_cast<size_t>(v) < names.size()) {
      out += names[v];
    } else {
      out += 'x' + std::to_string(v);
    }
    if (e != 1) out += '^' + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

namespace {

void enumerate(int var, int nvars, int remaining, std::vector<int>& exps,
               std::vector<Monomial>& out) {
  if (var == nvars - 1) {
    exps[var] = remaining;
    out.push_back(Monomial::FromExponents(exps));
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    exps[var] = e;
    enumerate(var + 1, nvars, remaining - e, exps, out);
  }
  exps[var] = 0;
}

}  // namespace

std::vector<Monomial> monomials_up_to_degree(int nvars, int max_degree) {
  if (nvars < 1 || max_degree < 0) {
    throw Error("monomials_up_to_degree: need nvars >= 1 and degree >= 0");
  }
  std::vector<Monomial> out;
  std::vector<int> exps(nvars, 0);
  for (int d = 0; d <= max_degree; ++d) enumerate(0, nvars, d, exps, out);
  return out;
}

// -------------------------------------------------------------- Polynomial

Polynomial Polynomial::Constant(int nvars, double value) {
  Polynomial p(nvars);
  p.add_term(Monomial(), value);
  p.prune();
  return p;
}

Polynomial Polynomial::Var(int nvars, int index) {
  if (index < 0 || index >= nvars) {
    throw DimensionError("variable index out of range");
  }
  Polynomial p(nvars);
  p.terms_[Monomial::Var(index)] = 1.0;
  return p;
}

Polynomial Polynomial::FromTerms(int nvars, Terms terms) {
  Polynomial p(nvars);
  for (const auto& [m, c] : terms) {
    if (m.min_nvars() > nvars) throw DimensionError("term outside space");
  }
  p.terms_ = std::move(terms);
  p.prune();
  return p;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double Polynomial::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double c) {
  if (m.min_nvars() > nvars_) throw DimensionError("term outside space");
  terms_[m] += c;
}

void Polynomial::prune(double tol) {
  std::erase_if(terms_, [tol](const auto& kv) {
    return std::abs(kv.second) < tol;
  });
}

double Polynomial::eval(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != nvars_) {
    throw DimensionError("eval: expected " + std::to_string(nvars_) +
                         " values, got " + std::to_string(x.size()));
  }
  double sum = 0.0;
  for (const auto& [m, c] : terms_) sum += c * m.eval(x);
  return sum;
}

void Polynomial::check_same_space(const Polynomial& q) const {
  if (q.nvars_ != nvars_) {
    throw DimensionError("polynomial spaces differ: " + std::to_string(nvars_) +
                         " vs " + std::to_string(q.nvars_));
  }
}

Polynomial Polynomial::operator+(const Polynomial& q) const {
  Polynomial r = *this;
  r += q;
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& q) {
  check_same_space(q);
  for (const auto& [m, c] : q.terms_) terms_[m] += c;
  prune();
  return *this;
}

Polynomial Polynomial::operator-(const Polynomial& q) const {
  return *this + (-q);
}

Polynomial Polynomial::operator*(const Polynomial& q) const {
  check_same_space(q);
  Polynomial r(nvars_);
  for (const auto& [ma, ca] : terms_) {
    for (const auto& [mb, cb] : q.terms_) r.terms_[ma * mb] += ca * cb;
  }
  r.prune();
  return r;
}

Polynomial Polynomial::operator*(double c) const {
  Polynomial r(nvars_);
  for (const auto& [m, v] : terms_) r.terms_[m] = v * c;
  r.prune();
  return r;
}

Polynomial Polynomial::pow(int k) const {
  if (k < 0) throw Error("negative polynomial power");
  Polynomial result = Constant(nvars_, 1.0);
  Polynomial base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    k >>= 1;
    if (k > 0) base = base * base;
  }
  return result;
}

Polynomial Polynomial::substitute(int var, const Polynomial& q) const {
  if (var < 0 || var >= nvars_) {
    throw DimensionError("substitute: variable index out of range");
  }
  check_same_space(q);
  std::vector<Polynomial> repl;
  repl.reserve(nvars_);
  for (int i = 0; i < nvars_; ++i) {
    repl.push_back(i == var ? q : Var(nvars_, i));
  }
  return compose(repl);
}

Polynomial Polynomial::compose(std::span<const Polynomial> replacements) const {
  if (static_cast<int>(replacements.size()) != nvars_) {
    throw DimensionError("compose: need one replacement per variable");
  }
  const int out_vars = replacements.empty() ? 0 : replacements[0].nvars();
  for (const auto& r : replacements) {
    if (r.nvars() != out_vars) throw DimensionError("compose: mixed spaces");
  }
  // powers[v][k] = replacements[v]^k, filled lazily.
  std::vector<std::vector<Polynomial>> powers(nvars_);
  auto power = [&](int v, int k) -> const Polynomial& {
    auto& list = powers[v];
    if (list.empty()) list.push_back(Constant(out_vars, 1.0));
    while (static_cast<int>(list.size()) <= k) {
      list.push_back(list.back() * replacements[v]);
    }
    return list[k];
  };
  Polynomial result(out_vars);
  for (const auto& [m, c] : terms_) {
    Polynomial term = Constant(out_vars, c);
    for (const auto& [v, e] : m.factors()) term = term * power(v, e);
    for (const auto& [mm, cc] : term.terms_) result.terms_[mm] += cc;
  }
  result.prune();
  return result;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= nvars_) throw DimensionError("variable out of range");
  Polynomial r(nvars_);
  for (const auto& [m, c] : terms_) {
    const int e = m.exponent(var);
    if (e == 0) continue;
    Monomial q;
    m.divide(Monomial::Var(var), &q);
    r.add_term(q, c * e);
  }
  r.prune();
  return r;
}

Polynomial Polynomial::with_nvars(int nvars) const {
  Polynomial r(nvars);
  for (const auto& [m, c] : terms_) {
    if (m.min_nvars() > nvars) throw DimensionError("with_nvars: too small");
    r.terms_[m] = c;
  }
  return r;
}

Polynomial Polynomial::rounded(int digits) const {
  Polynomial r(nvars_);
  char buf[64];
  for (const auto& [m, c] : terms_) {
    std::snprintf(buf, sizeof(buf), "%.*g", digits, c);
    r.terms_[m] = std::strtod(buf, nullptr);
  }
  r.prune(0.0);
  return r;
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (const auto& [mono, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

std::string Polynomial::to_string(std::span<const std::string> names) const {
  if (terms_.empty()) return "0";
  std::string out;
  char buf[64];
  for (const auto& [m, c] : terms_) {
    if (!out.empty()) out += " + ";
    std::snprintf(buf, sizeof(buf), "%.17g", c);
    out += buf;
    if (!m.is_constant()) {
      out += " * ";
      out += m.to_string(names);
    }
  }
  return out;
}

// ------------------------------------------------------------------ parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, int nvars, std::span<const std::string> names)
      : text_(text), nvars_(nvars), names_(names) {}

  Polynomial parse() {
    skip_ws();
    if (pos_ >= text_.size()) fail("empty polynomial");
    Polynomial p = expr();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return p;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("polynomial parse error at offset " +
                     std::to_string(pos_) + ": " + what + " in \"" +
                     std::string(text_) + "\"");
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool starts_factor() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
           c == '(' || std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      const char c = peek();
      if (c == '+') {
        ++pos_;
        acc += term();
      } else if (c == '-') {
        ++pos_;
        acc += -term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    for (;;) {
      if (peek() == '*') {
        ++pos_;
        acc = acc * unary();
      } else if (starts_factor()) {
        acc = acc * unary();
      } else {
        return acc;
      }
    }
  }

  Polynomial unary() {
    const char c = peek();
    if (c == '-') {
      ++pos_;
      return -unary();
    }
    if (c == '+') {
      ++pos_;
      return unary();
    }
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      size_t start = pos_;
      while (pos_ < text_.size() &&
             std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
      if (start == pos_) fail("expected non-negative integer exponent");
      const int k = std::stoi(std::string(text_.substr(start, pos_ - start)));
      return base.pow(k);
    }
    return base;
  }

  Polynomial primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (peek() != ')') fail("expected ')'");
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::string rest(text_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) fail("bad number");
      pos_ += static_cast<size_t>(end - rest.c_str());
      if (!std::isfinite(v)) fail("non-finite coefficient");
      return Polynomial::Constant(nvars_, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_')) {
        ++pos_;
      }
      const std::string ident(text_.substr(start, pos_ - start));
      return Polynomial::Var(nvars_, resolve(ident));
    }
    fail("expected number, variable or '('");
  }

  int resolve(const std::string& ident) {
    for (size_t i = 0; i < names_.size(); ++i) {
      if (names_[i] == ident) return static_cast<int>(i);
    }
    if (ident.size() > 1 && ident[0] == 'x' &&
        std::all_of(ident.begin() + 1, ident.end(),
                    [](char ch) { return std::isdigit(
                                      static_cast<unsigned char>(ch)); })) {
      const int idx = std::stoi(ident.substr(1));
      if (idx < nvars_) return idx;
    }
    fail("unknown variable '" + ident + "'");
  }

  std::string_view text_;
  size_t pos_ = 0;
  int nvars_;
  std::span<const std::string> names_;
};

}  // namespace

Polynomial Polynomial::Parse(std::string_view text, int nvars,
                             std::span<const std::string> names) {
  return Parser(text, nvars, names).parse();
}

// -------------------------------------------------------------- Gram match

std::vector<GramConstraint> gram_match(const Polynomial& p,
                                       std::span<const Monomial> basis) {
  std::map<Monomial, std::vector<std::pair<int, int>>> products;
  const int n = static_cast<int>(basis.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) products[basis[i] * basis[j]].emplace_back(i, j);
  }
  for (const auto& [m, c] : p.terms()) {
    if (!products.contains(m)) {
      throw StructuralError("monomial '" + m.to_string() +
                            "' is not a product of two basis monomials");
    }
  }
  std::vector<GramConstraint> out;
  out.reserve(products.size());
  for (auto& [m, pairs] : products) {
    out.push_back({m, std::move(pairs), p.coeff(m)});
  }
  return out;
}

Polynomial gram_reconstruct(std::span<const Monomial> basis,
                            std::span<const double> q_row_major, int nvars) {
  const size_t n = basis.size();
  if (q_row_major.size() != n * n) {
    throw DimensionError("gram_reconstruct: matrix size mismatch");
  }
  Polynomial r(nvars);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      r.add_term(basis[i] * basis[j], q_row_major[i * n + j]);
    }
  }
  r.prune();
  return r;
}

}  // namespace shieldsyn
