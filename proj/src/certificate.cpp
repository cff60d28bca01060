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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include <Eigen/Dense>

namespace shieldsyn {

namespace {

constexpr int kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

Polynomial MonomialPoly(int n, const Monomial& m, double c = 1.0) {
  Polynomial p(n);
  p.add_term(m, c);
  return p;
}

// Powers next[j]^k for k = 0..max_degree, then b(next) = prod_j next[j]^e_j.
class Composer {
 public:
  Composer(const std::vector<Polynomial>& next, int max_degree) {
    const int n = static_cast<int>(next.size());
    powers_.resize(n);
    for (int j = 0; j < n; ++j) {
      powers_[j].push_back(Polynomial::Constant(next[j].nvars(), 1.0));
      for (int k = 1; k <= max_degree; ++k) {
        powers_[j].push_back(powers_[j].back() * next[j]);
      }
    }
    nvars_ = next.empty() ? 0 : next[0].nvars();
  }

  Polynomial operator()(const Monomial& m) const {
    Polynomial r = Polynomial::Constant(nvars_, 1.0);
    for (const auto& [v, e] : m.factors()) r = r * powers_[v][e];
    return r;
  }

 private:
  std::vector<std::vector<Polynomial>> powers_;
  int nvars_ = 0;
};

std::vector<Monomial> GramBasis(int n, int half, bool drop_constant) {
  if (half < 0) return {};
  std::vector<Monomial> b = monomials_up_to_degree(n, half);
  if (drop_constant && !b.empty() && b.front().is_constant()) {
    b.erase(b.begin());
  }
  return b;
}

Polynomial BoxGuard(int n, int j, double lo, double hi) {
  // (u_j - lo)(hi - u_j) >= 0 on the interval.
  const Polynomial u = Polynomial::Var(n, j);
  return (u - Polynomial::Constant(n, lo)) * (Polynomial::Constant(n, hi) - u);
}

struct RowKey {
  const SosConstraintInfo* info;
  Monomial monomial;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

InvariantSketch InvariantSketch::Full(int n, int degree_bound) {
  if (n < 1 || degree_bound < 0) {
    throw ConfigError("invariant sketch needs n >= 1 and degree >= 0");
  }
  return {n, degree_bound, monomials_up_to_degree(n, degree_bound)};
}

std::vector<Polynomial> closed_loop(const EnvironmentSpec& env,
                                    const LinearProgramPolicy& p) {
  if (p.sketch().n != env.n || p.sketch().m != env.m) {
    throw DimensionError("program does not match environment");
  }
  const int n = env.n;
  std::vector<Polynomial> reps;
  for (int i = 0; i < n; ++i) reps.push_back(Polynomial::Var(n, i));
  for (int j = 0; j < env.m; ++j) {
    Polynomial a = Polynomial::Constant(n, p.theta()(j, n));
    for (int k = 0; k < n; ++k) a += Polynomial::Var(n, k) * p.theta()(j, k);
    reps.push_back(a);
  }
  std::vector<Polynomial> next;
  for (int i = 0; i < n; ++i) {
    next.push_back(Polynomial::Var(n, i) + env.f[i].compose(reps) * env.dt);
  }
  return next;
}

VerificationTask make_task(const EnvironmentSpec& env,
                           const LinearProgramPolicy& p, const BoxSet& region,
                           double inflation, double unbounded_scale) {
  if (region.dim() != env.n) throw DimensionError("region dimension");
  if (!(inflation >= 1.0)) throw ConfigError("domain inflation must be >= 1");
  if (!(unbounded_scale >= 1.0)) {
    throw ConfigError("unbounded scale must be >= 1");
  }
  const BoxSet& safe = env.unsafe.safe_box();
  const Vector c = env.s0_set.center();
  const Vector w = env.s0_set.half_width();
  Vector lo = safe.lower(), hi = safe.upper();
  for (int i = 0; i < env.n; ++i) {
    const double r = unbounded_scale * (w[i] > 0.0 ? w[i] : 1.0);
    if (!std::isfinite(lo[i])) lo[i] = std::min(c[i] - r, region.lower()[i]);
    if (!std::isfinite(hi[i])) hi[i] = std::max(c[i] + r, region.upper()[i]);
  }
  VerificationTask task;
  task.region = region;
  task.unsafe = UnsafeSet(BoxSet(lo, hi));
  task.next = closed_loop(env, p);
  task.domain = BoxSet(lo, hi).inflated(inflation);
  task.dt = env.dt;
  task.disturbance = env.disturbance_bounds();
  return task;
}

std::vector<Polynomial> Frame::to_u(int n) const {
  std::vector<Polynomial> r;
  for (int i = 0; i < n; ++i) {
    r.push_back((Polynomial::Var(n, i) - Polynomial::Constant(n, anchor[i])) *
                (1.0 / scale[i]));
  }
  return r;
}

std::vector<Polynomial> Frame::from_u(int n) const {
  std::vector<Polynomial> r;
  for (int i = 0; i < n; ++i) {
    r.push_back(Polynomial::Var(n, i) * scale[i] +
                Polynomial::Constant(n, anchor[i]));
  }
  return r;
}

std::optional<Vector> find_equilibrium(const std::vector<Polynomial>& next,
                                       const BoxSet& domain,
                                       const Vector& start) {
  const int n = static_cast<int>(next.size());
  std::vector<Polynomial> F;
  for (int i = 0; i < n; ++i) F.push_back(next[i] - Polynomial::Var(n, i));
  std::vector<std::vector<Polynomial>> J(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) J[i].push_back(F[i].derivative(j));

  auto residual = [&](const Vector& s) {
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) r(i) = F[i].eval(s);
    return r;
  };
  Vector s = start;
  Eigen::VectorXd r = residual(s);
  for (int it = 0; it < 60 && r.lpNorm<Eigen::Infinity>() > 1e-15; ++it) {
    Eigen::MatrixXd jac(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) jac(i, j) = J[i][j].eval(s);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) return std::nullopt;
    const Eigen::VectorXd step = lu.solve(-r);
    double t = 1.0;
    bool moved = false;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      Vector trial = s;
      for (int i = 0; i < n; ++i) trial[i] += t * step(i);
      const Eigen::VectorXd rt = residual(trial);
      if (rt.lpNorm<Eigen::Infinity>() < r.lpNorm<Eigen::Infinity>()) {
        s = trial;
        r = rt;
        moved = true;
        break;
      }
    }
    if (!moved) break;
  }
  if (!(r.lpNorm<Eigen::Infinity>() <= 1e-14)) return std::nullopt;
  if (!domain.contains(s)) return std::nullopt;
  return s;
}

// -------------------------------------------------------------- SOS program

SosProgram build_vcs(const VerificationTask& task,
                     const InvariantSketch& sketch, int mult_degree,
                     const SosOptions& options) {
  const int n = sketch.n;
  if (mult_degree < 0 || mult_degree % 2 != 0) {
    throw ConfigError("multiplier degree must be even and >= 0");
  }
  if (!(options.epsilon > 0.0)) throw ConfigError("epsilon must be > 0");
  if (static_cast<int>(task.next.size()) != n || task.region.dim() != n ||
      task.domain.dim() != n) {
    throw DimensionError("verification task does not match sketch");
  }
  if (!task.domain.bounded()) throw ConfigError("domain must be bounded");
  if (!(task.dt > 0.0)) throw ConfigError("dt must be > 0");
  const int mult_ab = std::min(mult_degree, std::max(0, sketch.degree_bound - 2));

  SosProgram prog;
  prog.sketch = sketch;
  prog.mult_degree = mult_degree;
  // With an unsafe half-space, (a) and (b) force every form of E above degree
  // mult + 2 to vanish, so those coefficients are dropped.
  if (options.facial_reduction && !task.unsafe.half_spaces().empty() &&
      mult_ab + 2 < sketch.degree_bound) {
    InvariantSketch& cut = prog.sketch;
    cut.degree_bound = mult_ab + 2;
    std::erase_if(cut.basis, [&](const Monomial& m) {
      return m.degree() > cut.degree_bound;
    });
  }
  const int d = prog.sketch.degree_bound;

  // Frame: equilibrium if there is one in the domain, else domain center.
  Frame& frame = prog.frame;
  frame.scale = task.domain.half_width();
  for (double& s : frame.scale) {
    if (!(s > 0.0)) s = 1.0;
  }
  std::optional<Vector> eq = find_equilibrium(task.next, task.domain,
                                              task.region.center());
  if (!eq) eq = find_equilibrium(task.next, task.domain, task.domain.center());
  frame.at_equilibrium = eq.has_value() && task.domain.contains(*eq);
  frame.anchor = frame.at_equilibrium ? *eq : task.domain.center();

  const std::vector<Polynomial> from_u = frame.from_u(n);
  std::vector<Polynomial> next_u;
  int next_degree = 1;
  for (int i = 0; i < n; ++i) {
    Polynomial q = (task.next[i].compose(from_u) -
                    Polynomial::Constant(n, frame.anchor[i])) *
                   (1.0 / frame.scale[i]);
    next_degree = std::max(next_degree, q.degree());
    next_u.push_back(std::move(q));
  }
  auto to_u = [&](int i, double s) {
    return (s - frame.anchor[i]) / frame.scale[i];
  };

  SdpProblem& sdp = prog.sdp;
  prog.c_offset = sdp.add_free(prog.sketch.unknowns());
  prog.tau_block = sdp.add_block(1);
  sdp.objective.push_back({prog.tau_block, 0, 0, -1.0});

  auto add_constraint = [&](SosConstraintInfo info, int half,
                            std::vector<Polynomial> guards, int mult_half,
                            bool drop_constant) {
    info.gram_basis = GramBasis(n, half, drop_constant);
    if (!info.gram_basis.empty()) {
      info.gram_block = sdp.add_block(static_cast<int>(info.gram_basis.size()));
    }
    for (auto& g : guards) {
      std::vector<Monomial> b = GramBasis(n, mult_half, drop_constant);
      if (b.empty()) continue;
      info.multiplier_blocks.push_back(
          sdp.add_block(static_cast<int>(b.size())));
      info.multiplier_bases.push_back(std::move(b));
      info.multiplier_guards.push_back(std::move(g));
    }
    prog.constraints.push_back(std::move(info));
  };

  const std::vector<Polynomial> basis_polys = [&] {
    std::vector<Polynomial> r;
    for (const auto& m : prog.sketch.basis) r.push_back(MonomialPoly(n, m));
    return r;
  }();

  // (a) one constraint per unsafe half-space.
  for (const auto& hs : task.unsafe.half_spaces()) {
    SosConstraintInfo info;
    info.name = std::string("unsafe x") + std::to_string(hs.dim) +
                (hs.upper ? " >= " : " <= ") + fmt(hs.bound);
    info.target_const = Polynomial::Constant(n, -options.epsilon);
    info.target_c = basis_polys;
    info.target_tau = Polynomial::Constant(n, -1.0);
    const double b = to_u(hs.dim, hs.bound);
    const Polynomial u = Polynomial::Var(n, hs.dim);
    Polynomial g = hs.upper ? u - Polynomial::Constant(n, b)
                            : Polynomial::Constant(n, b) - u;
    add_constraint(std::move(info), (d + 1) / 2, {g}, mult_ab / 2, false);
  }

  // (b) initial region.
  {
    SosConstraintInfo info;
    info.name = "initial region";
    info.target_const = Polynomial(n);
    for (const auto& b : basis_polys) info.target_c.push_back(-b);
    info.target_tau = Polynomial::Constant(n, -1.0);
    std::vector<Polynomial> guards;
    for (int j = 0; j < n; ++j) {
      guards.push_back(BoxGuard(n, j, to_u(j, task.region.lower()[j]),
                                to_u(j, task.region.upper()[j])));
    }
    add_constraint(std::move(info), (d + 1) / 2, std::move(guards),
                   mult_ab / 2, false);
  }

  // (c) decrease on the domain.
  {
    SosConstraintInfo info;
    info.name = "decrease";
    info.target_const = Polynomial(n);
    // Divided by dt so the Gram entries are O(1) like the other conditions.
    const Composer compose(next_u, d);
    int degree = 2;
    for (size_t i = 0; i < prog.sketch.basis.size(); ++i) {
      Polynomial t = (basis_polys[i] - compose(prog.sketch.basis[i])) * (1.0 / task.dt);
      degree = std::max(degree, t.degree());
      info.target_c.push_back(std::move(t));
    }
    Polynomial norm2(n);
    for (int j = 0; j < n; ++j) {
      norm2 += Polynomial::Var(n, j) * Polynomial::Var(n, j);
    }
    info.target_tau = -norm2;
    std::vector<Polynomial> guards;
    for (int j = 0; j < n; ++j) {
      guards.push_back(BoxGuard(n, j, to_u(j, task.domain.lower()[j]),
                                to_u(j, task.domain.upper()[j])));
    }
    const int half = (degree + 1) / 2;
    const bool facial = frame.at_equilibrium && options.facial_reduction;
    add_constraint(std::move(info), half, std::move(guards), half - 1, facial);
  }

  // Coefficient matching rows.
  for (const SosConstraintInfo& info : prog.constraints) {
    std::map<Monomial, SdpRow> rows;
    auto gram_entries = [&](int block, const std::vector<Monomial>& basis,
                            const Polynomial* guard) {
      for (size_t p = 0; p < basis.size(); ++p) {
        for (size_t q = p; q < basis.size(); ++q) {
          const double w = p == q ? 1.0 : 2.0;
          const Monomial bb = basis[p] * basis[q];
          if (guard == nullptr) {
            rows[bb].entries.push_back(
                {block, static_cast<int>(p), static_cast<int>(q), w});
          } else {
            for (const auto& [t, gc] : guard->terms()) {
              rows[bb * t].entries.push_back(
                  {block, static_cast<int>(p), static_cast<int>(q), w * gc});
            }
          }
        }
      }
    };
    if (info.gram_block >= 0) {
      gram_entries(info.gram_block, info.gram_basis, nullptr);
    }
    for (size_t j = 0; j < info.multiplier_blocks.size(); ++j) {
      gram_entries(info.multiplier_blocks[j], info.multiplier_bases[j],
                   &info.multiplier_guards[j]);
    }
    for (size_t i = 0; i < info.target_c.size(); ++i) {
      for (const auto& [m, c] : info.target_c[i].terms()) {
        rows[m].free_entries.push_back({prog.c_offset + static_cast<int>(i),
                                        -c});
      }
    }
    for (const auto& [m, c] : info.target_tau.terms()) {
      rows[m].entries.push_back({prog.tau_block, 0, 0, -c});
    }
    for (const auto& [m, c] : info.target_const.terms()) rows[m].rhs = c;
    for (auto& [m, row] : rows) {
      if (row.entries.empty() && row.free_entries.empty()) {
        if (row.rhs == 0.0) continue;
        throw StructuralError("constraint '" + info.name + "': monomial '" +
                              m.to_string() +
                              "' is not reachable from the chosen bases");
      }
      sdp.rows.push_back(std::move(row));
    }
  }

  // E(region center) = -1.
  {
    SdpRow row;
    row.rhs = -1.0;
    Vector uc(n);
    const Vector rc = task.region.center();
    for (int j = 0; j < n; ++j) uc[j] = to_u(j, rc[j]);
    for (size_t i = 0; i < prog.sketch.basis.size(); ++i) {
      const double v = prog.sketch.basis[i].eval(uc);
      if (v != 0.0) {
        row.free_entries.push_back({prog.c_offset + static_cast<int>(i), v});
      }
    }
    sdp.rows.push_back(std::move(row));
  }
  return prog;
}

Polynomial SosProgram::certificate(const SdpSolution& sol) const {
  const int n = sketch.n;
  Polynomial e_u(n);
  for (size_t i = 0; i < sketch.basis.size(); ++i) {
    e_u.add_term(sketch.basis[i], sol.free(c_offset + static_cast<int>(i)));
  }
  e_u.prune();
  return e_u.compose(frame.to_u(n));
}

double SosProgram::margin(const SdpSolution& sol) const {
  return sol.blocks[tau_block](0, 0);
}

std::vector<double> SosProgram::reconstruction_errors(
    const SdpSolution& sol) const {
  const int n = sketch.n;
  std::vector<double> out;
  auto gram_poly = [&](int block, const std::vector<Monomial>& basis) {
    const Eigen::MatrixXd& q = sol.blocks[block];
    std::vector<double> flat(basis.size() * basis.size());
    for (size_t i = 0; i < basis.size(); ++i)
      for (size_t j = 0; j < basis.size(); ++j)
        flat[i * basis.size() + j] = q(i, j);
    return gram_reconstruct(basis, flat, n);
  };
  for (const auto& info : constraints) {
    Polynomial target = info.target_const + info.target_tau * margin(sol);
    for (size_t i = 0; i < info.target_c.size(); ++i) {
      target += info.target_c[i] * sol.free(c_offset + static_cast<int>(i));
    }
    Polynomial sos(n);
    if (info.gram_block >= 0) sos = gram_poly(info.gram_block, info.gram_basis);
    for (size_t j = 0; j < info.multiplier_blocks.size(); ++j) {
      sos += gram_poly(info.multiplier_blocks[j], info.multiplier_bases[j]) *
             info.multiplier_guards[j];
    }
    out.push_back((target - sos).max_abs_coeff());
  }
  return out;
}

// -------------------------------------------------------------- falsifier

Vector halton(long index, int dim) {
  if (dim > static_cast<int>(std::size(kPrimes))) {
    throw ConfigError("halton: too many dimensions");
  }
  Vector x(dim);
  for (int k = 0; k < dim; ++k) {
    const int base = kPrimes[k];
    double f = 1.0, r = 0.0;
    for (long i = index; i > 0; i /= base) {
      f /= base;
      r += f * static_cast<double>(i % base);
    }
    x[k] = r;
  }
  return x;
}

const char* to_string(Condition c) {
  switch (c) {
    case Condition::kUnsafe: return "unsafe";
    case Condition::kInitial: return "initial";
    case Condition::kDecrease: return "decrease";
  }
  return "unknown";
}

std::string Counterexample::describe() const {
  std::string s = std::string(to_string(condition)) + " condition violated at (";
  for (size_t i = 0; i < state.size(); ++i) {
    if (i) s += ", ";
    s += fmt(state[i]);
  }
  return s + ") value " + fmt(value);
}

namespace {

// Maximizes `score` over the box by coordinate search; `feasible` filters
// candidate points.
template <typename Score, typename Feasible>
Vector Refine(Vector x, const BoxSet& box, int steps, Score score,
              Feasible feasible) {
  const int n = box.dim();
  Vector step(n);
  for (int i = 0; i < n; ++i) {
    step[i] = 0.05 * (box.upper()[i] - box.lower()[i]);
  }
  double best = score(x);
  for (int it = 0; it < steps; ++it) {
    bool improved = false;
    for (int i = 0; i < n; ++i) {
      for (double sign : {1.0, -1.0}) {
        Vector y = x;
        y[i] = std::clamp(y[i] + sign * step[i], box.lower()[i],
                          box.upper()[i]);
        if (y[i] == x[i] || !feasible(y)) continue;
        const double v = score(y);
        if (v > best) {
          best = v;
          x = std::move(y);
          improved = true;
          break;
        }
      }
    }
    if (!improved) {
      for (double& s : step) s *= 0.5;
    }
  }
  return x;
}

Vector Lerp(const BoxSet& box, const Vector& t) {
  Vector x(t.size());
  for (size_t i = 0; i < t.size(); ++i) {
    x[i] = box.lower()[i] + t[i] * (box.upper()[i] - box.lower()[i]);
  }
  return x;
}

std::vector<Vector> Corners(const BoxSet& box) {
  const int n = box.dim();
  std::vector<Vector> out;
  for (int mask = 0; mask < (1 << n); ++mask) {
    Vector x(n);
    for (int i = 0; i < n; ++i) {
      x[i] = (mask >> i) & 1 ? box.upper()[i] : box.lower()[i];
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

std::optional<Counterexample> falsify(const Polynomial& E,
                                      const VerificationTask& task,
                                      const FalsifyOptions& options) {
  if (options.samples < 1) throw ConfigError("falsify needs samples >= 1");
  if (options.offset < 0) throw ConfigError("falsify offset must be >= 0");
  const int n = task.domain.dim();
  const BoxSet& dom = task.domain;
  auto e = [&](const Vector& s) { return E.eval(s); };

  // Unsafe: E > 0 on the closure of every unsafe half-space within the domain.
  for (const auto& hs : task.unsafe.half_spaces()) {
    Vector lo = dom.lower(), hi = dom.upper();
    if (hs.upper) {
      lo[hs.dim] = hs.bound;
      hi[hs.dim] = std::max(hi[hs.dim], hs.bound);
    } else {
      hi[hs.dim] = hs.bound;
      lo[hs.dim] = std::min(lo[hs.dim], hs.bound);
    }
    const BoxSet slab(lo, hi);
    Vector worst;
    double worst_v = std::numeric_limits<double>::infinity();
    for (long k = 1; k <= options.samples; ++k) {
      Vector x = Lerp(slab, halton(options.offset + k, n));
      if (k % 2 == 1) x[hs.dim] = hs.bound;
      const double v = e(x);
      if (v <= 0.0) return Counterexample{Condition::kUnsafe, x, v};
      if (v < worst_v) worst_v = v, worst = x;
    }
    const Vector x = Refine(
        worst, slab, options.refine_steps,
        [&](const Vector& s) { return -e(s); },
        [](const Vector&) { return true; });
    if (e(x) <= 0.0) return Counterexample{Condition::kUnsafe, x, e(x)};
  }

  // Initial: E <= 0 on the initial region.
  {
    const BoxSet& r = task.region;
    Vector worst = r.center();
    double worst_v = e(worst);
    auto check = [&](const Vector& x) -> std::optional<Counterexample> {
      const double v = e(x);
      if (v > options.tolerance) return Counterexample{Condition::kInitial, x, v};
      if (v > worst_v) worst_v = v, worst = x;
      return std::nullopt;
    };
    for (const Vector& c : Corners(r)) {
      if (auto cex = check(c)) return cex;
    }
    for (long k = 1; k <= options.samples; ++k) {
      if (auto cex = check(Lerp(r, halton(options.offset + k, n)))) return cex;
    }
    const Vector x = Refine(
        worst, r, options.refine_steps, e, [](const Vector&) { return true; });
    if (e(x) > options.tolerance) return Counterexample{Condition::kInitial, x, e(x)};
  }

  // Decrease: E(next(s)) - E(s) <= 0 on {E <= 0} within the domain. With a
  // disturbance, additionally E(next(s) + dt d) <= 0 there for every corner d
  // of the disturbance box.
  {
    bool disturbed = false;
    for (double b : task.disturbance) disturbed |= b > 0.0;
    const std::vector<Vector> corners =
        disturbed ? disturbance_corners(task.disturbance) : std::vector<Vector>{};
    auto increase = [&](const Vector& s) {
      Vector nx(n);
      for (int i = 0; i < n; ++i) nx[i] = task.next[i].eval(s);
      double worst = e(nx) - e(s);
      for (const Vector& d : corners) {
        Vector y = nx;
        for (int i = 0; i < n; ++i) y[i] += task.dt * d[i];
        worst = std::max(worst, e(y));
      }
      return worst;
    };
    auto inside = [&](const Vector& s) { return e(s) <= 0.0; };

    Vector worst;
    double worst_v = -std::numeric_limits<double>::infinity();
    Vector sub_lo(n, std::numeric_limits<double>::infinity());
    Vector sub_hi(n, -std::numeric_limits<double>::infinity());
    auto scan = [&](const BoxSet& box) -> std::optional<Counterexample> {
      for (long k = 1; k <= options.samples; ++k) {
        const Vector x = Lerp(box, halton(options.offset + k, n));
        if (!inside(x)) continue;
        for (int i = 0; i < n; ++i) {
          sub_lo[i] = std::min(sub_lo[i], x[i]);
          sub_hi[i] = std::max(sub_hi[i], x[i]);
        }
        const double v = increase(x);
        if (v > options.tolerance) return Counterexample{Condition::kDecrease, x, v};
        if (v > worst_v) worst_v = v, worst = x;
      }
      return std::nullopt;
    };
    if (auto cex = scan(dom)) return cex;
    if (!worst.empty()) {
      // Second pass concentrated on the sampled hull of {E <= 0}.
      Vector lo(n), hi(n);
      for (int i = 0; i < n; ++i) {
        const double pad = 0.05 * (sub_hi[i] - sub_lo[i]);
        lo[i] = std::max(dom.lower()[i], sub_lo[i] - pad);
        hi[i] = std::min(dom.upper()[i], sub_hi[i] + pad);
      }
      if (auto cex = scan(BoxSet(lo, hi))) return cex;
      // Third pass on the boundary of {E <= 0}: rays from the region center
      // to their first crossing, bisected to the inside point.
      const Vector origin = task.region.center();
      if (inside(origin)) {
        const long rays = std::max(1, options.samples / 10);
        constexpr int kMarch = 64;
        constexpr int kBisect = 40;
        for (long k = 1; k <= rays; ++k) {
          const Vector t = halton(options.offset + k, n);
          Vector dir(n);
          double norm = 0.0;
          for (int i = 0; i < n; ++i) {
            dir[i] = 2.0 * t[i] - 1.0;
            norm += dir[i] * dir[i];
          }
          if (norm < 1e-12) continue;
          double reach = std::numeric_limits<double>::infinity();
          for (int i = 0; i < n; ++i) {
            const double w = 0.5 * (dom.upper()[i] - dom.lower()[i]);
            dir[i] *= w / std::sqrt(norm);
            if (dir[i] > 0.0) {
              reach = std::min(reach, (dom.upper()[i] - origin[i]) / dir[i]);
            } else if (dir[i] < 0.0) {
              reach = std::min(reach, (dom.lower()[i] - origin[i]) / dir[i]);
            }
          }
          auto at = [&](double a) {
            Vector x(n);
            for (int i = 0; i < n; ++i) x[i] = origin[i] + a * dir[i];
            return x;
          };
          double in = 0.0, out = -1.0;
          for (int j = 1; j <= kMarch; ++j) {
            const double a = reach * j / kMarch;
            if (!inside(at(a))) {
              out = a;
              break;
            }
            in = a;
          }
          if (out < 0.0) continue;
          for (int j = 0; j < kBisect; ++j) {
            const double mid = 0.5 * (in + out);
            (inside(at(mid)) ? in : out) = mid;
          }
          const Vector x = at(in);
          const double v = increase(x);
          if (v > options.tolerance) return Counterexample{Condition::kDecrease, x, v};
          if (v > worst_v) worst_v = v, worst = x;
        }
      }
      const Vector x =
          Refine(worst, dom, options.refine_steps, increase, inside);
      if (increase(x) > options.tolerance) {
        return Counterexample{Condition::kDecrease, x, increase(x)};
      }
    }
  }
  return std::nullopt;
}

// ----------------------------------------------------------- synthesis

CertificateResult synthesize_certificate(const VerificationTask& task,
                                         int degree_bound,
                                         const CertificateConfig& cfg) {
  if (degree_bound < 2 || degree_bound % 2 != 0) {
    throw ConfigError("invariant degree must be even and >= 2, got " +
                      std::to_string(degree_bound));
  }
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  const int n = task.domain.dim();
  const InvariantSketch sketch = InvariantSketch::Full(n, degree_bound);
  CertificateResult result;
  int previous = -1;
  for (int mult = 0; mult <= degree_bound; mult += 2) {
    const int effective = std::min(mult, degree_bound - 2);
    if (effective == previous) continue;
    previous = effective;
    const auto t0 = Clock::now();
    CertificateAttempt attempt;
    attempt.mult_degree = effective;
    const SosProgram prog = build_vcs(task, sketch, effective, cfg.sos);
    const SdpSolution sol = sdp_solve(prog.sdp, cfg.sos.sdp);
    attempt.status = sol.status;
    attempt.iterations = sol.iterations;
    if (sol.status == SdpStatus::kFeasible) {
      attempt.margin = prog.margin(sol);
      const Polynomial E = prog.certificate(sol).rounded(cfg.round_digits);
      const auto cex = falsify(E, task, cfg.falsify);
      if (!cex) {
        BarrierCertificate cert;
        cert.E = E;
        cert.degree = degree_bound;
        cert.epsilon = cfg.sos.epsilon;
        cert.region = task.region;
        cert.margin = attempt.margin;
        cert.mult_degree = effective;
        cert.equality_residual = sol.equality_residual;
        cert.min_eigenvalue = sol.min_eigenvalue;
        cert.falsifier_samples = cfg.falsify.samples;
        result.certificate = std::move(cert);
        attempt.note = "accepted";
      } else {
        attempt.note = "falsified: " + cex->describe();
      }
    } else {
      attempt.note = sol.message;
    }
    attempt.seconds =
        std::chrono::duration<double>(Clock::now() - t0).count();
    result.attempts.push_back(attempt);
    if (result.certificate) break;
  }
  if (!result.certificate) {
    result.reason = "no certificate of degree " +
                    std::to_string(degree_bound) + ": " +
                    (result.attempts.empty() ? std::string("no attempts")
                                             : result.attempts.back().note);
  }
  result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

CertificateResult synthesize_certificate(const BoxSet& region,
                                         const EnvironmentSpec& env,
                                         const LinearProgramPolicy& p,
                                         int degree_bound,
                                         const CertificateConfig& cfg) {
  return synthesize_certificate(
      make_task(env, p, region, cfg.domain_inflation, cfg.unbounded_scale),
      degree_bound, cfg);
}

}  // namespace shieldsyn
