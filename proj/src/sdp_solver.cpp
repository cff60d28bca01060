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

#include "sdp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <tuple>

#include "error.hpp"

namespace shieldsyn {

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::kFeasible:
      return "feasible";
    case SdpStatus::kInfeasible:
      return "infeasible";
    case SdpStatus::kUndecided:
      return "undecided";
  }
  return "?";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Symmetric coefficient A(r, c) = value, listed for both triangles.
struct FullEntry {
  int r;
  int c;
  double a;
};

struct BlockRow {
  int row;
  std::vector<FullEntry> entries;
};

// Row-normalized copy of the problem with per-block sparse row storage.
struct Scaled {
  int m = 0;
  int nf = 0;
  std::vector<int> sizes;
  std::vector<std::vector<BlockRow>> block_rows;  // [block] -> rows touching it
  MatrixXd free_matrix;                           // B, m x nf
  VectorXd b;
  VectorXd row_scale;
  std::vector<MatrixXd> c;  // objective blocks
  VectorXd cf;
  std::vector<int> kept_rows;  // original row index per scaled row
};

// Merges duplicate (block, r, c) coefficients and normalizes the upper
// triangle orientation.
std::map<std::tuple<int, int, int>, double> merge_entries(
    const std::vector<SdpEntry>& entries, const std::vector<int>& sizes) {
  std::map<std::tuple<int, int, int>, double> merged;
  for (const auto& e : entries) {
    if (e.block < 0 || e.block >= static_cast<int>(sizes.size())) {
      throw DimensionError("sdp: entry block out of range");
    }
    const int n = sizes[e.block];
    if (e.row < 0 || e.col < 0 || e.row >= n || e.col >= n) {
      throw DimensionError("sdp: entry index out of range");
    }
    const int r = std::min(e.row, e.col);
    const int c = std::max(e.row, e.col);
    merged[{e.block, r, c}] += e.value;
  }
  return merged;
}

Scaled scale_problem(const SdpProblem& p) {
  Scaled s;
  s.sizes = p.block_sizes;
  s.nf = p.num_free;
  const int nb = static_cast<int>(p.block_sizes.size());
  s.block_rows.resize(nb);

  std::vector<std::map<std::tuple<int, int, int>, double>> merged_rows;
  std::vector<std::map<int, double>> merged_free;
  std::vector<double> norms;
  for (size_t i = 0; i < p.rows.size(); ++i) {
    const SdpRow& row = p.rows[i];
    auto merged = merge_entries(row.entries, p.block_sizes);
    std::map<int, double> fr;
    for (const auto& fe : row.free_entries) {
      if (fe.index < 0 || fe.index >= p.num_free) {
        throw DimensionError("sdp: free index out of range");
      }
      fr[fe.index] += fe.value;
    }
    double norm2 = 0.0;
    for (const auto& [key, v] : merged) {
      norm2 += std::get<1>(key) == std::get<2>(key) ? v * v : 0.5 * v * v;
    }
    for (const auto& [k, v] : fr) norm2 += v * v;
    if (norm2 == 0.0) {
      if (row.rhs != 0.0) {
        throw StructuralError("sdp: row " + std::to_string(i) +
                              " has no variables but nonzero right-hand side");
      }
      continue;
    }
    merged_rows.push_back(std::move(merged));
    merged_free.push_back(std::move(fr));
    norms.push_back(std::sqrt(norm2));
    s.kept_rows.push_back(static_cast<int>(i));
  }

  s.m = static_cast<int>(s.kept_rows.size());
  s.b.resize(s.m);
  s.row_scale.resize(s.m);
  s.free_matrix = MatrixXd::Zero(s.m, s.nf);
  for (int i = 0; i < s.m; ++i) {
    const double scale = 1.0 / norms[i];
    s.row_scale[i] = scale;
    s.b[i] = p.rows[s.kept_rows[i]].rhs * scale;
    std::map<int, BlockRow> per_block;
    for (const auto& [key, v] : merged_rows[i]) {
      const auto [blk, r, c] = key;
      auto& br = per_block[blk];
      br.row = i;
      if (r == c) {
        br.entries.push_back({r, c, v * scale});
      } else {
        br.entries.push_back({r, c, 0.5 * v * scale});
        br.entries.push_back({c, r, 0.5 * v * scale});
      }
    }
    for (auto& [blk, br] : per_block) s.block_rows[blk].push_back(std::move(br));
    for (const auto& [k, v] : merged_free[i]) s.free_matrix(i, k) = v * scale;
  }

  s.c.resize(nb);
  for (int k = 0; k < nb; ++k) s.c[k] = MatrixXd::Zero(s.sizes[k], s.sizes[k]);
  for (const auto& [key, v] : merge_entries(p.objective, p.block_sizes)) {
    const auto [blk, r, c] = key;
    if (r == c) {
      s.c[blk](r, c) += v;
    } else {
      s.c[blk](r, c) += 0.5 * v;
      s.c[blk](c, r) += 0.5 * v;
    }
  }
  s.cf = VectorXd::Zero(s.nf);
  for (const auto& fe : p.free_objective) {
    if (fe.index < 0 || fe.index >= s.nf) {
      throw DimensionError("sdp: objective free index out of range");
    }
    s.cf[fe.index] += fe.value;
  }
  return s;
}

// A(X) for a list of (possibly non-symmetric) block matrices.
VectorXd apply_a(const Scaled& s, const std::vector<MatrixXd>& g) {
  VectorXd out = VectorXd::Zero(s.m);
  for (size_t k = 0; k < s.block_rows.size(); ++k) {
    for (const auto& br : s.block_rows[k]) {
      double acc = 0.0;
      for (const auto& e : br.entries) acc += e.a * g[k](e.r, e.c);
      out[br.row] += acc;
    }
  }
  return out;
}

// A^T(y), one symmetric matrix per block.
std::vector<MatrixXd> apply_at(const Scaled& s, const VectorXd& y) {
  std::vector<MatrixXd> out(s.sizes.size());
  for (size_t k = 0; k < s.sizes.size(); ++k) {
    out[k] = MatrixXd::Zero(s.sizes[k], s.sizes[k]);
    for (const auto& br : s.block_rows[k]) {
      const double yi = y[br.row];
      if (yi == 0.0) continue;
      for (const auto& e : br.entries) out[k](e.r, e.c) += yi * e.a;
    }
  }
  return out;
}

double inner(const std::vector<MatrixXd>& a, const std::vector<MatrixXd>& b) {
  double acc = 0.0;
  for (size_t k = 0; k < a.size(); ++k) acc += (a[k].array() * b[k].array()).sum();
  return acc;
}

// Largest alpha in (0, inf] keeping X + alpha * dX PSD, given chol(X) = L.
double max_step(const Eigen::LLT<MatrixXd>& chol_x, const MatrixXd& dx) {
  const int n = static_cast<int>(dx.rows());
  if (n == 1) {
    const double x = chol_x.matrixL()(0, 0) * chol_x.matrixL()(0, 0);
    return dx(0, 0) < 0.0 ? -x / dx(0, 0)
                          : std::numeric_limits<double>::infinity();
  }
  MatrixXd t = chol_x.matrixL().solve(dx);
  t = chol_x.matrixL().solve(t.transpose()).transpose();
  t = 0.5 * (t + t.transpose());
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(t, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff();
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

double min_eigenvalue(const MatrixXd& m) {
  if (m.rows() == 0) return std::numeric_limits<double>::infinity();
  if (m.rows() == 1) return m(0, 0);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()),
                                             Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Schur complement M_ij = tr(A_i X A_j Z^{-1}) accumulated block by block.
MatrixXd schur_complement(const Scaled& s, const std::vector<MatrixXd>& x,
                          const std::vector<MatrixXd>& zinv) {
  MatrixXd m = MatrixXd::Zero(s.m, s.m);
  for (size_t k = 0; k < s.block_rows.size(); ++k) {
    const auto& rows = s.block_rows[k];
    const MatrixXd& xk = x[k];
    const MatrixXd& zk = zinv[k];
    for (size_t ii = 0; ii < rows.size(); ++ii) {
      const auto& ai = rows[ii].entries;
      for (size_t jj = ii; jj < rows.size(); ++jj) {
        const auto& aj = rows[jj].entries;
        double acc = 0.0;
        for (const auto& ei : ai) {
          for (const auto& ej : aj) {
            acc += ei.a * ej.a * xk(ei.c, ej.r) * zk(ej.c, ei.r);
          }
        }
        m(rows[ii].row, rows[jj].row) += acc;
        if (jj != ii) m(rows[jj].row, rows[ii].row) += acc;
      }
    }
  }
  return m;
}

class NewtonSystem {
 public:
  // K = [M B; B^T 0], factored after symmetric diagonal equilibration.
  NewtonSystem(const MatrixXd& m, const MatrixXd& b) {
    const int mm = static_cast<int>(m.rows());
    const int nf = static_cast<int>(b.cols());
    k_.resize(mm + nf, mm + nf);
    k_.setZero();
    k_.topLeftCorner(mm, mm) = m;
    k_.topRightCorner(mm, nf) = b;
    k_.bottomLeftCorner(nf, mm) = b.transpose();
    d_.resize(mm + nf);
    for (int i = 0; i < mm; ++i) {
      d_(i) = m(i, i) > 0.0 ? 1.0 / std::sqrt(m(i, i)) : 1.0;
    }
    for (int j = 0; j < nf; ++j) {
      const double nrm = (d_.head(mm).asDiagonal() * b.col(j)).norm();
      d_(mm + j) = nrm > 0.0 ? 1.0 / nrm : 1.0;
    }
    MatrixXd kreg = d_.asDiagonal() * k_ * d_.asDiagonal();
    for (int i = 0; i < mm; ++i) kreg(i, i) += 1e-14;
    for (int i = mm; i < mm + nf; ++i) kreg(i, i) -= 1e-14;
    lu_.compute(kreg);
    mm_ = mm;
  }

  // Solves K [dy; dw] = rhs with iterative refinement against the exact K.
  void solve(const VectorXd& rhs_y, const VectorXd& rhs_f, VectorXd* dy,
             VectorXd* dw) const {
    VectorXd rhs(k_.rows());
    rhs << rhs_y, rhs_f;
    auto apply_inv = [&](const VectorXd& r) -> VectorXd {
      return d_.asDiagonal() * lu_.solve(d_.asDiagonal() * r);
    };
    VectorXd sol = apply_inv(rhs);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 6; ++it) {
      const VectorXd r = rhs - k_ * sol;
      const double rn = r.cwiseAbs().maxCoeff();
      if (!(rn < prev) || rn == 0.0) break;
      prev = rn;
      sol += apply_inv(r);
    }
    *dy = sol.head(mm_);
    *dw = sol.tail(k_.rows() - mm_);
  }

 private:
  MatrixXd k_;
  VectorXd d_;
  int mm_ = 0;
  Eigen::PartialPivLU<MatrixXd> lu_;
};

}  // namespace

double sdp_equality_residual(const SdpProblem& problem,
                             const std::vector<MatrixXd>& blocks,
                             const VectorXd& free) {
  double worst = 0.0;
  for (const auto& row : problem.rows) {
    double acc = -row.rhs;
    for (const auto& e : row.entries) acc += e.value * blocks[e.block](e.row, e.col);
    for (const auto& fe : row.free_entries) acc += fe.value * free[fe.index];
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

SdpSolution sdp_solve(const SdpProblem& problem, const SdpOptions& opt) {
  for (int size : problem.block_sizes) {
    if (size < 1) throw DimensionError("sdp: block size must be positive");
  }
  const Scaled s = scale_problem(problem);
  const int nb = static_cast<int>(s.sizes.size());
  int total_dim = 0;
  for (int n : s.sizes) total_dim += n;
  const bool feasibility_only = !problem.has_objective();

  SdpSolution sol;
  if (total_dim == 0 && s.nf == 0) {
    sol.status = s.m == 0 ? SdpStatus::kFeasible : SdpStatus::kInfeasible;
    sol.free = VectorXd();
    sol.message = "empty problem";
    return sol;
  }

  const double bmax = s.b.size() ? s.b.cwiseAbs().maxCoeff() : 0.0;
  double cmax = s.cf.size() ? s.cf.cwiseAbs().maxCoeff() : 0.0;
  for (const auto& ck : s.c) cmax = std::max(cmax, ck.cwiseAbs().maxCoeff());
  const double xi = std::max(1.0, 10.0 * bmax);
  const double eta = std::max(1.0, 10.0 * cmax);

  std::vector<MatrixXd> x(nb), z(nb);
  for (int k = 0; k < nb; ++k) {
    x[k] = xi * MatrixXd::Identity(s.sizes[k], s.sizes[k]);
    z[k] = eta * MatrixXd::Identity(s.sizes[k], s.sizes[k]);
  }
  VectorXd w = VectorXd::Zero(s.nf);
  VectorXd y = VectorXd::Zero(s.m);

  auto finish_with = [&](SdpStatus status, int iters, const std::string& msg) {
    sol.status = status;
    sol.iterations = iters;
    sol.message = msg;
    sol.blocks = x;
    for (auto& blk : sol.blocks) blk = 0.5 * (blk + blk.transpose());
    sol.free = w;
    sol.dual = VectorXd::Zero(static_cast<int>(problem.rows.size()));
    for (int i = 0; i < s.m; ++i) sol.dual[s.kept_rows[i]] = y[i] * s.row_scale[i];
    sol.equality_residual = sdp_equality_residual(problem, sol.blocks, sol.free);
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto& blk : sol.blocks) lmin = std::min(lmin, min_eigenvalue(blk));
    sol.min_eigenvalue = nb ? lmin : 0.0;
    sol.primal_objective = inner(s.c, x) + s.cf.dot(w);
    if (opt.verbose) {
      std::fprintf(stderr, "sdp: %s after %d iterations (%s), res %.3e\n",
                   to_string(status), iters, msg.c_str(), sol.equality_residual);
    }
    return sol;
  };

  // Best primal-feasible iterate seen so far, returned if the method stalls.
  struct Snapshot {
    std::vector<MatrixXd> x;
    VectorXd w, y;
    double pobj = std::numeric_limits<double>::infinity();
    double pinf = std::numeric_limits<double>::infinity();
    bool strict = false;
    int iter = 0;
  };
  std::optional<Snapshot> best;

  auto finish = [&](SdpStatus status, int iters, const std::string& msg) {
    if (status == SdpStatus::kUndecided && best) {
      x = best->x;
      w = best->w;
      y = best->y;
      status = SdpStatus::kFeasible;
      sol.optimal = false;
      return finish_with(status, iters, "primal feasible, " + msg);
    }
    sol.optimal = status == SdpStatus::kFeasible;
    return finish_with(status, iters, msg);
  };

  int stall = 0;
  double lowest_pinf = std::numeric_limits<double>::infinity();
  int lowest_pinf_iter = 0;
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    // Residuals.
    VectorXd rp = s.b - apply_a(s, x) - s.free_matrix * w;
    std::vector<MatrixXd> aty = apply_at(s, y);
    std::vector<MatrixXd> rd(nb);
    double dinf = 0.0;
    for (int k = 0; k < nb; ++k) {
      rd[k] = s.c[k] - aty[k] - z[k];
      dinf = std::max(dinf, rd[k].cwiseAbs().maxCoeff());
    }
    VectorXd rf = s.cf - s.free_matrix.transpose() * y;
    if (s.nf) dinf = std::max(dinf, rf.cwiseAbs().maxCoeff());
    const double pinf = s.m ? rp.cwiseAbs().maxCoeff() : 0.0;
    const double mu = total_dim ? inner(x, z) / total_dim : 0.0;
    const double pobj = inner(s.c, x) + s.cf.dot(w);
    const double dobj = s.b.dot(y);
    const double rel_gap =
        std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    sol.gap = rel_gap;
    sol.dual_residual = dinf;
    if (opt.verbose) {
      std::fprintf(stderr,
                   "sdp it %3d pinf %.2e dinf %.2e mu %.2e pobj %.6e dobj %.6e\n",
                   iter, pinf, dinf, mu, pobj, dobj);
    }

    if (pinf <= opt.feasibility_tol) {
      if (!best || !best->strict || pobj < best->pobj) {
        best = Snapshot{x, w, y, pobj, pinf, true, iter};
      }
    } else if (pinf < 1e-6 && (!best || (!best->strict && pinf < best->pinf)) &&
               sdp_equality_residual(problem, x, w) <= opt.acceptable_residual) {
      best = Snapshot{x, w, y, pobj, pinf, false, iter};
    }
    if (pinf < 0.5 * lowest_pinf) {
      lowest_pinf = pinf;
      lowest_pinf_iter = iter;
    }
    if (iter - lowest_pinf_iter >= 2 * opt.stall_iterations) {
      return finish(SdpStatus::kUndecided, iter, "primal residual stalled");
    }
    if (best && (mu <= 1e-12 * (1.0 + std::abs(pobj)) ||
                 iter - best->iter >= opt.stall_iterations)) {
      return finish(SdpStatus::kUndecided, iter, "no further progress");
    }

    if (feasibility_only) {
      if (pinf <= opt.feasibility_tol) {
        return finish(SdpStatus::kFeasible, iter, "primal feasible");
      }
    } else if (pinf <= opt.feasibility_tol && dinf <= opt.dual_tol * (1.0 + cmax) &&
               rel_gap <= opt.gap_tol) {
      return finish(SdpStatus::kFeasible, iter, "optimal");
    }

    // Farkas certificate: b^T y_bar = 1, -A^T y_bar PSD, B^T y_bar = 0.
    if (dobj > 0.0 && s.m > 0) {
      const VectorXd ybar = y / dobj;
      bool certified = true;
      if (s.nf && (s.free_matrix.transpose() * ybar).cwiseAbs().maxCoeff() >
                      opt.infeasibility_tol) {
        certified = false;
      }
      if (certified) {
        std::vector<MatrixXd> at_bar = apply_at(s, ybar);
        for (int k = 0; k < nb && certified; ++k) {
          if (min_eigenvalue(-at_bar[k]) < -opt.infeasibility_tol) certified = false;
        }
      }
      if (certified) {
        return finish(SdpStatus::kInfeasible, iter, "Farkas certificate found");
      }
    }

    // Cholesky factors.
    std::vector<Eigen::LLT<MatrixXd>> chol_x(nb), chol_z(nb);
    std::vector<MatrixXd> zinv(nb);
    bool broken = false;
    for (int k = 0; k < nb; ++k) {
      chol_x[k].compute(x[k]);
      chol_z[k].compute(z[k]);
      if (chol_x[k].info() != Eigen::Success || chol_z[k].info() != Eigen::Success) {
        broken = true;
        break;
      }
      zinv[k] = chol_z[k].solve(MatrixXd::Identity(s.sizes[k], s.sizes[k]));
      zinv[k] = 0.5 * (zinv[k] + zinv[k].transpose());
    }
    if (broken) return finish(SdpStatus::kUndecided, iter, "lost positive definiteness");

    const MatrixXd m = schur_complement(s, x, zinv);
    if (!m.allFinite()) return finish(SdpStatus::kUndecided, iter, "non-finite Schur complement");
    const NewtonSystem newton(m, s.free_matrix);

    // Shared part: X Rd Z^{-1}.
    std::vector<MatrixXd> x_rd_zinv(nb);
    for (int k = 0; k < nb; ++k) x_rd_zinv[k] = x[k] * rd[k] * zinv[k];

    auto direction = [&](double sigma_mu, const std::vector<MatrixXd>* corr_x,
                         const std::vector<MatrixXd>* corr_z,
                         std::vector<MatrixXd>& dx, std::vector<MatrixXd>& dz,
                         VectorXd& dy, VectorXd& dw) {
      std::vector<MatrixXd> g(nb);
      for (int k = 0; k < nb; ++k) {
        g[k] = sigma_mu * zinv[k] - x[k] - x_rd_zinv[k];
        if (corr_x) g[k] -= (*corr_x)[k] * (*corr_z)[k] * zinv[k];
      }
      const VectorXd h = rp - apply_a(s, g);
      newton.solve(h, rf, &dy, &dw);
      std::vector<MatrixXd> at_dy = apply_at(s, dy);
      dx.resize(nb);
      dz.resize(nb);
      for (int k = 0; k < nb; ++k) {
        dz[k] = rd[k] - at_dy[k];
        MatrixXd t = sigma_mu * zinv[k] - x[k] - x[k] * dz[k] * zinv[k];
        if (corr_x) t -= (*corr_x)[k] * (*corr_z)[k] * zinv[k];
        dx[k] = 0.5 * (t + t.transpose());
      }
    };

    auto step_lengths = [&](const std::vector<MatrixXd>& dx,
                            const std::vector<MatrixXd>& dz, double* ap,
                            double* ad) {
      double amax_p = std::numeric_limits<double>::infinity();
      double amax_d = std::numeric_limits<double>::infinity();
      for (int k = 0; k < nb; ++k) {
        amax_p = std::min(amax_p, max_step(chol_x[k], dx[k]));
        amax_d = std::min(amax_d, max_step(chol_z[k], dz[k]));
      }
      *ap = std::min(1.0, opt.step_fraction * amax_p);
      *ad = std::min(1.0, opt.step_fraction * amax_d);
    };

    // Predictor.
    std::vector<MatrixXd> dxa, dza;
    VectorXd dya, dwa;
    direction(0.0, nullptr, nullptr, dxa, dza, dya, dwa);
    double ap = 0.0, ad = 0.0;
    step_lengths(dxa, dza, &ap, &ad);
    double mu_aff = 0.0;
    if (total_dim) {
      for (int k = 0; k < nb; ++k) {
        mu_aff += ((x[k] + ap * dxa[k]).array() * (z[k] + ad * dza[k]).array()).sum();
      }
      mu_aff /= total_dim;
    }
    double sigma = mu > 0.0 ? std::pow(std::max(0.0, mu_aff) / mu, 3) : 0.0;
    sigma = std::clamp(sigma, 0.0, 1.0);

    // Corrector.
    std::vector<MatrixXd> dx, dz;
    VectorXd dy, dw;
    direction(sigma * mu, &dxa, &dza, dx, dz, dy, dw);
    step_lengths(dx, dz, &ap, &ad);
    if (!std::isfinite(ap) || !std::isfinite(ad) || !dy.allFinite() || !dw.allFinite()) {
      return finish(SdpStatus::kUndecided, iter, "non-finite step");
    }

    for (int k = 0; k < nb; ++k) {
      x[k] += ap * dx[k];
      z[k] += ad * dz[k];
      x[k] = 0.5 * (x[k] + x[k].transpose());
      z[k] = 0.5 * (z[k] + z[k].transpose());
    }
    w += ap * dw;
    y += ad * dy;

    if (ap < 1e-9 && ad < 1e-9) {
      if (++stall >= 5) return finish(SdpStatus::kUndecided, iter, "step length stall");
    } else {
      stall = 0;
    }
  }
  return finish(SdpStatus::kUndecided, opt.max_iterations, "iteration cap reached");
}

}  // namespace shieldsyn
