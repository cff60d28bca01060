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

#ifndef SHIELDSYN_SDP_SOLVER_HPP_
#define SHIELDSYN_SDP_SOLVER_HPP_

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shieldsyn {

// Block-diagonal semidefinite program in primal standard form with free
// variables:
//
//   minimize    sum_k <C_k, X_k> + c_free^T w
//   subject to  sum_k <A_ik, X_k> + B_i^T w = b_i     for every row i
//               X_k PSD,  w free.
//
// A 1x1 block is a nonnegative scalar. Matrix coefficients are given per
// upper-triangle entry: an entry (row, col, v) with row != col contributes
// v * X(row, col) to the row (the symmetric partner is implied).
struct SdpEntry {
  int block = 0;
  int row = 0;
  int col = 0;
  double value = 0.0;
};

struct SdpFreeEntry {
  int index = 0;
  double value = 0.0;
};

struct SdpRow {
  std::vector<SdpEntry> entries;
  std::vector<SdpFreeEntry> free_entries;
  double rhs = 0.0;
};

struct SdpProblem {
  std::vector<int> block_sizes;
  int num_free = 0;
  std::vector<SdpRow> rows;
  // Objective (minimized). Empty means a pure feasibility problem.
  std::vector<SdpEntry> objective;
  std::vector<SdpFreeEntry> free_objective;

  int add_block(int size) {
    block_sizes.push_back(size);
    return static_cast<int>(block_sizes.size()) - 1;
  }
  int add_free(int count = 1) {
    const int first = num_free;
    num_free += count;
    return first;
  }
  bool has_objective() const {
    return !objective.empty() || !free_objective.empty();
  }
};

enum class SdpStatus {
  kFeasible,    // primal feasible point found (see SdpSolution::optimal)
  kInfeasible,  // a normalized Farkas certificate was found
  kUndecided,   // iteration cap or numerical stall
};

const char* to_string(SdpStatus s);

struct SdpOptions {
  int max_iterations = 150;
  // Scaled primal residual (rows normalized to unit norm) at which a
  // feasibility solve stops.
  double feasibility_tol = 1e-10;
  double dual_tol = 1e-9;
  double gap_tol = 1e-8;
  // Farkas certificate: -A^T y_bar must be PSD up to this value with
  // b^T y_bar = 1.
  double infeasibility_tol = 1e-9;
  // When the method stalls, the best iterate whose unscaled equality residual
  // is below this value is returned as feasible (not optimal).
  double acceptable_residual = 1e-7;
  // Iterations without a better feasible iterate before giving up.
  int stall_iterations = 10;
  // Fraction of the distance to the cone boundary taken per step.
  double step_fraction = 0.95;
  bool verbose = false;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::kUndecided;
  std::vector<Eigen::MatrixXd> blocks;
  Eigen::VectorXd free;
  Eigen::VectorXd dual;
  int iterations = 0;
  double primal_objective = 0.0;
  // Evaluated on the unscaled rows.
  double equality_residual = 0.0;
  double min_eigenvalue = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  // False when the method stalled and the best primal-feasible iterate was
  // returned instead of an optimum.
  bool optimal = false;
  std::string message;
};

// Infeasible-start primal-dual path-following method with the HKM search
// direction and a Mehrotra predictor-corrector. Free variables enter the
// Newton system as a saddle-point block. Single-threaded and deterministic.
SdpSolution sdp_solve(const SdpProblem& problem,
                      const SdpOptions& options = {});

// Max over rows of |sum <A_i, X> + B_i w - b_i| on the given problem.
double sdp_equality_residual(const SdpProblem& problem,
                             const std::vector<Eigen::MatrixXd>& blocks,
                             const Eigen::VectorXd& free);

}  // namespace shieldsyn

#endif  // SHIELDSYN_SDP_SOLVER_HPP_
