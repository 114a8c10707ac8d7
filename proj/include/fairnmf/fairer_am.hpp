// Copyright 2026 The Fairer NMF Authors.
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

// Fairer NMF by alternating minimization. Each outer iteration solves the
// convex min-max problem for H with W fixed, then refits W by non-negative
// least squares on the whole matrix.

#ifndef FAIRNMF_FAIRER_AM_HPP_
#define FAIRNMF_FAIRER_AM_HPP_

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fairnmf/fit_report.hpp"
#include "fairnmf/grouped_matrix.hpp"
#include "fairnmf/nmf_standard.hpp"

namespace fairnmf {

struct FairerOptions {
  Index rank = 1;
  int max_outer_iters = 1000;
  double rel_tol = 1e-4;
  // Absolute accuracy of each min-max H solve.
  double solver_tol = 1e-6;
  // Newton-step budget per H solve.
  int max_inner_iters = 2000;
  double epsilon_guard = 1e-12;
  std::uint64_t seed = 0;

  void validate() const;
};

// max_l (||X_l - W_l H|| - E_l) / ||X_l||. May be negative.
double objective_f(const GroupedMatrix& x, const FactorPair& f,
                   const GroupBaselines& baselines);

// One H step: minimize max_l (||X_l - W_l H|| - E_l) / ||X_l|| over H >= 0
// with every W_l held fixed.
struct MinMaxSubproblem {
  std::vector<Matrix> x_blocks;
  std::vector<Matrix> w_blocks;
  std::vector<double> baselines;
  std::vector<double> norms;
  double solver_tol = 1e-6;
  int max_inner_iters = 2000;
  // Growth factor of the barrier weight between centering rounds.
  double barrier_growth = 12.0;

  static MinMaxSubproblem from(const GroupedMatrix& x, const Matrix& w,
                               const GroupBaselines& baselines,
                               const FairerOptions& opts);
  void validate() const;
};

struct MinMaxSolution {
  Matrix H;
  // Smallest t with ||X_l - W_l H|| <= t ||X_l|| + E_l for all l, i.e. the
  // objective at H.
  double epigraph_value = 0.0;
  int newton_steps = 0;
};

// Raised when the barrier method runs out of Newton steps before reaching
// solver_tol. Carries the best iterate found so far.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, MinMaxSolution best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const MinMaxSolution& best_iterate() const { return best_; }

 private:
  MinMaxSolution best_;
};

// Solves the epigraph form
//
//   min t  s.t.  ||X_l - W_l H|| <= t ||X_l|| + E_l  for all l,  H >= 0
//
// with a primal log-barrier path-following method. Each group block is
// compressed through a thin QR of W_l, so the cost per Newton step depends
// only on r, n and L. The Newton system is block diagonal over the columns
// of H plus one rank-one term per group and is solved through Woodbury and
// a Schur complement on t. The result is within solver_tol of the optimum.
//
// Rows of H that multiply an all-zero column in every W_l do not enter the
// objective; they keep their warm-start value. `warm_start` must be r x n;
// entries are lifted to a small positive floor before the first step.
MinMaxSolution solve_h_minmax(const MinMaxSubproblem& sub, const Matrix& warm_start);

// W step: argmin over W >= 0 of ||X - W H||, solved row by row against the
// shared Gram matrix H H^T.
Matrix nnls_w_step(const GroupedMatrix& x, const Matrix& h);

// The same minimizer computed independently for each group block.
Matrix nnls_w_step_per_group(const GroupedMatrix& x, const Matrix& h);

// Alternating minimization. W starts from random_nonneg(m, r, seed) and the
// first H solve is warm-started from random_nonneg(r, n, derive_seed(seed, 0));
// later H solves warm-start from the previous H. Stops when the per-group
// relative error change falls below rel_tol or after max_outer_iters. An H
// solve that fails twice (the second time with a gentler barrier schedule)
// ends the fit with Termination::kSolverFailure and the last complete iterate.
FitResult fairer_nmf_am(const GroupedMatrix& x, const GroupBaselines& baselines,
                        const FairerOptions& opts);

}  // namespace fairnmf

#endif  // FAIRNMF_FAIRER_AM_HPP_
