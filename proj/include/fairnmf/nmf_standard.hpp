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

#ifndef FAIRNMF_NMF_STANDARD_HPP_
#define FAIRNMF_NMF_STANDARD_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "fairnmf/fit_report.hpp"
#include "fairnmf/grouped_matrix.hpp"

namespace fairnmf {

struct NmfOptions {
  Index rank = 1;
  int max_iters = 2000;
  // Stop once the relative change of ||X - WH|| in one iteration drops
  // below this fraction of the current error.
  double rel_tol = 1e-4;
  // Floor applied to multiplicative-update denominators.
  double epsilon_guard = 1e-12;
  std::uint64_t seed = 0;

  void validate() const;
};

// Lee-Seung multiplicative updates for ||X - WH||_F^2.
//
//   H' = H .* (W^T X) ./ max(W^T W H, epsilon_guard)
//   W' = W .* (X H^T) ./ max(W H H^T, epsilon_guard)
//
// The guard only engages where a denominator falls below epsilon_guard, so
// the update is exactly invariant to a common rescaling of X and W (the
// weighted updates rely on this). Non-negative inputs give non-negative
// outputs. Throws DimensionError on incompatible shapes.
Matrix mu_update_H(const Matrix& x, const Matrix& w, const Matrix& h,
                   double epsilon_guard);
Matrix mu_update_W(const Matrix& x, const Matrix& w, const Matrix& h,
                   double epsilon_guard);

// Rank-r NMF by alternating mu_update_W / mu_update_H from a random
// initialization (W from seed, H from derive_seed(seed, 0)). The trace holds
// ||X - WH|| after every iteration as a single-entry group_errors vector.
FitResult nmf_mu(const Matrix& x, const NmfOptions& opts);

// Rank-r NMF by exact alternating minimization: H = argmin ||X - WH|| over
// H >= 0, then W = argmin ||X - WH|| over W >= 0, each by nnls. A component
// whose W column or H row becomes zero stays zero. Same initialization,
// trace and stopping rule as nmf_mu. The error sequence is non-increasing.
FitResult nmf_am(const Matrix& x, const NmfOptions& opts);

// Per-group baselines E_l: the mean final error ||X_l - W_l H_l|| over T
// independent NMF runs on each group block alone. Stored unnormalized.
struct GroupBaselines {
  std::vector<double> values;
  int trials = 0;
  std::vector<std::uint64_t> seeds;
  NmfOptions options;

  std::size_t size() const { return values.size(); }
};

// Fits one block and returns its final reconstruction error.
using BlockFitter = std::function<double(const Matrix& block, const NmfOptions& opts)>;

// Runs trial t with seed derive_seed(opts.seed, t) for every group. The
// default fitter is nmf_mu.
GroupBaselines estimate_baselines(const GroupedMatrix& x, const NmfOptions& opts,
                                  int trials);
GroupBaselines estimate_baselines(const GroupedMatrix& x, const NmfOptions& opts,
                                  int trials, const BlockFitter& fitter);

}  // namespace fairnmf

#endif  // FAIRNMF_NMF_STANDARD_HPP_
