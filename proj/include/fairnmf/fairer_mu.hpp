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

#ifndef FAIRNMF_FAIRER_MU_HPP_
#define FAIRNMF_FAIRER_MU_HPP_

#include <vector>

#include "fairnmf/fairer_am.hpp"
#include "fairnmf/fit_report.hpp"
#include "fairnmf/grouped_matrix.hpp"
#include "fairnmf/nmf_standard.hpp"

namespace fairnmf {

// Cumulative count of how often each group had the worst loss. Kept as raw
// counts; the H update does not depend on the overall scale of c.
struct WeightVector {
  std::vector<double> c;
  int iteration = 0;

  static WeightVector zeros(std::size_t groups) {
    return WeightVector{std::vector<double>(groups, 0.0), 0};
  }
};

// Group with the largest relative loss under F; ties go to the smallest index.
std::size_t argmax_group_loss(const GroupedMatrix& x, const FactorPair& f,
                              const GroupBaselines& baselines);

// c + e_l, iteration + 1. Throws std::out_of_range for l >= L.
WeightVector update_weights(WeightVector w, std::size_t l);

// Blocks c_l X_l / ||X_l|| and c_l W_l / ||X_l|| stacked in group order.
struct ScaledBlocks {
  Matrix x;
  Matrix w;
};

ScaledBlocks build_scaled_blocks(const GroupedMatrix& x, const Matrix& w,
                                 const WeightVector& weights);

// Multiplicative-update Fairer NMF. Each iteration picks the worst group,
// bumps its weight, takes one H update on the scaled blocks and one W
// update on the unscaled data. Same stopping rule as fairer_nmf_am.
FitResult fairer_nmf_mu(const GroupedMatrix& x, const GroupBaselines& baselines,
                        const FairerOptions& opts);

}  // namespace fairnmf

#endif  // FAIRNMF_FAIRER_MU_HPP_
