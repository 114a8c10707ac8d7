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

#include "fairnmf/fairer_mu.hpp"

#include <chrono>
#include <stdexcept>

#include "fairnmf/metrics.hpp"

namespace fairnmf {

std::size_t argmax_group_loss(const GroupedMatrix& x, const FactorPair& f,
                              const GroupBaselines& baselines) {
  const std::vector<double> errors = group_errors(x, f.W, f.H);
  return argmax_loss(group_losses(x, errors, baselines.values));
}

WeightVector update_weights(WeightVector w, std::size_t l) {
  if (l >= w.c.size()) {
    throw std::out_of_range("update_weights: group " + std::to_string(l) +
                            " out of range for " + std::to_string(w.c.size()) +
                            " groups");
  }
  w.c[l] += 1.0;
  ++w.iteration;
  return w;
}

ScaledBlocks build_scaled_blocks(const GroupedMatrix& x, const Matrix& w,
                                 const WeightVector& weights) {
  if (weights.c.size() != x.num_groups()) {
    throw DimensionError("build_scaled_blocks: weight vector has " +
                         std::to_string(weights.c.size()) + " entries for " +
                         std::to_string(x.num_groups()) + " groups");
  }
  if (w.rows() != x.rows()) {
    throw DimensionError("build_scaled_blocks: W " + shape_string(w) +
                         " does not match X " + shape_string(x.matrix()));
  }
  ScaledBlocks out{Matrix(x.rows(), x.cols()), Matrix(x.rows(), w.cols())};
  Index row = 0;
  for (std::size_t l = 0; l < x.num_groups(); ++l) {
    const double scale = weights.c[l] / x.norm(l);
    for (Index src : x.group(l).rows) {
      out.x.row(row) = scale * x.matrix().row(src);
      out.w.row(row) = scale * w.row(src);
      ++row;
    }
  }
  return out;
}

FitResult fairer_nmf_mu(const GroupedMatrix& x, const GroupBaselines& baselines,
                        const FairerOptions& opts) {
  opts.validate();
  if (baselines.size() != x.num_groups()) {
    throw DimensionError("fairer_nmf_mu: " + std::to_string(baselines.size()) +
                         " baselines for " + std::to_string(x.num_groups()) +
                         " groups");
  }
  if (baselines.options.rank != opts.rank) {
    throw std::invalid_argument("fairer_nmf_mu: baselines were computed at rank " +
                                std::to_string(baselines.options.rank) +
                                ", fit requested at rank " +
                                std::to_string(opts.rank));
  }

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  FitResult result;
  Matrix w = random_nonneg(x.rows(), opts.rank, opts.seed);
  Matrix h = random_nonneg(opts.rank, x.cols(), derive_seed(opts.seed, 0));
  WeightVector weights = WeightVector::zeros(x.num_groups());

  std::vector<double> errors = group_errors(x, w, h);
  std::vector<double> losses = group_losses(x, errors, baselines.values);
  result.report.termination = Termination::kMaxIterations;

  for (int k = 1; k <= opts.max_outer_iters; ++k) {
    weights = update_weights(std::move(weights), argmax_loss(losses));
    const ScaledBlocks scaled = build_scaled_blocks(x, w, weights);
    h = mu_update_H(scaled.x, scaled.w, h, opts.epsilon_guard);
    // Rows of W are independent, so one full update equals the per-group
    // updates on (X_l, W_l, H).
    w = mu_update_W(x.matrix(), w, h, opts.epsilon_guard);

    IterationRecord rec;
    rec.iteration = k;
    rec.group_errors = group_errors(x, w, h);
    rec.group_losses = group_losses(x, rec.group_errors, baselines.values);
    rec.objective = max_loss(rec.group_losses);
    rec.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const bool done = converged(errors, rec.group_errors, opts.rel_tol);
    errors = rec.group_errors;
    losses = rec.group_losses;
    result.report.trace.push_back(std::move(rec));
    if (done) {
      result.report.termination = Termination::kConverged;
      break;
    }
  }
  result.factors = {std::move(w), std::move(h)};
  return result;
}

}  // namespace fairnmf
