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

#include "fairnmf/nmf_standard.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairnmf/metrics.hpp"
#include "fairnmf/nnls.hpp"

namespace fairnmf {

void NmfOptions::validate() const {
  if (rank < 1) throw std::invalid_argument("NmfOptions: rank must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("NmfOptions: max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw std::invalid_argument("NmfOptions: rel_tol must be > 0");
  if (!(epsilon_guard > 0.0)) {
    throw std::invalid_argument("NmfOptions: epsilon_guard must be > 0");
  }
}

namespace {

void check_product_shapes(const Matrix& x, const Matrix& w, const Matrix& h,
                          const char* op) {
  if (w.cols() != h.rows() || x.rows() != w.rows() || x.cols() != h.cols() ||
      x.size() == 0 || w.cols() == 0) {
    throw DimensionError(std::string(op) + ": X " + shape_string(x) + ", W " +
                         shape_string(w) + ", H " + shape_string(h));
  }
}

// factor .* num ./ max(den, guard), written in place into num.
Matrix apply_ratio(const Matrix& factor, Matrix num, const Matrix& den,
                   double guard) {
  for (Index i = 0; i < num.rows(); ++i) {
    for (Index j = 0; j < num.cols(); ++j) {
      num(i, j) = factor(i, j) * num(i, j) / std::max(den(i, j), guard);
    }
  }
  return num;
}

}  // namespace

Matrix mu_update_H(const Matrix& x, const Matrix& w, const Matrix& h,
                   double epsilon_guard) {
  check_product_shapes(x, w, h, "mu_update_H");
  const Matrix wt = w.transpose();
  Matrix num = wt * x;
  const Matrix den = (wt * w) * h;
  return apply_ratio(h, std::move(num), den, epsilon_guard);
}

Matrix mu_update_W(const Matrix& x, const Matrix& w, const Matrix& h,
                   double epsilon_guard) {
  check_product_shapes(x, w, h, "mu_update_W");
  const Matrix ht = h.transpose();
  Matrix num = x * ht;
  const Matrix den = w * (h * ht);
  return apply_ratio(w, std::move(num), den, epsilon_guard);
}

namespace {

using FactorStep = void (*)(const Matrix& x, Matrix& w, Matrix& h, const NmfOptions& opts);

FitResult alternate(const Matrix& x, const NmfOptions& opts, const char* name,
                    FactorStep step) {
  opts.validate();
  if (x.size() == 0) throw DimensionError(std::string(name) + ": empty matrix");
  require_nonnegative(x, std::string(name) + " X");

  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  FitResult result;
  Matrix& w = result.factors.W;
  Matrix& h = result.factors.H;
  w = random_nonneg(x.rows(), opts.rank, opts.seed);
  h = random_nonneg(opts.rank, x.cols(), derive_seed(opts.seed, 0));

  std::vector<double> prev{(x - w * h).norm()};
  result.report.termination = Termination::kMaxIterations;
  for (int k = 1; k <= opts.max_iters; ++k) {
    step(x, w, h, opts);

    IterationRecord rec;
    rec.iteration = k;
    rec.group_errors = {(x - w * h).norm()};
    rec.objective = std::numeric_limits<double>::quiet_NaN();
    rec.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    const bool done = converged(prev, rec.group_errors, opts.rel_tol);
    prev = rec.group_errors;
    result.report.trace.push_back(std::move(rec));
    if (done) {
      result.report.termination = Termination::kConverged;
      break;
    }
  }
  return result;
}

// nnls(a, b) with the all-zero columns of a removed. The matching rows of
// the result do not affect a * v and are set to zero.
Matrix nnls_live_columns(const Matrix& a, const Matrix& b) {
  std::vector<Index> live;
  for (Index k = 0; k < a.cols(); ++k) {
    if ((a.col(k).array() != 0.0).any()) live.push_back(k);
  }
  Matrix v = Matrix::Zero(a.cols(), b.cols());
  if (live.empty()) return v;
  if (static_cast<Index>(live.size()) == a.cols()) return nnls(a, b);
  Matrix sub(a.rows(), static_cast<Index>(live.size()));
  for (std::size_t k = 0; k < live.size(); ++k) sub.col(static_cast<Index>(k)) = a.col(live[k]);
  const Matrix vs = nnls(sub, b);
  for (std::size_t k = 0; k < live.size(); ++k) v.row(live[k]) = vs.row(static_cast<Index>(k));
  return v;
}

}  // namespace

FitResult nmf_mu(const Matrix& x, const NmfOptions& opts) {
  return alternate(x, opts, "nmf_mu", [](const Matrix& x, Matrix& w, Matrix& h,
                                         const NmfOptions& o) {
    w = mu_update_W(x, w, h, o.epsilon_guard);
    h = mu_update_H(x, w, h, o.epsilon_guard);
  });
}

FitResult nmf_am(const Matrix& x, const NmfOptions& opts) {
  return alternate(x, opts, "nmf_am", [](const Matrix& x, Matrix& w, Matrix& h,
                                         const NmfOptions&) {
    h = nnls_live_columns(w, x);
    w = nnls_live_columns(h.transpose(), x.transpose()).transpose();
  });
}

GroupBaselines estimate_baselines(const GroupedMatrix& x, const NmfOptions& opts,
                                  int trials) {
  return estimate_baselines(x, opts, trials, [](const Matrix& block, const NmfOptions& o) {
    return nmf_mu(block, o).report.last().group_errors.front();
  });
}

GroupBaselines estimate_baselines(const GroupedMatrix& x, const NmfOptions& opts,
                                  int trials, const BlockFitter& fitter) {
  opts.validate();
  if (trials < 1) throw std::invalid_argument("estimate_baselines: T must be >= 1");

  GroupBaselines out;
  out.trials = trials;
  out.options = opts;
  for (int t = 0; t < trials; ++t) {
    out.seeds.push_back(derive_seed(opts.seed, static_cast<std::uint64_t>(t)));
  }
  for (std::size_t l = 0; l < x.num_groups(); ++l) {
    const Matrix block = x.block(l);
    double total = 0.0;
    for (int t = 0; t < trials; ++t) {
      NmfOptions run = opts;
      run.seed = out.seeds[static_cast<std::size_t>(t)];
      total += fitter(block, run);
    }
    out.values.push_back(total / trials);
  }
  return out;
}

}  // namespace fairnmf
