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

#include "fairnmf/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "fairnmf/fit_report.hpp"

namespace fairnmf {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kConverged:
      return "converged";
    case Termination::kMaxIterations:
      return "max_iterations";
    case Termination::kSolverFailure:
      return "solver_failure";
  }
  return "unknown";
}

namespace {

double residual_norm(const Matrix& x, const Matrix& w, const Matrix& h) {
  if (w.cols() != h.rows() || x.rows() != w.rows() || x.cols() != h.cols()) {
    throw DimensionError("residual: X " + shape_string(x) + ", W " +
                         shape_string(w) + ", H " + shape_string(h));
  }
  return (x - w * h).norm();
}

double block_norm(const Matrix& x) {
  const double n = frobenius_norm(x);
  if (!(n > 0.0)) throw DegenerateGroupError("zero-norm block");
  return n;
}

}  // namespace

double relative_error(const Matrix& x, const Matrix& w, const Matrix& h) {
  const double n = block_norm(x);
  return residual_norm(x, w, h) / n;
}

double relative_loss(const Matrix& x, const Matrix& w, const Matrix& h,
                     double baseline) {
  const double n = block_norm(x);
  return loss_from_error(residual_norm(x, w, h), baseline, n);
}

double loss_from_error(double error, double baseline, double norm) {
  if (!(norm > 0.0)) throw DegenerateGroupError("zero-norm block");
  return (error - baseline) / norm;
}

std::vector<double> group_errors(const GroupedMatrix& x, const Matrix& w,
                                 const Matrix& h) {
  if (w.rows() != x.rows() || w.cols() != h.rows() || h.cols() != x.cols()) {
    throw DimensionError("group_errors: X " + shape_string(x.matrix()) + ", W " +
                         shape_string(w) + ", H " + shape_string(h));
  }
  const Vector row_sq = (x.matrix() - w * h).rowwise().squaredNorm();
  std::vector<double> out;
  out.reserve(x.num_groups());
  for (const Group& g : x.groups()) {
    double s = 0.0;
    for (Index r : g.rows) s += row_sq(r);
    out.push_back(std::sqrt(s));
  }
  return out;
}

std::vector<double> group_losses(const GroupedMatrix& x,
                                 std::span<const double> errors,
                                 std::span<const double> baselines) {
  if (errors.size() != x.num_groups() || baselines.size() != x.num_groups()) {
    throw DimensionError("group_losses: expected " +
                         std::to_string(x.num_groups()) + " groups");
  }
  std::vector<double> out(errors.size());
  for (std::size_t l = 0; l < errors.size(); ++l) {
    out[l] = loss_from_error(errors[l], baselines[l], x.norm(l));
  }
  return out;
}

double max_loss(std::span<const double> losses) {
  return losses[argmax_loss(losses)];
}

std::size_t argmax_loss(std::span<const double> losses) {
  if (losses.empty()) throw std::invalid_argument("argmax_loss: no groups");
  std::size_t best = 0;
  for (std::size_t l = 1; l < losses.size(); ++l) {
    if (losses[l] > losses[best]) best = l;
  }
  return best;
}

bool converged(std::span<const double> prev, std::span<const double> cur,
               double tol) {
  if (prev.size() != cur.size()) {
    throw DimensionError("converged: error vectors differ in length");
  }
  double worst = 0.0;
  for (std::size_t l = 0; l < cur.size(); ++l) {
    const double change = std::abs(cur[l] - prev[l]);
    if (change == 0.0) continue;
    // A zero current error with a nonzero change cannot be normalized; the
    // group has reached an exact fit, which counts as converged.
    if (cur[l] == 0.0) continue;
    worst = std::max(worst, change / cur[l]);
  }
  return worst < tol;
}

GroupMetrics group_metrics(const GroupedMatrix& x, const FactorPair& f,
                           std::span<const double> baselines, int iteration) {
  const std::vector<double> errors = group_errors(x, f.W, f.H);
  GroupMetrics m;
  m.iteration = iteration;
  m.relative_error.resize(errors.size());
  for (std::size_t l = 0; l < errors.size(); ++l) {
    m.relative_error[l] = errors[l] / x.norm(l);
  }
  m.relative_loss = group_losses(x, errors, baselines);
  m.objective_f = max_loss(m.relative_loss);
  return m;
}

SampleStats summarize(std::span<const double> values) {
  SampleStats s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  // Shifted by the first value so identical inputs give exactly mean = v
  // and std = 0.
  const double shift = values.front();
  double sum = 0.0;
  for (double v : values) sum += v - shift;
  const double offset = sum / static_cast<double>(values.size());
  s.mean = shift + offset;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - shift - offset) * (v - shift - offset);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

TrialAggregate aggregate_trials(std::span<const TrialRecord> records) {
  if (records.empty()) {
    throw std::invalid_argument("aggregate_trials: no records");
  }
  std::map<TrialAggregate::Key, std::pair<std::vector<double>, std::vector<double>>>
      buckets;
  for (const TrialRecord& rec : records) {
    const GroupMetrics& m = rec.metrics;
    for (std::size_t l = 0; l < m.relative_error.size(); ++l) {
      auto& bucket = buckets[{rec.method, rec.rank, l}];
      bucket.first.push_back(m.relative_error[l]);
      if (l < m.relative_loss.size()) bucket.second.push_back(m.relative_loss[l]);
    }
  }
  TrialAggregate agg;
  for (const auto& [key, bucket] : buckets) {
    agg.entries[key] = {summarize(bucket.first), summarize(bucket.second)};
  }
  return agg;
}

}  // namespace fairnmf
