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

// Group-level quality measures shared by every solver and the experiment
// harness. All loss and objective values reported anywhere in the library
// are computed here.

#ifndef FAIRNMF_METRICS_HPP_
#define FAIRNMF_METRICS_HPP_

#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "fairnmf/grouped_matrix.hpp"

namespace fairnmf {

// ||X - W H|| / ||X||. Throws DegenerateGroupError if ||X|| == 0.
double relative_error(const Matrix& x, const Matrix& w, const Matrix& h);

// (||X - W H|| - baseline) / ||X||. Signed: a group reconstructed better than
// its baseline has negative loss, and the value is never clamped.
double relative_loss(const Matrix& x, const Matrix& w, const Matrix& h,
                     double baseline);

// Same quantity from an already computed error and block norm.
double loss_from_error(double error, double baseline, double norm);

// Unnormalized per-group errors ||X_l - W_l H|| for a full-size W.
std::vector<double> group_errors(const GroupedMatrix& x, const Matrix& w,
                                 const Matrix& h);

std::vector<double> group_losses(const GroupedMatrix& x,
                                 std::span<const double> errors,
                                 std::span<const double> baselines);

// Max of the losses (the min-max objective). Throws on an empty span.
double max_loss(std::span<const double> losses);

// Index of the largest loss; ties resolve to the smallest index.
std::size_t argmax_loss(std::span<const double> losses);

// Relative-change stopping rule on unnormalized group errors:
// max_l |cur_l - prev_l| / cur_l < tol, with 0/0 read as 0.
bool converged(std::span<const double> prev, std::span<const double> cur,
               double tol);

struct GroupMetrics {
  std::vector<double> relative_error;  // per group, >= 0
  std::vector<double> relative_loss;   // per group, signed
  double objective_f = 0.0;            // max of relative_loss
  int iteration = 0;
};

GroupMetrics group_metrics(const GroupedMatrix& x, const FactorPair& f,
                           std::span<const double> baselines, int iteration = 0);

// Mean and sample (n - 1) standard deviation. The std of a single value is 0.
struct SampleStats {
  int count = 0;
  double mean = 0.0;
  double stddev = 0.0;
};

SampleStats summarize(std::span<const double> values);

struct TrialRecord {
  std::string method;
  Index rank = 0;
  int trial = 0;
  GroupMetrics metrics;
};

struct TrialAggregate {
  struct Key {
    std::string method;
    Index rank = 0;
    std::size_t group = 0;
    auto operator<=>(const Key&) const = default;
  };
  struct Entry {
    SampleStats relative_error;
    SampleStats relative_loss;
  };
  std::map<Key, Entry> entries;
};

// Groups records by (method, rank, group) and summarizes over trials.
// Throws std::invalid_argument on an empty record list.
TrialAggregate aggregate_trials(std::span<const TrialRecord> records);

}  // namespace fairnmf

#endif  // FAIRNMF_METRICS_HPP_
