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

#ifndef FAIRNMF_FIT_REPORT_HPP_
#define FAIRNMF_FIT_REPORT_HPP_

#include <string>
#include <vector>

#include "fairnmf/grouped_matrix.hpp"

namespace fairnmf {

enum class Termination { kConverged, kMaxIterations, kSolverFailure };

const char* to_string(Termination t);

struct IterationRecord {
  int iteration = 0;
  // Unnormalized Frobenius errors ||X_l - W_l H||, one per group. Plain NMF
  // fits record a single entry for the whole matrix.
  std::vector<double> group_errors;
  // Relative losses; empty when no baselines are involved.
  std::vector<double> group_losses;
  // Max of group_losses, or NaN when there are none.
  double objective = 0.0;
  // Seconds since the start of the fit.
  double elapsed_seconds = 0.0;
};

struct FitReport {
  std::vector<IterationRecord> trace;
  Termination termination = Termination::kMaxIterations;
  std::string message;

  int iterations() const { return static_cast<int>(trace.size()); }
  const IterationRecord& last() const { return trace.back(); }
  double elapsed_seconds() const {
    return trace.empty() ? 0.0 : trace.back().elapsed_seconds;
  }
};

struct FitResult {
  FactorPair factors;
  FitReport report;
};

}  // namespace fairnmf

#endif  // FAIRNMF_FIT_REPORT_HPP_
