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

// Rank-sweep experiment runner: fits every (method, rank, trial) cell on one
// grouped data set and writes long-format CSV plus a JSON summary.

#ifndef FAIRNMF_EXPERIMENT_HPP_
#define FAIRNMF_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fairnmf/datasets.hpp"
#include "fairnmf/grouped_matrix.hpp"
#include "fairnmf/nmf_standard.hpp"

namespace fairnmf {

enum class Method { kFairerAm, kFairerMu, kStandardMu, kStandardPerGroup };

std::string_view method_name(Method m);
// Throws ConfigError on unknown names.
Method parse_method(std::string_view name);

struct DatasetSource {
  // "table1", "synthetic:<label>=<rows>x<cols>x<rank>,..." or a CSV path.
  std::string spec = "table1";
  std::string group_column = "group";
  std::vector<std::string> drop_columns;
  std::uint64_t data_seed = 0;
  bool normalize = true;
};

struct ExperimentConfig {
  DatasetSource dataset;
  std::vector<Method> methods{Method::kStandardMu, Method::kFairerAm,
                              Method::kFairerMu};
  std::vector<Index> ranks{3};
  int trials = 10;
  int baseline_runs = 5;
  std::uint64_t seed = 0;
  double rel_tol = 1e-4;
  double solver_tol = 1e-6;
  int max_iters = 5000;        // standard NMF and baseline runs
  int max_outer_iters = 5000;  // fairer solvers
  int max_inner_iters = 2000;  // Newton steps per min-max H solve
  int jobs = 1;
  // When false, wall-clock fields are written as 0 so that repeated runs
  // produce byte-identical files.
  bool record_timing = true;
  std::filesystem::path out_dir = "fairnmf_out";

  void validate() const;
};

// Applies one `key = value` setting; throws ConfigError on unknown keys or
// malformed values. Keys: dataset, group_column, drop_columns, data_seed,
// normalize, methods, ranks, trials, baseline_runs, seed, rel_tol,
// solver_tol, max_iters, max_outer_iters, max_inner_iters, jobs, timing,
// out.
void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value);

// Reads a config file of `key = value` lines. Blank lines and lines whose
// first non-space character is '#' are ignored.
ExperimentConfig load_config(const std::filesystem::path& path);

// "2-5,8" -> {2, 3, 4, 5, 8}.
std::vector<Index> parse_ranks(std::string_view text);

GroupedMatrix load_dataset(const DatasetSource& source);

struct ResultRow {
  Method method = Method::kStandardMu;
  Index rank = 0;
  int trial = 0;
  std::size_t group = 0;
  double rel_error_pct = 0.0;
  std::optional<double> rel_loss;  // absent for standard-per-group
  std::optional<double> objective;
  int iterations = 0;
  double seconds = 0.0;
};

struct CellFailure {
  Method method = Method::kStandardMu;
  Index rank = 0;
  int trial = 0;
  std::string message;
};

struct ExperimentResults {
  ExperimentConfig config;
  std::vector<std::string> group_labels;
  std::vector<Index> group_sizes;
  std::map<Index, GroupBaselines> baselines;  // by rank
  std::vector<ResultRow> rows;  // sorted by method name, rank, trial, group
  std::vector<CellFailure> failures;
};

// Seeds: trial t of every method uses derive_seed(seed, t); the baselines
// for rank r use derive_seed(seed, 1'000'000 + r) as their base seed.
// Baselines are computed once per rank and shared by all methods and trials.
// A cell that throws, or whose solver gives up, is listed in `failures`;
// the rest of the grid still runs.
ExperimentResults run_experiment(const ExperimentConfig& cfg, const GroupedMatrix& data);
ExperimentResults run_experiment(const ExperimentConfig& cfg);

// Writes <out_dir>/results.csv and <out_dir>/summary.json.
void emit_results(const ExperimentResults& results, const std::filesystem::path& out_dir);

// Quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double p);

inline constexpr int kSummarySchemaVersion = 1;

}  // namespace fairnmf

#endif  // FAIRNMF_EXPERIMENT_HPP_
