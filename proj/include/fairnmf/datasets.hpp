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

#ifndef FAIRNMF_DATASETS_HPP_
#define FAIRNMF_DATASETS_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairnmf/grouped_matrix.hpp"

namespace fairnmf {

class IngestionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SyntheticGroupSpec {
  std::string label;
  Index rows = 0;
  Index cols = 0;
  Index rank = 0;
};

struct SyntheticSpec {
  std::vector<SyntheticGroupSpec> groups;
  std::uint64_t seed = 0;

  // Three groups sharing 20 features: 1000 rows of rank 3, 500 rows of
  // rank 3 and 250 rows of rank 6.
  static SyntheticSpec table1(std::uint64_t seed = 0);

  // Throws ConfigError on empty specs, zero dimensions or mismatched
  // column counts.
  void validate() const;
};

// Each group block is W_g H_g with both factors uniform on [0, 1) at the
// group's planted rank. Group g draws W_g from derive_seed(seed, 2g) and H_g
// from derive_seed(seed, 2g + 1). Blocks are stacked in spec order.
GroupedMatrix generate_synthetic(const SyntheticSpec& spec);

// Reads a headered, comma-separated file. Rows are partitioned by the value
// in `group_column`; that column and `drop_columns` are excluded from the
// features. Every remaining cell must be a finite, non-negative number.
// Unknown column names raise ConfigError; bad cells raise IngestionError
// naming the line and column.
GroupedMatrix load_grouped_csv(const std::filesystem::path& path,
                               const std::string& group_column,
                               const std::vector<std::string>& drop_columns = {});

// Writes the matrix in its original row order with a leading group column.
// Features are named f0, f1, ... unless `feature_names` is given. Values are
// printed with 17 significant digits, so reloading is exact.
void write_grouped_csv(const GroupedMatrix& x, const std::filesystem::path& path,
                       const std::string& group_column = "group",
                       const std::vector<std::string>& feature_names = {});

// Scales every column of the full matrix to unit Euclidean norm; group
// norms are recomputed. Throws DegenerateGroupError on an all-zero column.
GroupedMatrix normalize_features(const GroupedMatrix& x);

}  // namespace fairnmf

#endif  // FAIRNMF_DATASETS_HPP_
