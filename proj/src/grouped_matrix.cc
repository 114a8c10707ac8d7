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

#include "fairnmf/grouped_matrix.hpp"

#include <algorithm>
#include <unordered_map>

namespace fairnmf {

GroupedMatrix::GroupedMatrix(Matrix data, std::vector<Group> groups)
    : data_(std::move(data)), groups_(std::move(groups)) {
  if (data_.size() == 0) {
    throw DimensionError("GroupedMatrix: empty data matrix");
  }
  if (groups_.empty()) {
    throw DimensionError("GroupedMatrix: at least one group is required");
  }
  require_nonnegative(data_, "GroupedMatrix data");

  std::vector<int> seen(static_cast<std::size_t>(data_.rows()), 0);
  for (Group& g : groups_) {
    if (g.rows.empty()) {
      throw DimensionError("GroupedMatrix: group '" + g.label + "' is empty");
    }
    std::sort(g.rows.begin(), g.rows.end());
    for (Index r : g.rows) {
      if (r < 0 || r >= data_.rows()) {
        throw DimensionError("GroupedMatrix: row index " + std::to_string(r) +
                             " out of range in group '" + g.label + "'");
      }
      if (seen[static_cast<std::size_t>(r)]++ != 0) {
        throw DimensionError("GroupedMatrix: row " + std::to_string(r) +
                             " belongs to more than one group");
      }
    }
  }
  for (std::size_t r = 0; r < seen.size(); ++r) {
    if (seen[r] == 0) {
      throw DimensionError("GroupedMatrix: row " + std::to_string(r) +
                           " is not assigned to any group");
    }
  }

  norms_.reserve(groups_.size());
  for (std::size_t l = 0; l < groups_.size(); ++l) {
    const double n = frobenius_norm(block(l));
    if (!(n > 0.0)) {
      throw DegenerateGroupError("GroupedMatrix: group '" + groups_[l].label +
                                 "' has an all-zero block");
    }
    norms_.push_back(n);
  }
}

std::vector<std::string> GroupedMatrix::labels() const {
  std::vector<std::string> out;
  out.reserve(groups_.size());
  for (const Group& g : groups_) out.push_back(g.label);
  return out;
}

Matrix GroupedMatrix::gather(const Matrix& full, std::size_t l) const {
  if (full.rows() != data_.rows()) {
    throw DimensionError("GroupedMatrix::gather: expected " +
                         std::to_string(data_.rows()) + " rows, got " +
                         shape_string(full));
  }
  const Group& g = groups_.at(l);
  Matrix out(static_cast<Index>(g.rows.size()), full.cols());
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    out.row(static_cast<Index>(i)) = full.row(g.rows[i]);
  }
  return out;
}

void GroupedMatrix::scatter(std::size_t l, const Matrix& block, Matrix& full) const {
  const Group& g = groups_.at(l);
  if (full.rows() != data_.rows() ||
      block.rows() != static_cast<Index>(g.rows.size()) ||
      block.cols() != full.cols()) {
    throw DimensionError("GroupedMatrix::scatter: block " + shape_string(block) +
                         " does not fit group '" + g.label + "' of " +
                         shape_string(full));
  }
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    full.row(g.rows[i]) = block.row(static_cast<Index>(i));
  }
}

GroupedMatrix row_partition(const Matrix& x, std::span<const std::string> labels) {
  if (static_cast<Index>(labels.size()) != x.rows()) {
    throw DimensionError("row_partition: " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(x.rows()) + " rows");
  }
  std::vector<Group> groups;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] = index.try_emplace(labels[i], groups.size());
    if (inserted) groups.push_back(Group{labels[i], {}});
    groups[it->second].rows.push_back(static_cast<Index>(i));
  }
  return GroupedMatrix(x, std::move(groups));
}

void FactorPair::validate(Index m, Index n) const {
  if (H.rows() < 1) throw DimensionError("FactorPair: rank must be >= 1");
  require_shape(W, m, H.rows(), "FactorPair W");
  require_shape(H, H.rows(), n, "FactorPair H");
  require_nonnegative(W, "FactorPair W");
  require_nonnegative(H, "FactorPair H");
}

}  // namespace fairnmf
