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

#ifndef FAIRNMF_GROUPED_MATRIX_HPP_
#define FAIRNMF_GROUPED_MATRIX_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fairnmf/matrix.hpp"

namespace fairnmf {

struct Group {
  std::string label;
  std::vector<Index> rows;  // ascending indices into the full matrix
};

// A non-negative data matrix together with a partition of its rows into
// named groups. Groups are kept as index sets over the original matrix;
// blocks are gathered on demand. Immutable after construction.
class GroupedMatrix {
 public:
  // Validates the partition (disjoint, covering, non-empty groups), that the
  // data is non-negative, and that no group block is all zero.
  GroupedMatrix(Matrix data, std::vector<Group> groups);

  const Matrix& matrix() const { return data_; }
  Index rows() const { return data_.rows(); }
  Index cols() const { return data_.cols(); }

  std::size_t num_groups() const { return groups_.size(); }
  const Group& group(std::size_t l) const { return groups_.at(l); }
  const std::vector<Group>& groups() const { return groups_; }
  std::vector<std::string> labels() const;

  // Cached Frobenius norm of the group's row block.
  double norm(std::size_t l) const { return norms_.at(l); }
  const std::vector<double>& norms() const { return norms_; }

  // X restricted to the rows of group l.
  Matrix block(std::size_t l) const { return gather(data_, l); }

  // Rows of `full` (any matrix with rows() rows) belonging to group l.
  Matrix gather(const Matrix& full, std::size_t l) const;

  // Writes `block` back into the rows of `full` belonging to group l.
  void scatter(std::size_t l, const Matrix& block, Matrix& full) const;

 private:
  Matrix data_;
  std::vector<Group> groups_;
  std::vector<double> norms_;
};

// Groups are ordered by the first appearance of each label.
GroupedMatrix row_partition(const Matrix& x, std::span<const std::string> labels);

struct FactorPair {
  Matrix W;  // m x r
  Matrix H;  // r x n

  Index rank() const { return H.rows(); }

  // Throws DimensionError unless W is m x r and H is r x n, and both are
  // entrywise non-negative.
  void validate(Index m, Index n) const;
};

}  // namespace fairnmf

#endif  // FAIRNMF_GROUPED_MATRIX_HPP_
