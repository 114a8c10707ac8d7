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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "fairnmf/grouped_matrix.hpp"
#include "fairnmf/matrix.hpp"

namespace fairnmf {
namespace {

Matrix make(Index rows, Index cols, std::vector<double> v) {
  return Eigen::Map<Matrix>(v.data(), rows, cols);
}

TEST(FrobeniusNorm, HandValues) {
  EXPECT_DOUBLE_EQ(frobenius_norm(make(1, 2, {3, 4})), 5.0);
  EXPECT_DOUBLE_EQ(frobenius_norm(Matrix::Identity(2, 2)), std::sqrt(2.0));
  // 1 + 4 + 9 + 16 = 30, summed independently of Eigen.
  const std::vector<double> v{1, 2, 3, 4};
  double ss = 0.0;
  for (double x : v) ss += x * x;
  EXPECT_NEAR(frobenius_norm(make(2, 2, v)), std::sqrt(ss), 1e-15);
  EXPECT_DOUBLE_EQ(ss, 30.0);
}

TEST(FrobeniusNorm, AbsoluteHomogeneity) {
  const Matrix m = random_nonneg(7, 5, 11);
  for (double c : {-3.5, -1.0, 0.25, 2.0, 1e6}) {
    const double lhs = frobenius_norm(c * m);
    const double rhs = std::abs(c) * frobenius_norm(m);
    EXPECT_NEAR(lhs, rhs, 1e-12 * rhs);
  }
}

TEST(FrobeniusNorm, EmptyThrows) {
  EXPECT_THROW(frobenius_norm(Matrix(0, 3)), DimensionError);
}

TEST(RandomNonneg, Deterministic) {
  EXPECT_EQ(random_nonneg(2, 2, 7), random_nonneg(2, 2, 7));
  EXPECT_NE(random_nonneg(2, 2, 7), random_nonneg(2, 2, 8));
}

TEST(RandomNonneg, Range) {
  const Matrix m = random_nonneg(100, 100, 1);
  EXPECT_GE(m.minCoeff(), 0.0);
  EXPECT_LT(m.maxCoeff(), 1.0);
}

TEST(RandomNonneg, SampleMean) {
  const Matrix m = random_nonneg(1000, 20, 3);
  double sum = 0.0;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) sum += m(i, j);
  }
  EXPECT_NEAR(sum / 20000.0, 0.5, 0.02);
}

TEST(RandomNonneg, PinnedStream) {
  // mt19937_64 seeded with 0, first draw, top 53 bits scaled to [0, 1).
  std::mt19937_64 eng(0);
  const double expected = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  EXPECT_EQ(random_nonneg(1, 1, 0)(0, 0), expected);
}

TEST(DeriveSeed, DistinctIndices) {
  EXPECT_NE(derive_seed(5, 0), derive_seed(5, 1));
  EXPECT_NE(derive_seed(5, 0), derive_seed(6, 0));
  EXPECT_EQ(derive_seed(5, 3), derive_seed(5, 3));
}

TEST(RowPartition, FirstAppearanceOrder) {
  const Matrix x = make(3, 2, {1, 2, 3, 4, 5, 6});
  const std::vector<std::string> labels{"a", "b", "a"};
  const GroupedMatrix g = row_partition(x, labels);
  ASSERT_EQ(g.num_groups(), 2u);
  EXPECT_EQ(g.group(0).label, "a");
  EXPECT_EQ(g.group(0).rows, (std::vector<Index>{0, 2}));
  EXPECT_EQ(g.group(1).label, "b");
  EXPECT_EQ(g.group(1).rows, (std::vector<Index>{1}));
}

TEST(RowPartition, SingleLabel) {
  const Matrix x = random_nonneg(4, 3, 2);
  const std::vector<std::string> labels(4, "all");
  const GroupedMatrix g = row_partition(x, labels);
  ASSERT_EQ(g.num_groups(), 1u);
  EXPECT_EQ(g.group(0).rows.size(), 4u);
}

TEST(RowPartition, CachedNormsMatchBlocks) {
  const Matrix x = make(4, 2, {1, 2, 0, 3, 4, 0, 1, 1});
  const std::vector<std::string> labels{"f", "f", "m", "m"};
  const GroupedMatrix g = row_partition(x, labels);
  EXPECT_NEAR(g.norm(0), std::sqrt(1.0 + 4 + 0 + 9), 1e-15);
  EXPECT_NEAR(g.norm(1), std::sqrt(16.0 + 0 + 1 + 1), 1e-15);
}

TEST(RowPartition, ZeroBlockIsDegenerate) {
  const Matrix x = make(3, 2, {1, 2, 0, 0, 3, 4});
  const std::vector<std::string> labels{"a", "b", "a"};
  EXPECT_THROW(row_partition(x, labels), DegenerateGroupError);
}

TEST(RowPartition, LabelCountMismatch) {
  const std::vector<std::string> labels{"a"};
  EXPECT_THROW(row_partition(random_nonneg(2, 2, 0), labels), DimensionError);
}

TEST(GroupedMatrix, RejectsBadPartitions) {
  const Matrix x = random_nonneg(3, 2, 4);
  EXPECT_THROW(GroupedMatrix(x, {{"a", {0, 1}}, {"b", {1, 2}}}), std::invalid_argument);
  EXPECT_THROW(GroupedMatrix(x, {{"a", {0}}, {"b", {2}}}), std::invalid_argument);
  EXPECT_THROW(GroupedMatrix(x, {{"a", {0, 1, 2}}, {"b", {}}}), std::invalid_argument);
  EXPECT_THROW(GroupedMatrix(x, {}), std::invalid_argument);
  Matrix neg = x;
  neg(1, 1) = -0.5;
  EXPECT_THROW(GroupedMatrix(neg, {{"a", {0, 1, 2}}}), std::invalid_argument);
}

TEST(GroupedMatrix, BlocksReassembleRowPermutation) {
  const Matrix x = random_nonneg(9, 4, 21);
  const std::vector<std::string> labels{"c", "a", "b", "a", "c", "c", "b", "a", "b"};
  const GroupedMatrix g = row_partition(x, labels);
  Matrix rebuilt = Matrix::Zero(9, 4);
  for (std::size_t l = 0; l < g.num_groups(); ++l) {
    const Matrix b = g.block(l);
    for (std::size_t i = 0; i < g.group(l).rows.size(); ++i) {
      EXPECT_EQ(b.row(static_cast<Index>(i)), x.row(g.group(l).rows[i]));
    }
    g.scatter(l, b, rebuilt);
  }
  EXPECT_EQ(rebuilt, x);
}

TEST(FactorPair, Validate) {
  FactorPair f{random_nonneg(5, 2, 1), random_nonneg(2, 3, 2)};
  EXPECT_NO_THROW(f.validate(5, 3));
  EXPECT_EQ(f.rank(), 2);
  EXPECT_THROW(f.validate(4, 3), DimensionError);
  f.H(0, 0) = -1e-300;
  EXPECT_THROW(f.validate(5, 3), DimensionError);
}

}  // namespace
}  // namespace fairnmf
