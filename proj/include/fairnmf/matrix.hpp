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

#ifndef FAIRNMF_MATRIX_HPP_
#define FAIRNMF_MATRIX_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace fairnmf {

// Dense row-major storage for X, W and H. The data sets handled here are
// small and dense, so there is no sparse path.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateGroupError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Frobenius norm, sqrt(sum of squared entries). Throws DimensionError on an
// empty matrix.
double frobenius_norm(const Matrix& m);

// Entries i.i.d. uniform on [0, 1), drawn from std::mt19937_64 seeded with
// `seed`. Each 64-bit draw is mapped to a double by taking its top 53 bits
// and scaling by 2^-53, so the output is bit-identical on every platform.
// Entries are produced in row-major order.
Matrix random_nonneg(Index rows, Index cols, std::uint64_t seed);

// Seed for the `index`-th derived stream of `base`. Streams are separated by
// a fixed odd offset (the 64-bit golden ratio) so that trials, baseline runs
// and factor initializations never share a generator state.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Throws DimensionError if any entry is negative or not finite.
void require_nonnegative(const Matrix& m, std::string_view name);

// Throws DimensionError unless m is rows x cols.
void require_shape(const Matrix& m, Index rows, Index cols, std::string_view name);

std::string shape_string(const Matrix& m);

}  // namespace fairnmf

#endif  // FAIRNMF_MATRIX_HPP_
