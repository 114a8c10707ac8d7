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

#include "fairnmf/matrix.hpp"

#include <cmath>
#include <random>

namespace fairnmf {

double frobenius_norm(const Matrix& m) {
  if (m.size() == 0) {
    throw DimensionError("frobenius_norm: empty matrix");
  }
  return m.norm();
}

Matrix random_nonneg(Index rows, Index cols, std::uint64_t seed) {
  if (rows < 1 || cols < 1) {
    throw DimensionError("random_nonneg: dimensions must be >= 1, got " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  std::mt19937_64 engine(seed);
  Matrix out(rows, cols);
  double* data = out.data();
  for (Index i = 0; i < out.size(); ++i) {
    data[i] = static_cast<double>(engine() >> 11) * 0x1.0p-53;
  }
  return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  return base + (index + 1) * 0x9E3779B97F4A7C15ULL;
}

void require_nonnegative(const Matrix& m, std::string_view name) {
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw DimensionError(std::string(name) + ": entry (" + std::to_string(i) +
                             ", " + std::to_string(j) +
                             ") is negative or not finite");
      }
    }
  }
}

void require_shape(const Matrix& m, Index rows, Index cols, std::string_view name) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(name) + ": expected " + std::to_string(rows) +
                         "x" + std::to_string(cols) + ", got " + shape_string(m));
  }
}

std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace fairnmf
