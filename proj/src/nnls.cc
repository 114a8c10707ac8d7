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

#include "fairnmf/nnls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fairnmf {
namespace {

// Solves gram[P,P] s_P = rhs[P] for the passive set P; s is zero elsewhere.
Vector solve_passive(const Matrix& gram, const Vector& rhs,
                     const std::vector<Index>& passive) {
  const Index k = static_cast<Index>(passive.size());
  Eigen::MatrixXd sub(k, k);
  Vector sub_rhs(k);
  for (Index i = 0; i < k; ++i) {
    sub_rhs(i) = rhs(passive[i]);
    for (Index j = 0; j < k; ++j) sub(i, j) = gram(passive[i], passive[j]);
  }
  const Vector sol = sub.ldlt().solve(sub_rhs);
  Vector s = Vector::Zero(gram.rows());
  for (Index i = 0; i < k; ++i) s(passive[i]) = sol(i);
  return s;
}

Vector solve_column(const Matrix& gram, const Vector& rhs) {
  const Index r = gram.rows();
  const double scale =
      std::max({1.0, rhs.cwiseAbs().maxCoeff(), gram.cwiseAbs().maxCoeff()});
  const double tol = 1e-13 * scale;

  Vector x = Vector::Zero(r);
  std::vector<char> in_passive(static_cast<std::size_t>(r), 0);
  std::vector<char> blocked(static_cast<std::size_t>(r), 0);
  Vector w = rhs;
  const int max_outer = 10 * static_cast<int>(r) + 50;

  for (int outer = 0; outer < max_outer; ++outer) {
    Index enter = -1;
    double best = tol;
    for (Index i = 0; i < r; ++i) {
      if (!in_passive[i] && !blocked[i] && w(i) > best) {
        best = w(i);
        enter = i;
      }
    }
    if (enter < 0) break;
    in_passive[enter] = 1;

    for (int inner = 0; inner <= r; ++inner) {
      std::vector<Index> passive;
      for (Index i = 0; i < r; ++i) {
        if (in_passive[i]) passive.push_back(i);
      }
      Vector s = solve_passive(gram, rhs, passive);
      bool feasible = true;
      for (Index i : passive) feasible = feasible && s(i) > 0.0;
      if (feasible) {
        x = s;
        break;
      }
      // Step from x toward s until the first passive variable hits zero.
      double alpha = 1.0;
      Index limiting = -1;
      for (Index i : passive) {
        if (s(i) <= 0.0) {
          const double a = x(i) / (x(i) - s(i));
          if (a < alpha) {
            alpha = a;
            limiting = i;
          }
        }
      }
      x += alpha * (s - x);
      for (Index i : passive) {
        if (i == limiting || x(i) <= 0.0) {
          in_passive[i] = 0;
          x(i) = 0.0;
        }
      }
    }
    // The entering variable was dropped straight away: rounding made its
    // gradient look positive. Exclude it until the active set changes.
    if (!in_passive[enter]) {
      blocked[enter] = 1;
    } else {
      std::fill(blocked.begin(), blocked.end(), 0);
    }
    w = rhs - gram * x;
  }
  return x;
}

}  // namespace

Matrix nnls_gram(const Matrix& gram, const Matrix& rhs) {
  if (gram.rows() != gram.cols() || gram.rows() != rhs.rows()) {
    throw DimensionError("nnls_gram: gram " + shape_string(gram) + ", rhs " +
                         shape_string(rhs));
  }
  for (Index k = 0; k < gram.rows(); ++k) {
    if (!(gram(k, k) > 0.0)) {
      throw IllPosedError("nnls: column " + std::to_string(k) +
                          " of the design matrix is all zero");
    }
  }
  Matrix out(gram.rows(), rhs.cols());
  for (Index j = 0; j < rhs.cols(); ++j) {
    out.col(j) = solve_column(gram, rhs.col(j));
  }
  return out;
}

Matrix nnls(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.size() == 0 || b.cols() == 0) {
    throw DimensionError("nnls: A " + shape_string(a) + ", B " + shape_string(b));
  }
  const Matrix gram = a.transpose() * a;
  const Matrix rhs = a.transpose() * b;
  return nnls_gram(gram, rhs);
}

double nnls_kkt_violation(const Matrix& a, const Matrix& b, const Matrix& v) {
  const Matrix g = a.transpose() * (a * v - b);
  double worst = 0.0;
  for (Index i = 0; i < v.rows(); ++i) {
    for (Index j = 0; j < v.cols(); ++j) {
      if (v(i, j) < 0.0) {
        worst = std::max(worst, -v(i, j));
      } else if (v(i, j) == 0.0) {
        worst = std::max(worst, -g(i, j));
      } else {
        worst = std::max(worst, std::abs(g(i, j)));
      }
    }
  }
  return worst;
}

}  // namespace fairnmf
