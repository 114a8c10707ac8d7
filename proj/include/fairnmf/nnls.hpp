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

#ifndef FAIRNMF_NNLS_HPP_
#define FAIRNMF_NNLS_HPP_

#include <stdexcept>

#include "fairnmf/matrix.hpp"

namespace fairnmf {

class IllPosedError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// argmin over V >= 0 of ||B - A V||_F, one column of B at a time, by the
// Lawson-Hanson active-set method on the normal equations. A is m x r and
// must not have an all-zero column (IllPosedError otherwise); B is m x n.
// Returns V (r x n).
Matrix nnls(const Matrix& a, const Matrix& b);

// The same solve from precomputed Gram quantities: gram = A^T A (r x r) and
// rhs = A^T B (r x n). Used when A^T A is shared across many right-hand
// sides, e.g. the rows of W in an alternating step.
Matrix nnls_gram(const Matrix& gram, const Matrix& rhs);

// Largest violation of the optimality conditions for V with gradient
// G = A^T (A V - B): max over entries of -G where V == 0 and |G| where V > 0,
// plus any negative entry of V.
double nnls_kkt_violation(const Matrix& a, const Matrix& b, const Matrix& v);

}  // namespace fairnmf

#endif  // FAIRNMF_NNLS_HPP_
