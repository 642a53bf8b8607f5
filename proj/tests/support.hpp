// Copyright 2026 The mpjc Authors
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


#ifndef MPJC_TESTS_SUPPORT_HPP
#define MPJC_TESTS_SUPPORT_HPP

#include <complex>
#include <random>
#include <vector>

#include "mpjc/tensor.hpp"

namespace mpjc::testing {

using Dense = std::vector<std::vector<Complex>>;

inline Complex random_complex(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return {u(rng), u(rng)};
}

/// Random sparse operator with roughly `fill` of its entries set.
inline SparseOperator random_operator(std::mt19937_64& rng, Index rows, Index cols,
                                      double fill = 0.5) {
  std::bernoulli_distribution keep(fill);
  std::vector<Eigen::Triplet<Complex>> t;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      if (keep(rng)) t.emplace_back(i, j, random_complex(rng));
    }
  }
  return from_triplets(rows, cols, t);
}

inline DenseVector random_vector(std::mt19937_64& rng, Index n) {
  DenseVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = random_complex(rng);
  return v;
}

inline Dense to_nested(const SparseOperator& op) {
  Dense out(static_cast<std::size_t>(op.rows()),
            std::vector<Complex>(static_cast<std::size_t>(op.cols())));
  for (Index r = 0; r < op.outerSize(); ++r) {
    for (SparseOperator::InnerIterator it(op, r); it; ++it) {
      out[static_cast<std::size_t>(it.row())][static_cast<std::size_t>(it.col())] = it.value();
    }
  }
  return out;
}

inline double max_diff(const SparseOperator& op, const Dense& ref) {
  const Dense got = to_nested(op);
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    for (std::size_t j = 0; j < ref[i].size(); ++j) worst = std::max(worst, std::abs(got[i][j] - ref[i][j]));
  }
  return worst;
}

/// Gaussian elimination with partial pivoting on a nested copy.
inline std::vector<Complex> gauss_solve(Dense a, std::vector<Complex> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    std::swap(a[col], a[piv]);
    std::swap(b[col], b[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const Complex f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<Complex> x(n);
  for (std::size_t i = n; i-- > 0;) {
    Complex s = b[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= a[i][c] * x[c];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace mpjc::testing

#endif  // MPJC_TESTS_SUPPORT_HPP
