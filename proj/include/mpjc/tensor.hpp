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

#ifndef MPJC_TENSOR_HPP
#define MPJC_TENSOR_HPP

// Numerical substrate: complex dense/sparse containers, Kronecker products,
// sparse matrix-vector products and a direct sparse solver. Nothing in here
// knows about photons.

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "mpjc/error.hpp"

namespace mpjc {

using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Compressed-row sparse matrix with sorted column indices.
using SparseOperator = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using DenseVector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;

/// Entries with magnitude at or below this are dropped after arithmetic.
inline constexpr double kZeroThreshold = 1e-14;

/// Upper bound on rows/cols of any operator we are willing to build.
inline constexpr Index kMaxDimension = Index{1} << 26;

inline constexpr Complex kI{0.0, 1.0};

inline bool is_finite(Complex z) noexcept {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

inline void purge(SparseOperator& op, double threshold = kZeroThreshold) {
  op.prune([threshold](Index, Index, const Complex& v) { return !(std::abs(v) <= threshold); });
  op.makeCompressed();
}

inline void require_finite(const SparseOperator& op, const char* what = "operator") {
  for (Index r = 0; r < op.outerSize(); ++r) {
    for (SparseOperator::InnerIterator it(op, r); it; ++it) {
      if (!is_finite(it.value())) {
        std::ostringstream msg;
        msg << what << " has a non-finite entry at (" << it.row() << ", " << it.col() << ")";
        throw NumericalError(msg.str());
      }
    }
  }
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what = "array") {
  if (!m.allFinite()) throw NumericalError(std::string(what) + " has non-finite entries");
}

inline SparseOperator identity(Index n) {
  SparseOperator id(n, n);
  id.setIdentity();
  return id;
}

inline SparseOperator from_triplets(Index rows, Index cols,
                                    const std::vector<Eigen::Triplet<Complex>>& entries) {
  SparseOperator op(rows, cols);
  op.setFromTriplets(entries.begin(), entries.end());
  purge(op);
  return op;
}

inline SparseOperator adjoint(const SparseOperator& op) {
  SparseOperator out = op.adjoint();
  out.makeCompressed();
  return out;
}

/// Kronecker product; entry (i1*rows_b + i2, j1*cols_b + j2) = a(i1,j1) * b(i2,j2).
inline SparseOperator kron(const SparseOperator& a, const SparseOperator& b,
                           Index max_dimension = kMaxDimension) {
  const Index rows = a.rows() * b.rows();
  const Index cols = a.cols() * b.cols();
  if ((a.rows() != 0 && rows / a.rows() != b.rows()) || rows > max_dimension ||
      cols > max_dimension) {
    std::ostringstream msg;
    msg << "kron: result " << rows << "x" << cols << " exceeds maximum dimension "
        << max_dimension;
    throw DimensionError(msg.str());
  }
  SparseOperator out(rows, cols);
  Eigen::VectorXi per_row(rows);
  for (Index i1 = 0; i1 < a.rows(); ++i1) {
    const Index na = a.outerIndexPtr()[i1 + 1] - a.outerIndexPtr()[i1];
    for (Index i2 = 0; i2 < b.rows(); ++i2) {
      const Index nb = b.outerIndexPtr()[i2 + 1] - b.outerIndexPtr()[i2];
      per_row(i1 * b.rows() + i2) = static_cast<int>(na * nb);
    }
  }
  out.reserve(per_row);
  // Row-major iteration over (j1, j2) with both inner lists sorted yields
  // sorted columns, so insertBack-style filling stays cheap.
  for (Index i1 = 0; i1 < a.rows(); ++i1) {
    for (Index i2 = 0; i2 < b.rows(); ++i2) {
      const Index row = i1 * b.rows() + i2;
      for (SparseOperator::InnerIterator ia(a, i1); ia; ++ia) {
        for (SparseOperator::InnerIterator ib(b, i2); ib; ++ib) {
          out.insert(row, ia.col() * b.cols() + ib.col()) = ia.value() * ib.value();
        }
      }
    }
  }
  purge(out);
  return out;
}

inline DenseVector matvec(const SparseOperator& op, const DenseVector& v) {
  if (op.cols() != v.size()) {
    std::ostringstream msg;
    msg << "matvec: operator has " << op.cols() << " columns, vector has " << v.size();
    throw DimensionError(msg.str());
  }
  return op * v;
}

/// Largest |a(i,j) - conj(a(j,i))|.
inline double hermiticity_error(const SparseOperator& op) {
  if (op.rows() != op.cols()) return std::numeric_limits<double>::infinity();
  SparseOperator diff = op - SparseOperator(op.adjoint());
  double worst = 0.0;
  for (Index k = 0; k < diff.nonZeros(); ++k) worst = std::max(worst, std::abs(diff.valuePtr()[k]));
  return worst;
}

inline double max_abs(const SparseOperator& op) {
  double worst = 0.0;
  for (Index k = 0; k < op.nonZeros(); ++k) worst = std::max(worst, std::abs(op.valuePtr()[k]));
  return worst;
}

inline SparseOperator power(const SparseOperator& op, int exponent) {
  if (op.rows() != op.cols()) throw DimensionError("power: operator is not square");
  if (exponent < 0) throw DimensionError("power: negative exponent");
  SparseOperator out = identity(op.rows());
  for (int i = 0; i < exponent; ++i) {
    out = out * op;
    purge(out);
  }
  return out;
}

/// Relative residual ||a x - rhs||_2 / max(1, ||rhs||_2) accepted by solve_sparse.
inline constexpr double kSolveResidualTolerance = 1e-10;

/// Direct sparse LU (COLAMD ordering, partial pivoting) followed by a residual check.
inline DenseVector solve_sparse(const SparseOperator& a, const DenseVector& rhs) {
  if (a.rows() != a.cols()) throw DimensionError("solve_sparse: matrix is not square");
  if (rhs.size() != a.rows()) {
    std::ostringstream msg;
    msg << "solve_sparse: rhs has " << rhs.size() << " entries, matrix has " << a.rows()
        << " rows";
    throw DimensionError(msg.str());
  }
  using ColMajor = Eigen::SparseMatrix<Complex, Eigen::ColMajor>;
  ColMajor a_col = a;
  a_col.makeCompressed();
  Eigen::SparseLU<ColMajor, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a_col);
  lu.factorize(a_col);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("solve_sparse: matrix is singular to working precision (" +
                         lu.lastErrorMessage() + ")");
  }
  DenseVector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw NumericalError("solve_sparse: back-substitution failed");
  }
  const double residual = (a * x - rhs).norm() / std::max(1.0, rhs.norm());
  if (!(residual <= kSolveResidualTolerance)) {
    std::ostringstream msg;
    msg << "solve_sparse: relative residual " << residual << " exceeds "
        << kSolveResidualTolerance;
    throw NumericalError(msg.str());
  }
  return x;
}

}  // namespace mpjc

#endif  // MPJC_TENSOR_HPP
