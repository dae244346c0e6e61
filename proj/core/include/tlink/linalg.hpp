#pragma once

#include "tlink/tensor.hpp"

namespace tlink {

/// Moore-Penrose pseudo-inverse via SVD. Singular values below
/// rel_tol * sigma_max are treated as zero. rel_tol < 0 selects the default
/// 1e-12 * max(rows, cols).
Mat pinv(const Mat& m, double rel_tol = -1.0);

/// Singular values of m (descending).
Eigen::VectorXd singular_values(const Mat& m);

/// Numerical rank with threshold rel_tol * sigma_max.
Index numerical_rank(const Mat& m, double rel_tol = 1e-8);

/// Factors of a least-squares Khatri-Rao factorization y ~ right kr left.
/// Columns carry a reciprocal complex scale ambiguity: (left / s, right * s)
/// reconstructs identically.
struct KrfResult {
  Mat left;   // k x R, the inner (fast-index) factor
  Mat right;  // q x R, the outer (slow-index) factor
};

/// Least-squares Khatri-Rao factorization. y has q*k rows; column r is
/// reshaped into a k-by-q matrix (column-major, the vec layout of
/// kron(right_col, left_col)) and rank-one approximated by its dominant
/// singular triplet. The balanced scale split sqrt(sigma) goes to each side.
/// A zero column yields zero factor columns.
KrfResult lskrf(const Mat& y, Index q, Index k);

}  // namespace tlink
