#pragma once

#include <cstddef>
#include <vector>

#include "lorank/matrix.hpp"

namespace lorank {

/// Thin SVD factors F = U diag(sigma) Vᵀ with k = min(rows, cols).
/// U is n×k and V is d×k, both with orthonormal columns; sigma is
/// non-negative and sorted non-increasing. Columns follow a fixed sign
/// convention (first nonzero entry of each V column is non-negative) so
/// factor snapshots are reproducible across runs.
struct SvdFactors {
  DenseMatrix u;
  std::vector<double> sigma;
  DenseMatrix v;

  std::size_t rank_truncated(double rel_tol) const;
};

struct SvdOptions {
  /// 0 means the default cap of 100 * min(n, d) sweeps.
  std::size_t max_sweeps = 0;
  /// Relative off-diagonal tolerance for declaring a column pair orthogonal.
  double tolerance = 1e-12;
};

/// Deterministic one-sided Jacobi SVD. Throws invalid_input_error on
/// non-finite input and numerical_error (with the sweep count) if the
/// rotation sweeps do not converge within the cap.
SvdFactors svd(const DenseMatrix& m, const SvdOptions& options);
SvdFactors svd(const DenseMatrix& m);

/// Eigenvalues of the kernel gram matrix K_n = (1/n) F Fᵀ, computed as
/// sigma_i² / n from the SVD of f. Non-increasing, length min(n, d).
std::vector<double> kernel_eigenvalues(const DenseMatrix& f);

}  // namespace lorank
