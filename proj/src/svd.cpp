#include "lorank/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lorank/errors.hpp"

namespace lorank {

namespace {

// Column-major working copy: col[j] holds the j-th column, contiguous.
struct ColumnMatrix {
  std::size_t rows = 0;
  std::vector<std::vector<double>> cols;

  explicit ColumnMatrix(const DenseMatrix& m, bool transposed) {
    if (!transposed) {
      rows = m.rows();
      cols.assign(m.cols(), std::vector<double>(rows));
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) cols[j][i] = m(i, j);
    } else {
      rows = m.cols();
      cols.assign(m.rows(), std::vector<double>(rows));
      for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) cols[i][j] = m(i, j);
    }
  }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

// One-sided Jacobi on a tall (m >= n) column set. A's columns converge to
// U_j * sigma_j; V accumulates the right rotations starting from identity.
// Returns the number of sweeps used; throws when the cap is exceeded.
std::size_t jacobi_orthogonalize(ColumnMatrix& a, ColumnMatrix& v,
                                 std::size_t max_sweeps, double tol) {
  const std::size_t n = a.cols.size();
  if (n < 2) return 0;

  for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double alpha = dot(a.cols[i], a.cols[i]);
        const double beta = dot(a.cols[j], a.cols[j]);
        if (alpha == 0.0 || beta == 0.0) continue;
        const double g = dot(a.cols[i], a.cols[j]);
        if (std::abs(g) <= tol * std::sqrt(alpha * beta)) continue;

        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * g);
        const double t =
            (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;

        auto rotate = [c, s](std::vector<double>& x, std::vector<double>& y) {
          for (std::size_t r = 0; r < x.size(); ++r) {
            const double xi = x[r];
            const double yi = y[r];
            x[r] = c * xi - s * yi;
            y[r] = s * xi + c * yi;
          }
        };
        rotate(a.cols[i], a.cols[j]);
        rotate(v.cols[i], v.cols[j]);
      }
    }
    if (!rotated) return sweep;
  }
  throw numerical_error(
      "svd failed to converge after " + std::to_string(max_sweeps) + " sweeps",
      max_sweeps);
}

// Fills the null-space columns of u (marked by is_null) with deterministic
// orthonormal completions drawn from the canonical basis.
void complete_basis(std::vector<std::vector<double>>& u_cols,
                    const std::vector<bool>& is_null, std::size_t m) {
  std::size_t candidate = 0;
  for (std::size_t j = 0; j < u_cols.size(); ++j) {
    if (!is_null[j]) continue;
    while (true) {
      if (candidate >= m) {
        throw numerical_error("svd: exhausted basis candidates during completion");
      }
      std::vector<double> w(m, 0.0);
      w[candidate++] = 1.0;
      for (std::size_t k = 0; k < u_cols.size(); ++k) {
        if (k == j) continue;
        if (is_null[k] && k > j) continue;  // later null columns not yet filled
        const double proj = dot(w, u_cols[k]);
        for (std::size_t r = 0; r < m; ++r) w[r] -= proj * u_cols[k][r];
      }
      const double norm = std::sqrt(dot(w, w));
      if (norm > 0.5) {
        for (double& x : w) x /= norm;
        u_cols[j] = std::move(w);
        break;
      }
    }
  }
}

struct ThinFactors {
  std::vector<std::vector<double>> u_cols;  // m x k
  std::vector<double> sigma;                // k
  std::vector<std::vector<double>> v_cols;  // n x k (here k == n)
};

// Thin SVD of a tall matrix given as columns; m >= n assumed.
ThinFactors svd_tall(ColumnMatrix a, std::size_t max_sweeps, double tol) {
  const std::size_t m = a.rows;
  const std::size_t n = a.cols.size();

  ColumnMatrix v(DenseMatrix::identity(n), false);
  jacobi_orthogonalize(a, v, max_sweeps, tol);

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = std::sqrt(dot(a.cols[j], a.cols[j]));

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

  const double sigma_max = norms[order[0]];
  const double null_tol = sigma_max * 1e-14;

  ThinFactors f;
  f.sigma.resize(n);
  f.u_cols.resize(n);
  f.v_cols.resize(n);
  std::vector<bool> is_null(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t src = order[j];
    f.sigma[j] = norms[src];
    f.v_cols[j] = v.cols[src];
    if (sigma_max == 0.0 || norms[src] <= null_tol) {
      is_null[j] = true;
      f.u_cols[j].assign(m, 0.0);
    } else {
      f.u_cols[j] = a.cols[src];
      for (double& x : f.u_cols[j]) x /= norms[src];
    }
  }
  complete_basis(f.u_cols, is_null, m);
  return f;
}

DenseMatrix from_columns(const std::vector<std::vector<double>>& cols, std::size_t rows) {
  DenseMatrix m(rows, cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = cols[j][i];
  return m;
}

}  // namespace

std::size_t SvdFactors::rank_truncated(double rel_tol) const {
  if (sigma.empty() || sigma[0] == 0.0) return 0;
  std::size_t r = 0;
  while (r < sigma.size() && sigma[r] > rel_tol * sigma[0]) ++r;
  return r;
}

SvdFactors svd(const DenseMatrix& m, const SvdOptions& options) {
  if (m.rows() == 0 || m.cols() == 0) {
    throw invalid_input_error("svd: matrix must have at least one row and column");
  }
  m.require_finite("svd");

  const std::size_t k = std::min(m.rows(), m.cols());
  const std::size_t max_sweeps =
      options.max_sweeps > 0 ? options.max_sweeps : 100 * k;
  const bool wide = m.rows() < m.cols();

  ThinFactors f = svd_tall(ColumnMatrix(m, wide), max_sweeps, options.tolerance);

  SvdFactors out;
  out.sigma = std::move(f.sigma);
  if (!wide) {
    out.u = from_columns(f.u_cols, m.rows());
    out.v = from_columns(f.v_cols, m.cols());
  } else {
    // svd(Fᵀ) = (U', Σ, V') gives F = V' Σ U'ᵀ.
    out.u = from_columns(f.v_cols, m.rows());
    out.v = from_columns(f.u_cols, m.cols());
  }

  // Sign convention: first nonzero entry of each V column is non-negative.
  for (std::size_t j = 0; j < k; ++j) {
    for (std::size_t i = 0; i < out.v.rows(); ++i) {
      const double x = out.v(i, j);
      if (x == 0.0) continue;
      if (x < 0.0) {
        for (std::size_t r = 0; r < out.v.rows(); ++r) out.v(r, j) = -out.v(r, j);
        for (std::size_t r = 0; r < out.u.rows(); ++r) out.u(r, j) = -out.u(r, j);
      }
      break;
    }
  }

  if (!out.u.all_finite() || !out.v.all_finite()) {
    throw numerical_error("svd: factors contain non-finite values");
  }
  return out;
}

SvdFactors svd(const DenseMatrix& m) { return svd(m, SvdOptions{}); }

std::vector<double> kernel_eigenvalues(const DenseMatrix& f) {
  f.require_finite("kernel_eigenvalues");
  const auto factors = svd(f);
  const double inv_n = 1.0 / static_cast<double>(f.rows());
  std::vector<double> lambda(factors.sigma.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    lambda[i] = factors.sigma[i] * factors.sigma[i] * inv_n;
  }
  return lambda;
}

}  // namespace lorank
