#include "lorank/analysis.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lorank/errors.hpp"
#include "lorank/svd.hpp"

namespace lorank {

namespace {

constexpr double kRankTolerance = 1e-10;

}  // namespace

std::vector<double> eigen_projection(const DenseMatrix& f, const DenseMatrix& y) {
  if (f.rows() != y.rows()) {
    throw shape_error("eigen_projection: feature and label row counts differ");
  }
  if (y.cols() == 0) throw invalid_input_error("eigen_projection: no label columns");

  const SvdFactors factors = svd(f);
  const std::size_t k = factors.sigma.size();
  const std::size_t n = f.rows();
  const std::size_t classes = y.cols();

  std::vector<double> norms(classes, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < classes; ++c) norms[c] += y(i, c) * y(i, c);
  for (std::size_t c = 0; c < classes; ++c) {
    if (norms[c] == 0.0) {
      throw invalid_input_error("eigen_projection: label column " +
                                std::to_string(c) + " is all zero");
    }
  }

  std::vector<double> p(k, 0.0);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < classes; ++c) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += factors.u(i, r) * y(i, c);
      p[r] += dot * dot / norms[c];
    }
    p[r] /= static_cast<double>(classes);
  }
  return p;
}

double signal_concentration(const std::vector<double>& p, std::size_t r,
                            ConcentrationNorm norm) {
  if (r > p.size()) {
    throw invalid_input_error("signal_concentration: rank exceeds projection length");
  }
  if (norm == ConcentrationNorm::partial_sum) {
    double sum = 0.0;
    for (std::size_t i = 0; i < r; ++i) sum += p[i];
    return sum;
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < r; ++i) sq += p[i] * p[i];
  return std::sqrt(sq);
}

std::pair<double, std::size_t> kernel_complexity(
    const std::vector<double>& eigenvalues, std::size_t n) {
  if (n == 0) throw invalid_input_error("kernel_complexity: n must be >= 1");
  const double slack =
      1e-12 * (eigenvalues.empty() ? 1.0 : std::max(1.0, eigenvalues.front()));
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    if (eigenvalues[i] < -slack) {
      throw invalid_input_error("kernel_complexity: negative eigenvalue");
    }
    if (i + 1 < eigenvalues.size() &&
        eigenvalues[i + 1] > eigenvalues[i] + slack) {
      throw invalid_input_error("kernel_complexity: eigenvalues must be non-increasing");
    }
  }

  // Suffix sums so each candidate h is O(1); clamp tiny negatives to zero.
  std::vector<double> tail(eigenvalues.size() + 1, 0.0);
  for (std::size_t i = eigenvalues.size(); i-- > 0;) {
    tail[i] = tail[i + 1] + std::max(0.0, eigenvalues[i]);
  }

  double best = std::numeric_limits<double>::infinity();
  std::size_t best_h = 0;
  for (std::size_t h = 0; h <= eigenvalues.size(); ++h) {
    const double value = static_cast<double>(h) / static_cast<double>(n) +
                         std::sqrt(tail[h] / static_cast<double>(n));
    if (value < best) {
      best = value;
      best_h = h;
    }
  }
  return {best, best_h};
}

RemarkGap remark1_gap(const DenseMatrix& f, std::size_t t) {
  const std::size_t k = std::min(f.rows(), f.cols());
  if (t > k) throw invalid_input_error("remark1_gap: t exceeds min(n, d)");

  const SvdFactors factors = svd(f);
  const double n = static_cast<double>(f.rows());
  double lambda_tail = 0.0;
  double sigma_tail = 0.0;
  for (std::size_t i = t; i < factors.sigma.size(); ++i) {
    lambda_tail += factors.sigma[i] * factors.sigma[i] / n;
    sigma_tail += factors.sigma[i];
  }
  RemarkGap gap;
  gap.lhs = std::sqrt(lambda_tail / n);
  gap.rhs = sigma_tail / n;
  gap.holds = gap.lhs <= gap.rhs + 1e-10;
  return gap;
}

BoundTerms bound_terms(const DenseMatrix& f, const DenseMatrix& y, double lr,
                       std::size_t t, const BoundConstants& constants) {
  if (f.rows() != y.rows()) {
    throw shape_error("bound_terms: feature and label row counts differ");
  }
  if (t < 1) throw invalid_input_error("bound_terms: iteration count t must be >= 1");
  if (!(lr > 0.0)) throw invalid_input_error("bound_terms: learning rate must be > 0");

  const SvdFactors factors = svd(f);
  const std::size_t n = f.rows();
  const std::size_t r = factors.rank_truncated(kRankTolerance);

  BoundTerms out;
  out.constants = constants;
  out.rank_used = r;

  // Label residual: Y minus its projection onto the top-r left singular
  // vectors. With r = 0 the projection is empty and the residual is ||Y||_F.
  double residual_sq = 0.0;
  {
    // proj = U_r (U_r^T Y); accumulate ||Y - proj||_F^2 column block-wise.
    DenseMatrix uty(r, y.cols());
    for (std::size_t s = 0; s < r; ++s)
      for (std::size_t c = 0; c < y.cols(); ++c) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += factors.u(i, s) * y(i, c);
        uty(s, c) = dot;
      }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < y.cols(); ++c) {
        double proj = 0.0;
        for (std::size_t s = 0; s < r; ++s) proj += factors.u(i, s) * uty(s, c);
        const double diff = y(i, c) - proj;
        residual_sq += diff * diff;
      }
    }
  }
  out.label_residual = std::sqrt(residual_sq);

  const double y_norm = frobenius_norm(y);
  const double lambda_r =
      r == 0 ? 0.0
             : factors.sigma[r - 1] * factors.sigma[r - 1] / static_cast<double>(n);
  out.optimization_term =
      std::pow(1.0 - lr * lambda_r, 2.0 * static_cast<double>(t)) * y_norm * y_norm;

  std::vector<double> lambda(factors.sigma.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    lambda[i] = factors.sigma[i] * factors.sigma[i] / static_cast<double>(n);
  }
  out.complexity_term = kernel_complexity(lambda, n).first;
  out.confidence_term = constants.x / static_cast<double>(n);
  out.total = out.label_residual + constants.c1 * out.optimization_term +
              constants.c2 * out.complexity_term +
              constants.c3 * out.confidence_term;
  return out;
}

SpectrumReport spectrum_report(const DenseMatrix& f, const DenseMatrix& y) {
  SpectrumReport report;
  report.eigen_projection = eigen_projection(f, y);

  const SvdFactors factors = svd(f);
  const std::size_t k = factors.sigma.size();
  const std::size_t n = f.rows();

  report.concentration.resize(k);
  double run = 0.0;
  for (std::size_t r = 0; r < k; ++r) {
    run += report.eigen_projection[r];
    report.concentration[r] = run;
  }

  report.eigenvalues.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    report.eigenvalues[i] =
        factors.sigma[i] * factors.sigma[i] / static_cast<double>(n);
  }

  const auto [value, argmin] = kernel_complexity(report.eigenvalues, n);
  report.complexity_value = value;
  report.complexity_argmin_h = argmin;

  report.tail_sigma_sum.assign(k + 1, 0.0);
  for (std::size_t t = k; t-- > 0;) {
    report.tail_sigma_sum[t] = report.tail_sigma_sum[t + 1] + factors.sigma[t];
  }
  return report;
}

}  // namespace lorank
