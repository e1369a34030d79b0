#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "lorank/matrix.hpp"

namespace lorank {

/// How signal_concentration aggregates the eigen-projection entries.
/// partial_sum reads the entries as energy fractions (default); l2 takes the
/// Euclidean norm of the prefix instead.
enum class ConcentrationNorm { partial_sum, l2 };

/// Per-eigenvector fraction of squared label energy: p_r = (1/C) * sum_c
/// (u_r . y_c)^2 / ||y_c||^2, where u_r is the r-th eigenvector of the
/// kernel gram matrix (equivalently the r-th left singular vector of f).
/// Throws on a zero label column.
std::vector<double> eigen_projection(const DenseMatrix& f, const DenseMatrix& y);

/// Cumulative label energy captured by the top-r eigenvectors.
double signal_concentration(const std::vector<double>& p, std::size_t r,
                            ConcentrationNorm norm = ConcentrationNorm::partial_sum);

/// Exhaustive minimization of h/n + sqrt((1/n) * sum_{i>h} lambda_i) over
/// h = 0..len(lambda); ties broken toward the smaller h.
std::pair<double, std::size_t> kernel_complexity(
    const std::vector<double>& eigenvalues, std::size_t n);

/// Both sides of the tail comparison sqrt((1/n) sum_{i>T} lambda_i) vs
/// (1/n) sum_{i>T} sigma_i, with holds = (lhs <= rhs + 1e-10).
struct RemarkGap {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};
RemarkGap remark1_gap(const DenseMatrix& f, std::size_t t);

struct BoundConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double x = 1.0;  // confidence parameter; term is x/n
};

struct BoundTerms {
  double label_residual = 0.0;     // ||Y - projection of Y onto top-r̄ U||_F
  double optimization_term = 0.0;  // (1 - lr*lambda_r)^(2t) * ||Y||_F^2
  double complexity_term = 0.0;    // min_h (h/n + sqrt((1/n) sum_{i>h} lambda_i))
  double confidence_term = 0.0;    // x/n
  double total = 0.0;              // residual + c1*opt + c2*cplx + c3*conf
  std::size_t rank_used = 0;       // numerical rank r̄ of the kernel gram
  BoundConstants constants;
};

/// Computable terms of the generalization bound. r̄ counts singular values
/// above 1e-10 * sigma_1; lambda_r is the smallest kept kernel eigenvalue.
/// Requires t >= 1 and lr > 0.
BoundTerms bound_terms(const DenseMatrix& f, const DenseMatrix& y, double lr,
                       std::size_t t, const BoundConstants& constants = {});

struct SpectrumReport {
  std::vector<double> eigen_projection;  // p, length k
  std::vector<double> concentration;     // partial sums of p, ranks 1..k
  std::vector<double> eigenvalues;       // kernel eigenvalues, length k
  double complexity_value = 0.0;
  std::size_t complexity_argmin_h = 0;
  std::vector<double> tail_sigma_sum;    // sum_{i>T} sigma_i for T = 0..k
};

SpectrumReport spectrum_report(const DenseMatrix& f, const DenseMatrix& y);

}  // namespace lorank
