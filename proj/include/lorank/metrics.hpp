#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lorank/matrix.hpp"

namespace lorank {

/// Probability that a random positive outscores a random negative, with ties
/// counted 0.5 (midrank rank-sum). Returns nullopt when only one class is
/// present — the caller treats that column as excluded, not as an error.
std::optional<double> roc_auc(std::span<const double> scores,
                              std::span<const int> labels);

struct MeanAucResult {
  double mean_auc = 0.0;
  /// Per-class AUC; excluded classes hold quiet NaN.
  std::vector<double> per_class;
  std::vector<std::size_t> excluded_classes;
};

/// Averages roc_auc over label columns that contain both classes; throws
/// invalid_input_error when every column is single-class.
MeanAucResult mean_auc(const DenseMatrix& scores, const DenseMatrix& labels);

/// Fraction of rows whose argmax score equals the class label; argmax ties
/// break toward the lowest class index.
double top1_accuracy(const DenseMatrix& scores,
                     std::span<const std::size_t> class_labels);

/// True positives / actual positives for target_class; throws when the
/// target class never occurs in true_classes.
double sensitivity(std::span<const std::size_t> predicted_classes,
                   std::span<const std::size_t> true_classes,
                   std::size_t target_class);

struct EvalReport {
  std::vector<double> per_class_auc;  // NaN for excluded classes
  double mean_auc = 0.0;
  std::vector<std::size_t> excluded_classes;
  std::size_t n_eval = 0;
  /// Filled only when labels are exclusive one-hot rows (multiclass mode).
  std::optional<double> top1 = std::nullopt;
  std::vector<double> per_class_sensitivity;  // empty unless multiclass mode
};

/// AUC metrics always; accuracy and per-class sensitivity additionally when
/// every label row is exclusive one-hot.
EvalReport evaluate(const DenseMatrix& scores, const DenseMatrix& labels);

}  // namespace lorank
