#include "lorank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lorank/errors.hpp"

namespace lorank {

std::optional<double> roc_auc(std::span<const double> scores,
                              std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw shape_error("roc_auc: scores and labels differ in length");
  }
  std::size_t pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) {
      throw invalid_input_error("roc_auc: labels must be 0 or 1");
    }
    pos += static_cast<std::size_t>(l);
  }
  const std::size_t neg = labels.size() - pos;
  if (pos == 0 || neg == 0) return std::nullopt;

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] < scores[b];
  });

  // Midrank sum over positives: tied scores share the average of their
  // 1-based rank range. All quantities are exact half-integers in double.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j));
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] == 1) rank_sum_pos += midrank;
    }
    i = j;
  }

  const double p = static_cast<double>(pos);
  return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

MeanAucResult mean_auc(const DenseMatrix& scores, const DenseMatrix& labels) {
  if (scores.rows() != labels.rows() || scores.cols() != labels.cols()) {
    throw shape_error("mean_auc: score and label shapes differ");
  }
  if (labels.cols() == 0 || labels.rows() == 0) {
    throw invalid_input_error("mean_auc: empty input");
  }

  MeanAucResult result;
  result.per_class.assign(labels.cols(), std::numeric_limits<double>::quiet_NaN());
  double sum = 0.0;
  std::size_t counted = 0;

  std::vector<double> col_scores(labels.rows());
  std::vector<int> col_labels(labels.rows());
  for (std::size_t c = 0; c < labels.cols(); ++c) {
    for (std::size_t r = 0; r < labels.rows(); ++r) {
      col_scores[r] = scores(r, c);
      const double v = labels(r, c);
      if (v != 0.0 && v != 1.0) {
        throw invalid_input_error("mean_auc: non-binary label at row " +
                                  std::to_string(r) + ", col " + std::to_string(c));
      }
      col_labels[r] = v == 1.0 ? 1 : 0;
    }
    const auto auc = roc_auc(col_scores, col_labels);
    if (auc.has_value()) {
      result.per_class[c] = *auc;
      sum += *auc;
      ++counted;
    } else {
      result.excluded_classes.push_back(c);
    }
  }
  if (counted == 0) {
    throw invalid_input_error("mean_auc: every class column is single-class");
  }
  result.mean_auc = sum / static_cast<double>(counted);
  return result;
}

double top1_accuracy(const DenseMatrix& scores,
                     std::span<const std::size_t> class_labels) {
  if (scores.rows() == 0) throw invalid_input_error("top1_accuracy: empty input");
  if (scores.rows() != class_labels.size()) {
    throw shape_error("top1_accuracy: row count != label count");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = c;  // ties keep the lower index
    }
    if (best == class_labels[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(scores.rows());
}

double sensitivity(std::span<const std::size_t> predicted_classes,
                   std::span<const std::size_t> true_classes,
                   std::size_t target_class) {
  if (predicted_classes.size() != true_classes.size()) {
    throw shape_error("sensitivity: prediction and label counts differ");
  }
  std::size_t actual = 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < true_classes.size(); ++i) {
    if (true_classes[i] == target_class) {
      ++actual;
      if (predicted_classes[i] == target_class) ++hits;
    }
  }
  if (actual == 0) {
    throw invalid_input_error("sensitivity: target class " +
                              std::to_string(target_class) +
                              " absent from the true labels");
  }
  return static_cast<double>(hits) / static_cast<double>(actual);
}

EvalReport evaluate(const DenseMatrix& scores, const DenseMatrix& labels) {
  EvalReport report;
  const MeanAucResult auc = mean_auc(scores, labels);
  report.per_class_auc = auc.per_class;
  report.mean_auc = auc.mean_auc;
  report.excluded_classes = auc.excluded_classes;
  report.n_eval = scores.rows();

  // Multiclass mode: every row must be exclusive one-hot.
  bool one_hot = labels.cols() >= 2;
  std::vector<std::size_t> true_classes(labels.rows());
  for (std::size_t i = 0; i < labels.rows() && one_hot; ++i) {
    std::size_t ones = 0;
    for (std::size_t c = 0; c < labels.cols(); ++c) {
      if (labels(i, c) == 1.0) {
        true_classes[i] = c;
        ++ones;
      }
    }
    one_hot = ones == 1;
  }
  if (!one_hot) return report;

  std::vector<std::size_t> predicted(scores.rows());
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.cols(); ++c) {
      if (scores(i, c) > scores(i, best)) best = c;
    }
    predicted[i] = best;
  }
  report.top1 = top1_accuracy(scores, true_classes);
  report.per_class_sensitivity.assign(labels.cols(),
                                      std::numeric_limits<double>::quiet_NaN());
  for (std::size_t c = 0; c < labels.cols(); ++c) {
    bool present = false;
    for (std::size_t i = 0; i < labels.rows(); ++i) {
      if (true_classes[i] == c) {
        present = true;
        break;
      }
    }
    if (present) {
      report.per_class_sensitivity[c] = sensitivity(predicted, true_classes, c);
    }
  }
  return report;
}

}  // namespace lorank
