#include <doctest.h>

#include <cmath>
#include <vector>

#include "lorank/errors.hpp"
#include "lorank/metrics.hpp"
#include "lorank/rng.hpp"
#include "oracles.hpp"

TEST_CASE("roc auc on the classic worked example is exactly 0.75") {
  const std::vector<double> scores{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> labels{0, 0, 1, 1};
  const auto auc = lorank::roc_auc(scores, labels);
  REQUIRE(auc.has_value());
  CHECK(*auc == 0.75);
}

TEST_CASE("roc auc boundary behaviors") {
  const std::vector<double> increasing{1.0, 2.0, 3.0, 4.0};
  CHECK(*lorank::roc_auc(increasing, std::vector<int>{0, 0, 1, 1}) == 1.0);
  CHECK(*lorank::roc_auc(increasing, std::vector<int>{1, 1, 0, 0}) == 0.0);

  const std::vector<double> constant{0.5, 0.5, 0.5, 0.5};
  CHECK(*lorank::roc_auc(constant, std::vector<int>{0, 1, 0, 1}) == 0.5);

  // Single-class columns are excluded, not errors.
  CHECK_FALSE(lorank::roc_auc(increasing, std::vector<int>{1, 1, 1, 1}).has_value());
  CHECK_FALSE(lorank::roc_auc(increasing, std::vector<int>{0, 0, 0, 0}).has_value());

  CHECK_THROWS_AS(lorank::roc_auc(increasing, std::vector<int>{0, 1}),
                  lorank::shape_error);
  CHECK_THROWS_AS(lorank::roc_auc(increasing, std::vector<int>{0, 1, 2, 1}),
                  lorank::invalid_input_error);
}

TEST_CASE("roc auc equals the pairwise count on random tied data") {
  lorank::Rng rng(81);
  for (int rep = 0; rep < 40; ++rep) {
    const std::size_t n = 2 + rng.below(40);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    bool has_pos = false, has_neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      // Coarse grid of score values forces plenty of ties.
      scores[i] = static_cast<double>(rng.below(6)) / 5.0;
      labels[i] = rng.below(2) ? 1 : 0;
      (labels[i] == 1 ? has_pos : has_neg) = true;
    }
    const auto got = lorank::roc_auc(scores, labels);
    const auto want = oracle::pair_count_auc(scores, labels);
    REQUIRE(got.has_value() == want.has_value());
    REQUIRE(got.has_value() == (has_pos && has_neg));
    if (got.has_value()) CHECK(*got == *want);  // exact, not approximate
  }
}

TEST_CASE("roc auc is invariant under monotone score transforms") {
  const std::vector<double> scores{0.3, 0.1, 0.9, 0.5, 0.5, 0.2};
  const std::vector<int> labels{1, 0, 1, 0, 1, 0};
  std::vector<double> transformed(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    transformed[i] = 100.0 * scores[i] - 7.0;
  CHECK(*lorank::roc_auc(scores, labels) ==
        *lorank::roc_auc(transformed, labels));

  // Complementing the labels mirrors the score: AUC -> 1 - AUC.
  std::vector<int> flipped(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) flipped[i] = 1 - labels[i];
  CHECK(*lorank::roc_auc(scores, labels) + *lorank::roc_auc(scores, flipped) == 1.0);
}

TEST_CASE("mean auc averages only the usable columns") {
  // Three columns: AUC 0.75 example, a perfect column, and a single-class
  // column that must be excluded from the mean.
  lorank::DenseMatrix scores(4, 3);
  lorank::DenseMatrix labels(4, 3);
  const std::vector<double> s0{0.1, 0.4, 0.35, 0.8};
  const std::vector<int> l0{0, 0, 1, 1};
  for (std::size_t i = 0; i < 4; ++i) {
    scores(i, 0) = s0[i];
    labels(i, 0) = l0[i];
    scores(i, 1) = static_cast<double>(i);
    labels(i, 1) = i >= 2 ? 1.0 : 0.0;
    scores(i, 2) = 0.9;
    labels(i, 2) = 1.0;  // positives only
  }
  const lorank::MeanAucResult result = lorank::mean_auc(scores, labels);
  CHECK(result.mean_auc == doctest::Approx(0.875).epsilon(1e-15));
  REQUIRE(result.per_class.size() == 3);
  CHECK(result.per_class[0] == 0.75);
  CHECK(result.per_class[1] == 1.0);
  CHECK(std::isnan(result.per_class[2]));
  REQUIRE(result.excluded_classes.size() == 1);
  CHECK(result.excluded_classes[0] == 2);

  lorank::DenseMatrix all_one(4, 1, 1.0);
  lorank::DenseMatrix any_scores(4, 1, 0.3);
  CHECK_THROWS_AS(lorank::mean_auc(any_scores, all_one),
                  lorank::invalid_input_error);
}

TEST_CASE("random scores hover near chance") {
  lorank::Rng rng(82);
  const std::size_t n = 4000;
  std::vector<double> scores(n);
  std::vector<int> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    scores[i] = rng.uniform01();
    labels[i] = rng.below(2) ? 1 : 0;
  }
  const auto auc = lorank::roc_auc(scores, labels);
  REQUIRE(auc.has_value());
  CHECK(*auc > 0.45);
  CHECK(*auc < 0.55);
}

TEST_CASE("top-1 accuracy breaks argmax ties toward the lower index") {
  lorank::DenseMatrix scores(3, 3, 0.0);
  scores(0, 0) = 0.2; scores(0, 1) = 0.9; scores(0, 2) = 0.1;  // argmax 1
  scores(1, 0) = 0.4; scores(1, 1) = 0.4; scores(1, 2) = 0.3;  // tie -> 0
  scores(2, 0) = 0.1; scores(2, 1) = 0.2; scores(2, 2) = 0.9;  // argmax 2
  const std::vector<std::size_t> truth{1, 1, 2};
  // Row 1's tie resolves to class 0, which is wrong on purpose.
  CHECK(lorank::top1_accuracy(scores, truth) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  const std::vector<std::size_t> tie_truth{1, 0, 2};
  CHECK(lorank::top1_accuracy(scores, tie_truth) == 1.0);

  CHECK_THROWS_AS(lorank::top1_accuracy(lorank::DenseMatrix(), truth),
                  lorank::invalid_input_error);
}

TEST_CASE("sensitivity counts recovered positives for one class") {
  //                                    predictions     truth
  const std::vector<std::size_t> pred{0, 1, 1, 0, 1, 2, 1};
  const std::vector<std::size_t> truth{0, 1, 1, 1, 1, 2, 0};
  // Class 1 occurs 4 times in truth, recovered at positions 1, 2, 4 -> 3/4.
  CHECK(lorank::sensitivity(pred, truth, 1) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(lorank::sensitivity(pred, truth, 2) == 1.0);
  CHECK_THROWS_AS(lorank::sensitivity(pred, truth, 9),
                  lorank::invalid_input_error);
}

TEST_CASE("evaluate switches to multiclass mode only for one-hot labels") {
  // One-hot rows: exactly one 1 per row.
  lorank::DenseMatrix onehot(4, 2, 0.0);
  onehot(0, 0) = 1.0;
  onehot(1, 1) = 1.0;
  onehot(2, 0) = 1.0;
  onehot(3, 1) = 1.0;
  lorank::DenseMatrix scores(4, 2);
  scores(0, 0) = 0.9; scores(0, 1) = 0.1;
  scores(1, 0) = 0.2; scores(1, 1) = 0.8;
  scores(2, 0) = 0.6; scores(2, 1) = 0.4;
  scores(3, 0) = 0.7; scores(3, 1) = 0.3;  // misclassified row

  const lorank::EvalReport multi = lorank::evaluate(scores, onehot);
  CHECK(multi.n_eval == 4);
  REQUIRE(multi.top1.has_value());
  CHECK(*multi.top1 == doctest::Approx(0.75).epsilon(1e-15));
  REQUIRE(multi.per_class_sensitivity.size() == 2);
  CHECK(multi.per_class_sensitivity[0] == 1.0);
  CHECK(multi.per_class_sensitivity[1] == 0.5);

  // A multi-hot row (or an all-zero row) disables multiclass mode.
  lorank::DenseMatrix multihot = onehot;
  multihot(0, 1) = 1.0;
  const lorank::EvalReport tagging = lorank::evaluate(scores, multihot);
  CHECK_FALSE(tagging.top1.has_value());
  CHECK(tagging.per_class_sensitivity.empty());

  // AUC fields are filled either way.
  CHECK(multi.per_class_auc.size() == 2);
  CHECK(tagging.per_class_auc.size() == 2);
  CHECK(std::isfinite(multi.mean_auc));
}
