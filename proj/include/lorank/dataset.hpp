#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lorank/matrix.hpp"

namespace lorank {

/// Paired features (n×d) and multi-hot labels (n×C, entries exactly 0 or 1).
struct LabeledDataset {
  DenseMatrix features;
  DenseMatrix labels;
  std::vector<std::string> class_names;

  std::size_t size() const { return features.rows(); }
  std::size_t input_dim() const { return features.cols(); }
  std::size_t num_classes() const { return labels.cols(); }

  /// Throws invalid_input_error on row-count mismatch, non-binary label
  /// values, or non-finite features.
  void validate() const;

  /// New dataset holding the given rows (in the given order).
  LabeledDataset subset(std::span<const std::size_t> rows) const;
};

/// Loads features and labels from disk (format "csv" or "lrfm"), validates,
/// and fills class_names with "class0", "class1", ….
LabeledDataset load_dataset(const std::string& feature_path,
                            const std::string& label_path,
                            const std::string& format, bool header = false);

/// Disjoint index lists over 0..n-1. `fraction` records the small-data
/// subsampling applied to the train part.
struct SplitPlan {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> val_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
  double fraction = 1.0;
};

struct SplitFractions {
  double val = 0.0;
  double test = 0.0;
  /// Keeps this fraction of the train part (small-data regime); val and test
  /// are unaffected. Must lie in (0, 1].
  double train_subsample = 1.0;
};

/// Deterministic function of (n, seed, fractions): shuffles 0..n-1, carves
/// off test then val, then subsamples the remaining train part.
SplitPlan make_splits(std::size_t n, std::uint64_t seed,
                      const SplitFractions& fractions = {});

struct Fold {
  std::vector<std::size_t> train_part;
  std::vector<std::size_t> val_part;
};

/// k folds with near-equal val sizes (differ by ≤ 1); every index lands in
/// exactly one val_part. Deterministic in (indices, k, seed).
std::vector<Fold> kfold(std::span<const std::size_t> indices, std::size_t k,
                        std::uint64_t seed);

/// Deterministic per-epoch minibatch order: the permutation is a pure
/// function of (base_seed, epoch). The last partial batch is kept.
class BatchIterator {
 public:
  BatchIterator(std::span<const std::size_t> indices, std::size_t batch_size,
                std::uint64_t base_seed, std::size_t epoch);

  std::size_t num_batches() const;
  std::span<const std::size_t> batch(std::size_t j) const;

 private:
  std::vector<std::size_t> order_;
  std::size_t batch_size_;
};

/// Synthetic dataset whose features are a rank-k_signal planted component
/// plus isotropic noise, and whose labels are per-class median thresholds of
/// linear scores of the signal component only (so classes are balanced and
/// label energy concentrates in the top-k_signal eigenvectors).
LabeledDataset synth_planted_subspace(std::size_t n, std::size_t d,
                                      std::size_t num_classes,
                                      std::size_t k_signal, double noise_scale,
                                      std::uint64_t seed);

}  // namespace lorank
