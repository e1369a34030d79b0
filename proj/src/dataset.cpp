#include "lorank/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lorank/errors.hpp"
#include "lorank/io.hpp"
#include "lorank/rng.hpp"

namespace lorank {

namespace {

// Seed-stream ids so the independent random draws inside this module never
// share an engine state.
enum : std::uint64_t {
  kStreamSplit = 0,
  kStreamSynthSpread = 1,
  kStreamSynthMixer = 2,
  kStreamSynthNoise = 3,
  kStreamSynthWeights = 4,
};

std::size_t rounded_count(double fraction, std::size_t n) {
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 0.5));
}

}  // namespace

void LabeledDataset::validate() const {
  if (features.rows() != labels.rows()) {
    throw invalid_input_error(
        "dataset: feature rows (" + std::to_string(features.rows()) +
        ") != label rows (" + std::to_string(labels.rows()) + ")");
  }
  features.require_finite("dataset features");
  for (std::size_t i = 0; i < labels.rows(); ++i) {
    for (std::size_t j = 0; j < labels.cols(); ++j) {
      const double v = labels(i, j);
      if (v != 0.0 && v != 1.0) {
        throw invalid_input_error("dataset: non-binary label value at row " +
                                  std::to_string(i) + ", col " + std::to_string(j));
      }
    }
  }
  if (!class_names.empty() && class_names.size() != labels.cols()) {
    throw invalid_input_error("dataset: class_names size != label columns");
  }
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
  LabeledDataset out;
  out.features = row_slice(features, rows);
  out.labels = row_slice(labels, rows);
  out.class_names = class_names;
  return out;
}

LabeledDataset load_dataset(const std::string& feature_path,
                            const std::string& label_path,
                            const std::string& format, bool header) {
  LabeledDataset ds;
  ds.features = read_matrix(feature_path, format, header);
  ds.labels = read_matrix(label_path, format, header);
  ds.class_names.reserve(ds.labels.cols());
  for (std::size_t c = 0; c < ds.labels.cols(); ++c) {
    ds.class_names.push_back("class" + std::to_string(c));
  }
  ds.validate();
  return ds;
}

SplitPlan make_splits(std::size_t n, std::uint64_t seed,
                      const SplitFractions& fractions) {
  if (!(fractions.train_subsample > 0.0) || fractions.train_subsample > 1.0) {
    throw config_error("make_splits: train_subsample must be in (0, 1]");
  }
  if (fractions.val < 0.0 || fractions.test < 0.0 ||
      fractions.val + fractions.test >= 1.0) {
    throw config_error(
        "make_splits: val and test fractions must be non-negative and sum below 1");
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, kStreamSplit));
  rng.shuffle(order);

  const std::size_t n_test = rounded_count(fractions.test, n);
  const std::size_t n_val = rounded_count(fractions.val, n);

  SplitPlan plan;
  plan.seed = seed;
  plan.fraction = fractions.train_subsample;
  plan.test_indices.assign(order.begin(), order.begin() + n_test);
  plan.val_indices.assign(order.begin() + n_test, order.begin() + n_test + n_val);

  std::vector<std::size_t> pool(order.begin() + n_test + n_val, order.end());
  std::size_t keep = rounded_count(fractions.train_subsample, pool.size());
  if (keep == 0 && !pool.empty()) keep = 1;
  plan.train_indices.assign(pool.begin(), pool.begin() + keep);
  return plan;
}

std::vector<Fold> kfold(std::span<const std::size_t> indices, std::size_t k,
                        std::uint64_t seed) {
  if (k < 2 || k > indices.size()) {
    throw config_error("kfold: k must satisfy 2 <= k <= number of indices");
  }
  std::vector<std::size_t> order(indices.begin(), indices.end());
  Rng rng(seed);
  rng.shuffle(order);

  const std::size_t base = order.size() / k;
  const std::size_t rem = order.size() % k;

  std::vector<Fold> folds(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t len = base + (f < rem ? 1 : 0);
    folds[f].val_part.assign(order.begin() + start, order.begin() + start + len);
    folds[f].train_part.reserve(order.size() - len);
    folds[f].train_part.insert(folds[f].train_part.end(), order.begin(),
                               order.begin() + start);
    folds[f].train_part.insert(folds[f].train_part.end(),
                               order.begin() + start + len, order.end());
    start += len;
  }
  return folds;
}

BatchIterator::BatchIterator(std::span<const std::size_t> indices,
                             std::size_t batch_size, std::uint64_t base_seed,
                             std::size_t epoch)
    : order_(indices.begin(), indices.end()), batch_size_(batch_size) {
  if (batch_size_ == 0) throw config_error("batch size must be >= 1");
  Rng rng(mix_seed(base_seed, epoch));
  rng.shuffle(order_);
}

std::size_t BatchIterator::num_batches() const {
  return (order_.size() + batch_size_ - 1) / batch_size_;
}

std::span<const std::size_t> BatchIterator::batch(std::size_t j) const {
  const std::size_t start = j * batch_size_;
  const std::size_t len = std::min(batch_size_, order_.size() - start);
  return {order_.data() + start, len};
}

LabeledDataset synth_planted_subspace(std::size_t n, std::size_t d,
                                      std::size_t num_classes,
                                      std::size_t k_signal, double noise_scale,
                                      std::uint64_t seed) {
  if (n < 2 || d == 0 || num_classes == 0) {
    throw config_error("synth_planted_subspace: need n >= 2, d >= 1, C >= 1");
  }
  if (k_signal == 0 || k_signal > d) {
    throw config_error("synth_planted_subspace: need 1 <= k_signal <= d");
  }
  if (noise_scale < 0.0) {
    throw config_error("synth_planted_subspace: noise_scale must be >= 0");
  }

  // Signal coordinates: an even number of balanced clusters plus small
  // gaussian coordinates completing the rank, so S = coords * mixer has rank
  // <= k_signal by construction. An even cluster count keeps the per-class
  // median between clusters, so thresholded labels stay (near-)constant
  // within clusters and their energy concentrates in the signal subspace.
  const std::size_t clusters = k_signal - k_signal % 2;
  const double spread = 0.01;
  DenseMatrix coords(n, k_signal);
  {
    Rng rng(mix_seed(seed, kStreamSynthSpread));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < k_signal; ++j) {
        if (clusters == 0) {
          coords(i, j) = rng.normal();
        } else {
          coords(i, j) =
              (j < clusters && i % clusters == j ? 1.0 : 0.0) + spread * rng.normal();
        }
      }
    }
  }

  DenseMatrix mixer(k_signal, d);
  {
    Rng rng(mix_seed(seed, kStreamSynthMixer));
    for (double& x : mixer.data()) x = rng.normal();
  }

  LabeledDataset ds;
  ds.features = matmul(coords, mixer);
  if (noise_scale > 0.0) {
    Rng rng(mix_seed(seed, kStreamSynthNoise));
    for (double& x : ds.features.data()) x += noise_scale * rng.normal();
  }

  // Labels: threshold a per-class linear score of the signal coordinates at
  // its median, giving balanced classes. Cluster weights are a random
  // permutation of 0..clusters-1, so consecutive cluster scores sit a unit
  // apart — far beyond the spread — and each label is a clean union of
  // clusters whose indicator lies almost entirely in the signal column space.
  ds.labels = DenseMatrix(n, num_classes);
  Rng rng(mix_seed(seed, kStreamSynthWeights));
  std::vector<double> score(n), sorted(n);
  for (std::size_t c = 0; c < num_classes; ++c) {
    std::vector<double> w(k_signal);
    if (clusters == 0) {
      for (double& x : w) x = rng.normal();
    } else {
      std::vector<std::size_t> rank(clusters);
      for (std::size_t j = 0; j < clusters; ++j) rank[j] = j;
      rng.shuffle(rank);
      for (std::size_t j = 0; j < clusters; ++j) w[j] = static_cast<double>(rank[j]);
      for (std::size_t j = clusters; j < k_signal; ++j) w[j] = 0.1 * rng.normal();
    }
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < k_signal; ++j) s += coords(i, j) * w[j];
      score[i] = s;
    }
    sorted = score;
    std::sort(sorted.begin(), sorted.end());
    const double median = n % 2 == 1
                              ? sorted[n / 2]
                              : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    for (std::size_t i = 0; i < n; ++i) ds.labels(i, c) = score[i] > median ? 1.0 : 0.0;
    ds.class_names.push_back("class" + std::to_string(c));
  }
  return ds;
}

}  // namespace lorank
