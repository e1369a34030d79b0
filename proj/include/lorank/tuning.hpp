#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lorank/dataset.hpp"
#include "lorank/lrfl.hpp"

namespace lorank {

struct GridSpec {
  std::vector<double> gamma_values = {0.01, 0.02, 0.03, 0.04,
                                      0.05, 0.1,  0.15, 0.2};
  std::vector<double> eta_values = {5e-4, 1e-3, 2.5e-3, 5e-3, 1e-2};
  std::size_t folds = 5;
  double cv_fraction = 0.2;
  /// Reduced per-cell training budget for cross-validation.
  std::size_t cv_epochs = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CellScore {
  double gamma = 0.0;
  double eta = 0.0;
  std::vector<double> fold_scores;  // validation mean AUC per fold
  double mean_score = 0.0;
  bool failed = false;
};

struct TuneResult {
  double best_gamma = 0.0;
  double best_eta = 0.0;
  std::vector<CellScore> table;
};

/// Cross-validated grid search over (gamma, eta_reg): subsamples cv_fraction
/// of the given dataset (seeded), runs k-fold CV, trains one model per
/// (gamma, eta, fold) at grid.cv_epochs epochs, scores validation mean AUC,
/// and returns the argmax with ties broken toward smaller gamma, then eta.
/// Cells whose every fold fails are marked failed and skipped; if all cells
/// fail an invalid_input_error is thrown.
TuneResult tune(const LabeledDataset& trainset, const GridSpec& grid,
                const TrainConfig& base_config);

struct RankSweepRow {
  double gamma = 0.0;
  std::size_t rank_t = 0;
  double mean_auc = 0.0;
};

/// One full training run per gamma on the train set, evaluated on the test
/// set. Rows come back in the order gammas were given.
std::vector<RankSweepRow> rank_sweep(const LabeledDataset& trainset,
                                     const LabeledDataset& testset,
                                     const std::vector<double>& gammas,
                                     const TrainConfig& base_config);

struct SmallDataRow {
  double fraction = 0.0;
  double mean_auc_baseline = 0.0;  // eta_reg = 0 arm
  double mean_auc_lrfl = 0.0;      // eta_reg from base_config
};

/// For each fraction, subsamples the train set once (seeded) and trains the
/// baseline and regularized arms on the identical subsample, evaluating both
/// on the full test set.
std::vector<SmallDataRow> small_data_experiment(
    const LabeledDataset& trainset, const LabeledDataset& testset,
    const std::vector<double>& fractions, const TrainConfig& base_config);

struct HyperPreset {
  double gamma = 0.0;
  double eta = 0.0;
};

/// Named (gamma, eta_reg) presets: "nih", "covidx", "chexpert".
HyperPreset hyperparameter_preset(const std::string& name);

}  // namespace lorank
