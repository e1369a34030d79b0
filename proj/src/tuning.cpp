#include "lorank/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lorank/errors.hpp"
#include "lorank/metrics.hpp"
#include "lorank/rng.hpp"

namespace lorank {

namespace {

enum : std::uint64_t { kStreamCvSubsample = 0, kStreamCvFolds = 1, kStreamSmallData = 2 };

double score_on(const ModelParams& params, const LabeledDataset& ds) {
  const ForwardCache cache = forward(params, ds.features);
  return mean_auc(cache.probabilities, ds.labels).mean_auc;
}

double train_and_score(const LabeledDataset& trainset,
                       const LabeledDataset& valset, const TrainConfig& config) {
  const TrainResult result = train(trainset, config);
  if (result.aborted) {
    throw numerical_error("training aborted: " + result.abort_reason);
  }
  return score_on(result.params, valset);
}

}  // namespace

void GridSpec::validate() const {
  if (gamma_values.empty() || eta_values.empty()) {
    throw config_error("tuning grid must contain at least one gamma and one eta");
  }
  for (double g : gamma_values) {
    if (!(g >= 0.0) || g > 1.0) throw config_error("grid gamma values must lie in [0, 1]");
  }
  for (double e : eta_values) {
    if (e < 0.0) throw config_error("grid eta values must be >= 0");
  }
  if (folds < 2) throw config_error("folds must be >= 2");
  if (!(cv_fraction > 0.0) || cv_fraction > 1.0) {
    throw config_error("cv_fraction must lie in (0, 1]");
  }
  if (cv_epochs == 0) throw config_error("cv_epochs must be >= 1");
}

TuneResult tune(const LabeledDataset& trainset, const GridSpec& grid,
                const TrainConfig& base_config) {
  grid.validate();
  trainset.validate();

  // Seeded subsample of cv_fraction of the available rows.
  std::vector<std::size_t> order(trainset.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(grid.seed, kStreamCvSubsample));
  rng.shuffle(order);
  std::size_t keep = static_cast<std::size_t>(
      std::floor(grid.cv_fraction * static_cast<double>(order.size()) + 0.5));
  keep = std::max<std::size_t>(keep, grid.folds);
  keep = std::min(keep, order.size());
  order.resize(keep);

  const std::vector<Fold> folds =
      kfold(order, grid.folds, mix_seed(grid.seed, kStreamCvFolds));

  TuneResult result;
  bool any_ok = false;
  for (double gamma : grid.gamma_values) {
    for (double eta : grid.eta_values) {
      CellScore cell;
      cell.gamma = gamma;
      cell.eta = eta;
      TrainConfig config = base_config;
      config.gamma = gamma;
      config.eta_reg = eta;
      config.epochs = grid.cv_epochs;

      double sum = 0.0;
      try {
        for (const Fold& fold : folds) {
          const double score = train_and_score(trainset.subset(fold.train_part),
                                               trainset.subset(fold.val_part),
                                               config);
          cell.fold_scores.push_back(score);
          sum += score;
        }
        cell.mean_score = sum / static_cast<double>(folds.size());
        any_ok = true;
      } catch (const error&) {
        cell.failed = true;
        cell.fold_scores.clear();
        cell.mean_score = 0.0;
      }
      result.table.push_back(std::move(cell));
    }
  }
  if (!any_ok) {
    throw invalid_input_error("tune: every grid cell failed to train");
  }

  // Argmax with ties toward smaller gamma, then smaller eta.
  const CellScore* best = nullptr;
  for (const CellScore& cell : result.table) {
    if (cell.failed) continue;
    if (best == nullptr || cell.mean_score > best->mean_score ||
        (cell.mean_score == best->mean_score &&
         (cell.gamma < best->gamma ||
          (cell.gamma == best->gamma && cell.eta < best->eta)))) {
      best = &cell;
    }
  }
  result.best_gamma = best->gamma;
  result.best_eta = best->eta;
  return result;
}

std::vector<RankSweepRow> rank_sweep(const LabeledDataset& trainset,
                                     const LabeledDataset& testset,
                                     const std::vector<double>& gammas,
                                     const TrainConfig& base_config) {
  if (gammas.empty()) throw invalid_input_error("rank_sweep: no gamma values");
  std::vector<RankSweepRow> rows;
  rows.reserve(gammas.size());
  for (double gamma : gammas) {
    TrainConfig config = base_config;
    config.gamma = gamma;
    const TrainResult result = train(trainset, config);
    if (result.aborted) {
      throw numerical_error("rank_sweep: training aborted: " + result.abort_reason);
    }
    RankSweepRow row;
    row.gamma = gamma;
    row.rank_t = result.rank_t;
    row.mean_auc = score_on(result.params, testset);
    rows.push_back(row);
  }
  return rows;
}

std::vector<SmallDataRow> small_data_experiment(
    const LabeledDataset& trainset, const LabeledDataset& testset,
    const std::vector<double>& fractions, const TrainConfig& base_config) {
  if (fractions.empty()) {
    throw invalid_input_error("small_data_experiment: no fractions");
  }
  std::vector<SmallDataRow> rows;
  rows.reserve(fractions.size());
  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    const double fraction = fractions[fi];
    if (!(fraction > 0.0) || fraction > 1.0) {
      throw invalid_input_error("small_data_experiment: fraction must lie in (0, 1]");
    }
    // One subsample per fraction, shared by both arms.
    std::vector<std::size_t> order(trainset.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(mix_seed(mix_seed(base_config.seed, kStreamSmallData), fi));
    rng.shuffle(order);
    std::size_t keep = static_cast<std::size_t>(
        std::floor(fraction * static_cast<double>(order.size()) + 0.5));
    keep = std::max<std::size_t>(keep, 1);
    order.resize(keep);
    const LabeledDataset subsample = trainset.subset(order);

    TrainConfig baseline = base_config;
    baseline.eta_reg = 0.0;

    SmallDataRow row;
    row.fraction = fraction;
    {
      const TrainResult r = train(subsample, baseline);
      if (r.aborted) {
        throw numerical_error("small_data_experiment: baseline arm aborted: " +
                              r.abort_reason);
      }
      row.mean_auc_baseline = score_on(r.params, testset);
    }
    {
      const TrainResult r = train(subsample, base_config);
      if (r.aborted) {
        throw numerical_error("small_data_experiment: regularized arm aborted: " +
                              r.abort_reason);
      }
      row.mean_auc_lrfl = score_on(r.params, testset);
    }
    rows.push_back(row);
  }
  return rows;
}

HyperPreset hyperparameter_preset(const std::string& name) {
  if (name == "nih") return {0.05, 5e-4};
  if (name == "covidx") return {0.003, 1e-3};
  if (name == "chexpert") return {0.05, 1e-3};
  throw config_error("unknown hyperparameter preset '" + name +
                     "' (nih, covidx, or chexpert)");
}

}  // namespace lorank
