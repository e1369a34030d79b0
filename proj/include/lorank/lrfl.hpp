#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lorank/dataset.hpp"
#include "lorank/matrix.hpp"
#include "lorank/model.hpp"

namespace lorank {

/// Sum of the singular values of f with (1-based) index greater than t —
/// the tail the regularizer pushes toward zero. t must lie in [0, min(n,d)].
double exact_tnn(const DenseMatrix& f, std::size_t t);

/// T = ceil(gamma * min(n, d)) clamped to [0, min(n, d)]; gamma in [0, 1].
std::size_t rank_from_gamma(double gamma, std::size_t n, std::size_t d);

/// Cached singular-vector snapshots that make the truncated-nuclear-norm
/// surrogate linear in F between refreshes.
struct RegularizerState {
  DenseMatrix u_bar;  // n×k snapshot of left singular vectors
  DenseMatrix v_bar;  // d×k snapshot of right singular vectors
  std::size_t rank_t = 0;
  double eta_reg = 0.0;
  std::size_t refresh_period = 5;
  std::size_t last_refresh_epoch = 0;

  bool initialized() const { return !u_bar.empty(); }

  /// Recomputes the snapshots from an SVD of the full feature matrix.
  void refresh(const DenseMatrix& features, std::size_t epoch);
};

/// Linear surrogate for the truncated nuclear norm: sum over s > T of
/// [ŪᵀFV̄]_ss. Equals exact_tnn(f, T) when the snapshots come from svd(f);
/// may go negative under stale snapshots (deliberately not clamped).
double approx_tnn(const DenseMatrix& f, const RegularizerState& state);

/// Gradient of the per-batch regularizer term with respect to the batch's
/// feature rows: entry (b, k) = (eta/|B|) * sum_{s>T} Ū[row_b, s] V̄[k, s].
/// Constant in F (the surrogate is linear). batch_rows index into the
/// training set the snapshots were computed on.
DenseMatrix reg_feature_gradient(const RegularizerState& state,
                                 std::span<const std::size_t> batch_rows);

/// The per-batch regularizer value: (eta/|B|) * sum over batch rows i of
/// sum_{s>T} [Ūᵀ F V̄ contribution of row i].
double reg_batch_term(const RegularizerState& state,
                      const DenseMatrix& f_batch,
                      std::span<const std::size_t> batch_rows);

/// Full minibatch objective: mean BCE plus the per-batch regularizer term.
double batch_loss(const ModelParams& params, const DenseMatrix& x_batch,
                  const DenseMatrix& y_batch, const RegularizerState& state,
                  std::span<const std::size_t> batch_rows);

enum class Optimizer { sgd_momentum, adam };

Optimizer optimizer_from_string(const std::string& name);
std::string to_string(Optimizer opt);

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 2048;
  double learning_rate_init = 2.5e-5;
  double learning_rate_final = 1e-7;
  double momentum = 0.9;
  double weight_decay = 0.0;
  Optimizer optimizer = Optimizer::adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  double gamma = 0.05;     // rank ratio, T = ceil(gamma * min(n, d))
  double eta_reg = 0.0;    // regularizer weight; 0 disables the surrogate
  std::size_t refresh_period = 5;
  std::uint64_t seed = 0;
  ModelConfig model;

  void validate() const;
};

/// Cosine anneal from learning_rate_init (epoch 0) to learning_rate_final
/// (epoch epochs-1). epoch must lie in [0, epochs).
double cosine_lr(std::size_t epoch, const TrainConfig& config);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;      // batch-size-weighted mean of batch losses
  double tnn_exact = 0.0; // exact_tnn of the full train features, end of epoch
  double lr = 0.0;
  bool refreshed = false; // whether snapshots were refreshed at epoch start
};

struct TrainLog {
  std::vector<EpochRecord> epochs;
};

struct TrainResult {
  ModelParams params;
  TrainLog log;
  std::size_t rank_t = 0;
  bool aborted = false;
  std::string abort_reason;
};

/// Runs the training loop: initialize parameters; compute the initial
/// singular-vector snapshots before epoch 1; refresh them at the start of
/// every epoch t with t ≡ 0 (mod refresh_period), t counted from 1; iterate
/// deterministic minibatches with the chosen optimizer under the cosine
/// schedule. SVD failure or a non-finite loss aborts, returning the last
/// finite parameters with aborted=true.
TrainResult train(const LabeledDataset& trainset, const TrainConfig& config);

}  // namespace lorank
