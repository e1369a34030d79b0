#include "lorank/lrfl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lorank/errors.hpp"
#include "lorank/rng.hpp"
#include "lorank/svd.hpp"

namespace lorank {

namespace {

// Seed streams decoupling parameter initialization from batch shuffling.
enum : std::uint64_t { kStreamInit = 0, kStreamBatches = 1 };

constexpr double kPi = 3.14159265358979323846;

}  // namespace

double exact_tnn(const DenseMatrix& f, std::size_t t) {
  const std::size_t k = std::min(f.rows(), f.cols());
  if (t > k) {
    throw invalid_input_error("exact_tnn: t = " + std::to_string(t) +
                              " exceeds min(n, d) = " + std::to_string(k));
  }
  const SvdFactors factors = svd(f);
  double sum = 0.0;
  for (std::size_t i = t; i < factors.sigma.size(); ++i) sum += factors.sigma[i];
  return sum;
}

std::size_t rank_from_gamma(double gamma, std::size_t n, std::size_t d) {
  if (!(gamma >= 0.0) || gamma > 1.0) {
    throw invalid_input_error("rank ratio gamma must lie in [0, 1]");
  }
  const std::size_t k = std::min(n, d);
  const double raw = std::ceil(gamma * static_cast<double>(k));
  return std::min(k, static_cast<std::size_t>(raw));
}

void RegularizerState::refresh(const DenseMatrix& features, std::size_t epoch) {
  const SvdFactors factors = svd(features);
  u_bar = factors.u;
  v_bar = factors.v;
  last_refresh_epoch = epoch;
  if (rank_t > factors.sigma.size()) {
    throw invalid_input_error("regularizer rank T exceeds min(n, d)");
  }
}

double approx_tnn(const DenseMatrix& f, const RegularizerState& state) {
  if (!state.initialized()) {
    throw invalid_input_error("approx_tnn: regularizer state not initialized");
  }
  if (f.rows() != state.u_bar.rows() || f.cols() != state.v_bar.rows()) {
    throw shape_error("approx_tnn: feature shape does not match snapshots");
  }
  const std::size_t k = state.u_bar.cols();
  double sum = 0.0;
  std::vector<double> fv(f.rows());
  for (std::size_t s = state.rank_t; s < k; ++s) {
    // fv = F * v_s, then accumulate u_s . fv
    for (std::size_t i = 0; i < f.rows(); ++i) {
      double acc = 0.0;
      const auto row = f.row(i);
      for (std::size_t j = 0; j < f.cols(); ++j) acc += row[j] * state.v_bar(j, s);
      fv[i] = acc;
    }
    for (std::size_t i = 0; i < f.rows(); ++i) sum += state.u_bar(i, s) * fv[i];
  }
  return sum;
}

DenseMatrix reg_feature_gradient(const RegularizerState& state,
                                 std::span<const std::size_t> batch_rows) {
  if (!state.initialized()) {
    throw invalid_input_error(
        "reg_feature_gradient: regularizer state not initialized");
  }
  if (batch_rows.empty()) {
    throw invalid_input_error("reg_feature_gradient: empty batch");
  }
  const std::size_t d = state.v_bar.rows();
  const std::size_t k = state.u_bar.cols();
  DenseMatrix out(batch_rows.size(), d);
  const double scale = state.eta_reg / static_cast<double>(batch_rows.size());
  for (std::size_t b = 0; b < batch_rows.size(); ++b) {
    const std::size_t r = batch_rows[b];
    if (r >= state.u_bar.rows()) {
      throw invalid_input_error("reg_feature_gradient: batch row " +
                                std::to_string(r) + " outside the training set");
    }
    auto row = out.row(b);
    for (std::size_t s = state.rank_t; s < k; ++s) {
      const double us = scale * state.u_bar(r, s);
      if (us == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) row[j] += us * state.v_bar(j, s);
    }
  }
  return out;
}

double reg_batch_term(const RegularizerState& state, const DenseMatrix& f_batch,
                      std::span<const std::size_t> batch_rows) {
  if (state.eta_reg == 0.0) return 0.0;
  const DenseMatrix coeff = reg_feature_gradient(state, batch_rows);
  if (coeff.rows() != f_batch.rows() || coeff.cols() != f_batch.cols()) {
    throw shape_error("reg_batch_term: batch feature shape mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < coeff.size(); ++i)
    sum += coeff.data()[i] * f_batch.data()[i];
  return sum;
}

double batch_loss(const ModelParams& params, const DenseMatrix& x_batch,
                  const DenseMatrix& y_batch, const RegularizerState& state,
                  std::span<const std::size_t> batch_rows) {
  const ForwardCache cache = forward(params, x_batch);
  double loss = bce_loss(cache.probabilities, y_batch);
  if (state.eta_reg != 0.0) {
    loss += reg_batch_term(state, cache.features, batch_rows);
  }
  return loss;
}

Optimizer optimizer_from_string(const std::string& name) {
  if (name == "adam") return Optimizer::adam;
  if (name == "sgd-momentum") return Optimizer::sgd_momentum;
  throw config_error("unknown optimizer '" + name + "' (adam or sgd-momentum)");
}

std::string to_string(Optimizer opt) {
  switch (opt) {
    case Optimizer::adam: return "adam";
    case Optimizer::sgd_momentum: return "sgd-momentum";
  }
  throw config_error("invalid optimizer");
}

void TrainConfig::validate() const {
  if (epochs == 0) throw config_error("epochs must be >= 1");
  if (batch_size == 0) throw config_error("batch_size must be >= 1");
  if (!(learning_rate_init > 0.0) || !(learning_rate_final > 0.0)) {
    throw config_error("learning rates must be positive");
  }
  if (learning_rate_final > learning_rate_init) {
    throw config_error("learning_rate_final must not exceed learning_rate_init");
  }
  if (momentum < 0.0 || momentum >= 1.0) {
    throw config_error("momentum must lie in [0, 1)");
  }
  if (weight_decay < 0.0) throw config_error("weight_decay must be >= 0");
  if (!(gamma >= 0.0) || gamma > 1.0) {
    throw config_error("rank ratio gamma must lie in [0, 1]");
  }
  if (eta_reg < 0.0) throw config_error("eta_reg must be >= 0");
  if (refresh_period == 0) throw config_error("refresh_period must be >= 1");
  if (adam_beta1 <= 0.0 || adam_beta1 >= 1.0 || adam_beta2 <= 0.0 ||
      adam_beta2 >= 1.0) {
    throw config_error("adam betas must lie in (0, 1)");
  }
  if (!(adam_epsilon > 0.0)) throw config_error("adam_epsilon must be > 0");
}

double cosine_lr(std::size_t epoch, const TrainConfig& config) {
  if (epoch >= config.epochs) {
    throw invalid_input_error("cosine_lr: epoch index out of range");
  }
  if (config.epochs == 1) return config.learning_rate_init;
  const double progress = static_cast<double>(epoch) /
                          static_cast<double>(config.epochs - 1);
  return config.learning_rate_final +
         0.5 * (config.learning_rate_init - config.learning_rate_final) *
             (1.0 + std::cos(kPi * progress));
}

namespace {

// Per-tensor optimizer state; slots mirror (a1, a2, head).
class OptimizerDriver {
 public:
  OptimizerDriver(const ModelParams& params, const TrainConfig& config)
      : config_(config) {
    init_slot(0, params.a1);
    init_slot(1, params.a2);
    init_slot(2, params.head);
  }

  void step(ModelParams& params, const Gradients& g, double lr) {
    ++t_;
    if (params.extractor_trainable) {
      if (!g.a1.empty()) apply(0, params.a1, g.a1, lr);
      if (!g.a2.empty()) apply(1, params.a2, g.a2, lr);
    }
    apply(2, params.head, g.head, lr);
  }

 private:
  void init_slot(int slot, const DenseMatrix& p) {
    if (p.empty()) return;
    first_[slot] = DenseMatrix(p.rows(), p.cols());
    second_[slot] = DenseMatrix(p.rows(), p.cols());
  }

  void apply(int slot, DenseMatrix& p, const DenseMatrix& g, double lr) {
    auto pd = p.data();
    auto gd = g.data();
    auto m = first_[slot].data();
    auto v = second_[slot].data();
    if (config_.optimizer == Optimizer::adam) {
      const double b1 = config_.adam_beta1;
      const double b2 = config_.adam_beta2;
      const double corr1 = 1.0 - std::pow(b1, static_cast<double>(t_));
      const double corr2 = 1.0 - std::pow(b2, static_cast<double>(t_));
      for (std::size_t i = 0; i < pd.size(); ++i) {
        const double grad = gd[i] + config_.weight_decay * pd[i];
        m[i] = b1 * m[i] + (1.0 - b1) * grad;
        v[i] = b2 * v[i] + (1.0 - b2) * grad * grad;
        const double mhat = m[i] / corr1;
        const double vhat = v[i] / corr2;
        pd[i] -= lr * mhat / (std::sqrt(vhat) + config_.adam_epsilon);
      }
    } else {
      for (std::size_t i = 0; i < pd.size(); ++i) {
        const double grad = gd[i] + config_.weight_decay * pd[i];
        m[i] = config_.momentum * m[i] - lr * grad;
        pd[i] += m[i];
      }
    }
  }

  const TrainConfig& config_;
  std::size_t t_ = 0;
  DenseMatrix first_[3];   // momentum buffer / adam first moment
  DenseMatrix second_[3];  // adam second moment (unused for sgd)
};

}  // namespace

TrainResult train(const LabeledDataset& trainset, const TrainConfig& config) {
  config.validate();
  trainset.validate();
  if (trainset.size() == 0) throw invalid_input_error("train: empty dataset");

  const std::size_t n = trainset.size();
  TrainResult out;
  out.params = init_params(config.model, trainset.input_dim(),
                           trainset.num_classes(),
                           mix_seed(config.seed, kStreamInit));
  const std::size_t d = out.params.feature_dim();

  RegularizerState state;
  state.rank_t = rank_from_gamma(config.gamma, n, d);
  state.eta_reg = config.eta_reg;
  state.refresh_period = config.refresh_period;
  out.rank_t = state.rank_t;

  const auto full_features = [&]() {
    return forward(out.params, trainset.features).features;
  };

  const auto abort = [&](const std::string& reason) -> TrainResult& {
    out.aborted = true;
    out.abort_reason = reason;
    return out;
  };

  try {
    state.refresh(full_features(), 0);
  } catch (const numerical_error& e) {
    return abort(std::string("initial snapshot failed: ") + e.what());
  }

  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  const std::uint64_t batch_seed = mix_seed(config.seed, kStreamBatches);

  OptimizerDriver optimizer(out.params, config);

  for (std::size_t t = 1; t <= config.epochs; ++t) {
    bool refreshed = false;
    if (t % config.refresh_period == 0) {
      try {
        state.refresh(full_features(), t);
        refreshed = true;
      } catch (const numerical_error& e) {
        return abort("snapshot refresh failed at epoch " + std::to_string(t) +
                     ": " + e.what());
      }
    }

    const double lr = cosine_lr(t - 1, config);
    BatchIterator batches(indices, config.batch_size, batch_seed, t);
    double weighted_loss = 0.0;

    for (std::size_t j = 0; j < batches.num_batches(); ++j) {
      const auto rows = batches.batch(j);
      const DenseMatrix x = row_slice(trainset.features, rows);
      const DenseMatrix y = row_slice(trainset.labels, rows);

      const ForwardCache cache = forward(out.params, x);
      double loss = bce_loss(cache.probabilities, y);
      DenseMatrix reg_grad;
      if (config.eta_reg != 0.0) {
        reg_grad = reg_feature_gradient(state, rows);
        loss += reg_batch_term(state, cache.features, rows);
      }
      if (!std::isfinite(loss)) {
        return abort("non-finite loss at epoch " + std::to_string(t));
      }

      const Gradients g = grads(out.params, x, y, reg_grad);
      optimizer.step(out.params, g, lr);
      if (!out.params.head.all_finite() ||
          (!out.params.a1.empty() && !out.params.a1.all_finite()) ||
          (!out.params.a2.empty() && !out.params.a2.all_finite())) {
        return abort("non-finite parameters at epoch " + std::to_string(t));
      }
      weighted_loss += loss * static_cast<double>(rows.size());
    }

    EpochRecord record;
    record.epoch = t;
    record.loss = weighted_loss / static_cast<double>(n);
    record.lr = lr;
    record.refreshed = refreshed;
    try {
      record.tnn_exact = exact_tnn(full_features(), state.rank_t);
    } catch (const numerical_error& e) {
      return abort("spectrum evaluation failed at epoch " + std::to_string(t) +
                   ": " + e.what());
    }
    out.log.epochs.push_back(record);
  }
  return out;
}

}  // namespace lorank
