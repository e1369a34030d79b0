#include "lorank/model.hpp"

#include <cmath>

#include "lorank/errors.hpp"
#include "lorank/rng.hpp"

namespace lorank {

namespace {

constexpr double kProbEps = 1e-12;

void fill_uniform(DenseMatrix& m, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(m.rows()));
  for (double& x : m.data()) x = rng.uniform(-bound, bound);
}

DenseMatrix sigmoid(const DenseMatrix& logits) {
  DenseMatrix p(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double z = logits.data()[i];
    // Branch on sign to avoid overflow in exp.
    p.data()[i] = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                           : std::exp(z) / (1.0 + std::exp(z));
  }
  return p;
}

}  // namespace

ExtractorKind extractor_from_string(const std::string& name) {
  if (name == "identity") return ExtractorKind::identity;
  if (name == "linear") return ExtractorKind::linear;
  if (name == "mlp") return ExtractorKind::mlp;
  throw config_error("unknown extractor '" + name +
                     "' (identity, linear, or mlp)");
}

std::string to_string(ExtractorKind kind) {
  switch (kind) {
    case ExtractorKind::identity: return "identity";
    case ExtractorKind::linear: return "linear";
    case ExtractorKind::mlp: return "mlp";
  }
  throw config_error("invalid extractor kind");
}

std::size_t ModelParams::input_dim() const {
  switch (extractor) {
    case ExtractorKind::identity: return head.rows();
    case ExtractorKind::linear: return a1.rows();
    case ExtractorKind::mlp: return a1.rows();
  }
  throw config_error("invalid extractor kind");
}

void ModelParams::require_finite() const {
  if (!a1.empty()) a1.require_finite("params.a1");
  if (!a2.empty()) a2.require_finite("params.a2");
  head.require_finite("params.head");
}

ModelParams init_params(const ModelConfig& config, std::size_t input_dim,
                        std::size_t num_classes, std::uint64_t seed) {
  if (input_dim == 0 || num_classes == 0) {
    throw invalid_input_error("init_params: need input_dim >= 1 and classes >= 1");
  }
  const std::size_t d = config.feature_dim == 0 ? input_dim : config.feature_dim;
  const std::size_t h = config.hidden_dim == 0 ? d : config.hidden_dim;

  ModelParams p;
  p.extractor = config.extractor;
  switch (config.extractor) {
    case ExtractorKind::identity:
      if (d != input_dim) {
        throw config_error(
            "identity extractor requires feature_dim == input dim");
      }
      p.extractor_trainable = false;
      break;
    case ExtractorKind::linear: {
      Rng rng(seed);
      p.a1 = DenseMatrix(input_dim, d);
      fill_uniform(p.a1, rng);
      p.extractor_trainable = config.train_extractor;
      break;
    }
    case ExtractorKind::mlp: {
      Rng rng(seed);
      p.a1 = DenseMatrix(input_dim, h);
      p.a2 = DenseMatrix(h, d);
      fill_uniform(p.a1, rng);
      fill_uniform(p.a2, rng);
      p.extractor_trainable = config.train_extractor;
      break;
    }
  }
  p.head = DenseMatrix(d, num_classes);
  return p;
}

ForwardCache forward(const ModelParams& params, const DenseMatrix& x_batch) {
  if (x_batch.cols() != params.input_dim()) {
    throw shape_error("forward: input has " + std::to_string(x_batch.cols()) +
                      " columns, model expects " +
                      std::to_string(params.input_dim()));
  }
  ForwardCache cache;
  switch (params.extractor) {
    case ExtractorKind::identity:
      cache.features = x_batch;
      break;
    case ExtractorKind::linear:
      cache.features = matmul(x_batch, params.a1);
      break;
    case ExtractorKind::mlp: {
      cache.hidden = matmul(x_batch, params.a1);
      for (double& x : cache.hidden.data()) x = std::tanh(x);
      cache.features = matmul(cache.hidden, params.a2);
      break;
    }
  }
  cache.logits = matmul(cache.features, params.head);
  cache.probabilities = sigmoid(cache.logits);
  return cache;
}

double bce_loss(const DenseMatrix& probabilities, const DenseMatrix& y_batch) {
  if (probabilities.rows() != y_batch.rows() ||
      probabilities.cols() != y_batch.cols()) {
    throw shape_error("bce_loss: probability and label shapes differ");
  }
  if (probabilities.rows() == 0) {
    throw invalid_input_error("bce_loss: empty batch");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    double p = probabilities.data()[i];
    p = std::min(1.0 - kProbEps, std::max(kProbEps, p));
    const double y = y_batch.data()[i];
    total += -y * std::log(p) - (1.0 - y) * std::log1p(-p);
  }
  return total / static_cast<double>(probabilities.rows());
}

Gradients grads(const ModelParams& params, const DenseMatrix& x_batch,
                const DenseMatrix& y_batch,
                const DenseMatrix& reg_grad_on_features) {
  const ForwardCache cache = forward(params, x_batch);
  if (y_batch.rows() != x_batch.rows() || y_batch.cols() != params.num_classes()) {
    throw shape_error("grads: label shape mismatch");
  }
  const std::size_t b = x_batch.rows();
  const double inv_b = 1.0 / static_cast<double>(b);

  // d/dlogits of mean-over-rows summed BCE: (P - Y) / b. The probability
  // clamp only affects the loss value at saturation, not the identity
  // sigma' * dBCE/dp = p - y.
  DenseMatrix dlogits = cache.probabilities;
  add_scaled(dlogits, y_batch, -1.0);
  for (double& x : dlogits.data()) x *= inv_b;

  Gradients g;
  g.head = matmul(transpose(cache.features), dlogits);

  // Feature gradient: BCE part plus the (already scaled) regularizer part.
  DenseMatrix dfeat = matmul(dlogits, transpose(params.head));
  if (!reg_grad_on_features.empty()) {
    if (reg_grad_on_features.rows() != dfeat.rows() ||
        reg_grad_on_features.cols() != dfeat.cols()) {
      throw shape_error("grads: regularizer gradient shape mismatch");
    }
    add_scaled(dfeat, reg_grad_on_features, 1.0);
  }

  switch (params.extractor) {
    case ExtractorKind::identity:
      break;
    case ExtractorKind::linear:
      g.a1 = matmul(transpose(x_batch), dfeat);
      break;
    case ExtractorKind::mlp: {
      g.a2 = matmul(transpose(cache.hidden), dfeat);
      DenseMatrix dhidden = matmul(dfeat, transpose(params.a2));
      for (std::size_t i = 0; i < dhidden.size(); ++i) {
        const double h = cache.hidden.data()[i];
        dhidden.data()[i] *= 1.0 - h * h;  // tanh'
      }
      g.a1 = matmul(transpose(x_batch), dhidden);
      break;
    }
  }
  return g;
}

}  // namespace lorank
