#pragma once

#include <cstdint>
#include <string>

#include "lorank/matrix.hpp"

namespace lorank {

/// Feature extractor preceding the linear classification head.
///   identity: F = X (no parameters; feature_dim must equal input dim)
///   linear:   F = X·A1
///   mlp:      F = tanh(X·A1)·A2
enum class ExtractorKind { identity, linear, mlp };

ExtractorKind extractor_from_string(const std::string& name);
std::string to_string(ExtractorKind kind);

struct ModelConfig {
  ExtractorKind extractor = ExtractorKind::linear;
  /// Output dimension d of the extractor; 0 means "same as input dim".
  std::size_t feature_dim = 0;
  /// Hidden width for the mlp extractor; 0 means "same as feature_dim".
  std::size_t hidden_dim = 0;
  /// When false the extractor weights are frozen at initialization.
  bool train_extractor = true;
};

struct ModelParams {
  ExtractorKind extractor = ExtractorKind::identity;
  bool extractor_trainable = false;
  DenseMatrix a1;    // linear: d_in×d; mlp: d_in×h; identity: empty
  DenseMatrix a2;    // mlp: h×d; otherwise empty
  DenseMatrix head;  // d×C

  std::size_t input_dim() const;
  std::size_t feature_dim() const { return head.rows(); }
  std::size_t num_classes() const { return head.cols(); }
  void require_finite() const;
};

/// Head starts at zero (so the first-epoch BCE is exactly C·ln 2); extractor
/// weights are uniform in ±1/sqrt(fan_in), drawn deterministically from seed.
ModelParams init_params(const ModelConfig& config, std::size_t input_dim,
                        std::size_t num_classes, std::uint64_t seed);

struct ForwardCache {
  DenseMatrix hidden;         // batch×h, post-tanh (mlp only, else empty)
  DenseMatrix features;       // batch×d
  DenseMatrix logits;         // batch×C
  DenseMatrix probabilities;  // batch×C, sigmoid of logits
};

ForwardCache forward(const ModelParams& params, const DenseMatrix& x_batch);

/// Mean over batch rows of the summed per-class binary cross-entropy,
/// with probabilities clamped to [1e-12, 1-1e-12] before the logs.
double bce_loss(const DenseMatrix& probabilities, const DenseMatrix& y_batch);

struct Gradients {
  DenseMatrix a1;    // empty when the extractor has no such tensor
  DenseMatrix a2;
  DenseMatrix head;
};

/// Gradients of the full minibatch objective: mean BCE plus the linear
/// feature-space regularizer term ⟨reg_grad_on_features, F⟩. The regularizer
/// reaches the extractor parameters only (the head sits after F). Pass an
/// empty matrix to disable the regularizer term.
Gradients grads(const ModelParams& params, const DenseMatrix& x_batch,
                const DenseMatrix& y_batch,
                const DenseMatrix& reg_grad_on_features);

}  // namespace lorank
