#pragma once

#include <cstdint>
#include <vector>

#include "aupipe/matrix.hpp"
#include "aupipe/types.hpp"

namespace aupipe {

// Small feed-forward head over feature vectors: input -> hidden (ReLU,
// dropout) -> ... -> 12 logits. Stands in for the image backbone.
struct ModelConfig {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_dims = {64, 64};
    std::size_t output_dim = kNumAus;  // fixed at 12
    double dropout_p = 0.6;
    std::uint64_t init_seed = 0;

    void validate() const;
};

struct Layer {
    Matrix w;               // out x in
    std::vector<double> b;  // out
};

struct Model {
    ModelConfig cfg;
    std::vector<Layer> layers;

    std::size_t parameter_count() const;
};

enum class ForwardMode { Train, Eval };

// Per-layer tensors kept from the forward pass for backprop.
struct ForwardCache {
    std::vector<Matrix> inputs;     // activation entering each layer (batch x in)
    std::vector<Matrix> preacts;    // z = input * W^T + b for hidden layers
    std::vector<Matrix> dropmasks;  // inverted-dropout scale (0 or 1/(1-p)); empty in Eval
};

struct Gradients {
    std::vector<Layer> layers;  // same shapes as the model
};

// Weights uniform in +-1/sqrt(fan_in), biases zero; deterministic in
// cfg.init_seed. hidden_dims may be empty (single linear layer).
Model init_model(const ModelConfig& cfg);

// Train mode applies inverted dropout (scale 1/(1-p)) after every hidden
// ReLU, seeded by dropout_seed; Eval mode is deterministic with no dropout.
Matrix forward(const Model& model, const Matrix& features, ForwardMode mode,
               std::uint64_t dropout_seed = 0, ForwardCache* cache = nullptr);

// Backprop of d(loss)/d(logits) through the cached forward pass. Any batch
// reduction factor must already be inside dlogits.
Gradients backward(const Model& model, const ForwardCache& cache, const Matrix& dlogits);

}  // namespace aupipe
