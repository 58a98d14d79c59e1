#include "aupipe/model.hpp"

#include <cmath>
#include <string>

#include "aupipe/rng.hpp"

namespace aupipe {

void ModelConfig::validate() const {
    if (input_dim == 0) throw ConfigError("model input_dim must be positive");
    for (auto h : hidden_dims)
        if (h == 0) throw ConfigError("hidden layer widths must be positive");
    if (output_dim != kNumAus)
        throw ConfigError("output_dim is fixed at " + std::to_string(kNumAus));
    if (!(dropout_p >= 0.0 && dropout_p < 1.0))
        throw ConfigError("dropout_p must lie in [0, 1), got " + std::to_string(dropout_p));
}

std::size_t Model::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.w.size() + layer.b.size();
    return n;
}

Model init_model(const ModelConfig& cfg) {
    cfg.validate();
    Model model;
    model.cfg = cfg;
    std::vector<std::size_t> dims;
    dims.push_back(cfg.input_dim);
    dims.insert(dims.end(), cfg.hidden_dims.begin(), cfg.hidden_dims.end());
    dims.push_back(cfg.output_dim);

    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Rng rng(derive_seed(cfg.init_seed, "layer", l));
        Layer layer;
        layer.w = Matrix(dims[l + 1], dims[l]);
        const double bound = 1.0 / std::sqrt(static_cast<double>(dims[l]));
        for (auto& v : layer.w.data) v = rng.uniform(-bound, bound);
        layer.b.assign(dims[l + 1], 0.0);
        model.layers.push_back(std::move(layer));
    }
    return model;
}

Matrix forward(const Model& model, const Matrix& features, ForwardMode mode,
               std::uint64_t dropout_seed, ForwardCache* cache) {
    if (features.cols != model.cfg.input_dim)
        throw ShapeError("forward: feature dim " + std::to_string(features.cols) +
                         " does not match model input_dim " +
                         std::to_string(model.cfg.input_dim));
    if (cache) *cache = ForwardCache{};

    const bool train = mode == ForwardMode::Train;
    const double p = model.cfg.dropout_p;
    Rng drop_rng(dropout_seed);

    Matrix act = features;
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        const Layer& layer = model.layers[l];
        if (cache) cache->inputs.push_back(act);

        Matrix z(act.rows, layer.w.rows);
        for (std::size_t r = 0; r < act.rows; ++r) {
            for (std::size_t o = 0; o < layer.w.rows; ++o) {
                double sum = layer.b[o];
                const double* wrow = &layer.w.data[o * layer.w.cols];
                const double* arow = &act.data[r * act.cols];
                for (std::size_t i = 0; i < act.cols; ++i) sum += wrow[i] * arow[i];
                z(r, o) = sum;
            }
        }

        const bool is_output = l + 1 == model.layers.size();
        if (is_output) {
            act = std::move(z);
            break;
        }

        if (cache) cache->preacts.push_back(z);
        Matrix h(z.rows, z.cols);
        for (std::size_t i = 0; i < z.size(); ++i) h.data[i] = z.data[i] > 0.0 ? z.data[i] : 0.0;

        if (train) {
            Matrix mask(h.rows, h.cols);
            const double scale = 1.0 / (1.0 - p);
            for (std::size_t i = 0; i < h.size(); ++i) {
                const double keep = drop_rng.uniform() >= p ? scale : 0.0;
                mask.data[i] = keep;
                h.data[i] *= keep;
            }
            if (cache) cache->dropmasks.push_back(std::move(mask));
        } else if (cache) {
            cache->dropmasks.emplace_back();
        }
        act = std::move(h);
    }
    return act;
}

Gradients backward(const Model& model, const ForwardCache& cache, const Matrix& dlogits) {
    const std::size_t n_layers = model.layers.size();
    if (cache.inputs.size() != n_layers)
        throw ShapeError("backward: cache does not match model layer count");

    Gradients grads;
    grads.layers.resize(n_layers);
    Matrix delta = dlogits;
    for (std::size_t li = n_layers; li-- > 0;) {
        const Layer& layer = model.layers[li];
        const Matrix& input = cache.inputs[li];
        require_same_shape(delta, Matrix(input.rows, layer.w.rows), "backward delta");

        Layer& g = grads.layers[li];
        g.w = Matrix(layer.w.rows, layer.w.cols);
        g.b.assign(layer.b.size(), 0.0);
        for (std::size_t r = 0; r < input.rows; ++r) {
            const double* irow = &input.data[r * input.cols];
            for (std::size_t o = 0; o < layer.w.rows; ++o) {
                const double d = delta(r, o);
                if (d == 0.0) continue;
                double* grow = &g.w.data[o * g.w.cols];
                for (std::size_t i = 0; i < input.cols; ++i) grow[i] += d * irow[i];
                g.b[o] += d;
            }
        }

        if (li == 0) break;
        // Propagate to the previous activation, then through dropout + ReLU.
        Matrix prev(delta.rows, layer.w.cols);
        for (std::size_t r = 0; r < delta.rows; ++r) {
            for (std::size_t i = 0; i < layer.w.cols; ++i) {
                double sum = 0.0;
                for (std::size_t o = 0; o < layer.w.rows; ++o)
                    sum += delta(r, o) * layer.w(o, i);
                prev(r, i) = sum;
            }
        }
        const Matrix& z = cache.preacts[li - 1];
        const Matrix& mask = cache.dropmasks[li - 1];
        const bool has_mask = mask.size() > 0;
        for (std::size_t i = 0; i < prev.size(); ++i) {
            if (has_mask) prev.data[i] *= mask.data[i];
            if (!(z.data[i] > 0.0)) prev.data[i] = 0.0;
        }
        delta = std::move(prev);
    }
    return grads;
}

}  // namespace aupipe
