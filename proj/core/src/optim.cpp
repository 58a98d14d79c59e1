#include "aupipe/optim.hpp"

#include <cmath>
#include <string>

namespace aupipe {

void OptimConfig::validate() const {
    if (!(lr0 > 0.0)) throw ConfigError("lr0 must be > 0");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
    if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be >= 0");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (!(lr_drop_factor > 0.0)) throw ConfigError("lr_drop_factor must be > 0");
    for (int e : lr_drop_epochs)
        if (e < 0) throw ConfigError("lr_drop_epochs entries must be >= 0");
}

double lr_at(const OptimConfig& cfg, int epoch) {
    if (epoch < 0 || epoch >= cfg.epochs)
        throw ValueError("lr_at: epoch " + std::to_string(epoch) + " outside [0, " +
                         std::to_string(cfg.epochs) + ")");
    int drops = 0;
    for (int drop : cfg.lr_drop_epochs)
        if (drop <= epoch) ++drops;
    // Single division by factor^drops: 0.001/1000 hits the 1e-6 literal
    // exactly, where a division per drop would drift one ulp.
    return cfg.lr0 / std::pow(cfg.lr_drop_factor, drops);
}

OptimState init_optim_state(const Model& model) {
    OptimState state;
    state.velocity.reserve(model.layers.size());
    for (const auto& layer : model.layers) {
        Layer v;
        v.w = Matrix(layer.w.rows, layer.w.cols);
        v.b.assign(layer.b.size(), 0.0);
        state.velocity.push_back(std::move(v));
    }
    return state;
}

void sgd_step(Model& model, const Gradients& grads, OptimState& state, double lr,
              const OptimConfig& cfg) {
    if (grads.layers.size() != model.layers.size() ||
        state.velocity.size() != model.layers.size())
        throw ShapeError("sgd_step: gradient/state layer count mismatch");

    for (std::size_t l = 0; l < model.layers.size(); ++l) {
        Layer& layer = model.layers[l];
        const Layer& g = grads.layers[l];
        Layer& v = state.velocity[l];
        if (!g.w.same_shape(layer.w) || g.b.size() != layer.b.size())
            throw ShapeError("sgd_step: gradient shape mismatch at layer " + std::to_string(l));

        for (std::size_t i = 0; i < layer.w.size(); ++i) {
            const double grad = g.w.data[i] + cfg.weight_decay * layer.w.data[i];
            if (!std::isfinite(grad))
                throw NumericError("non-finite gradient in layer " + std::to_string(l));
            v.w.data[i] = cfg.momentum * v.w.data[i] + grad;
            layer.w.data[i] -= lr * v.w.data[i];
        }
        for (std::size_t i = 0; i < layer.b.size(); ++i) {
            if (!std::isfinite(g.b[i]))
                throw NumericError("non-finite bias gradient in layer " + std::to_string(l));
            v.b[i] = cfg.momentum * v.b[i] + g.b[i];
            layer.b[i] -= lr * v.b[i];
        }
    }
}

}  // namespace aupipe
