#pragma once

#include <vector>

#include "aupipe/model.hpp"

namespace aupipe {

// SGD with momentum and L2 weight decay; stepped LR schedule divides lr0 by
// lr_drop_factor at the start of each epoch listed in lr_drop_epochs
// (0-indexed, cumulative). Defaults are the training recipe constants.
struct OptimConfig {
    double lr0 = 0.001;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    int batch_size = 256;
    int epochs = 15;
    std::vector<int> lr_drop_epochs = {4, 6, 8};
    double lr_drop_factor = 10.0;

    void validate() const;
};

// lr0 divided by lr_drop_factor once per drop epoch <= epoch.
double lr_at(const OptimConfig& cfg, int epoch);

struct OptimState {
    std::vector<Layer> velocity;  // same shapes as the model, zero-initialized
};

OptimState init_optim_state(const Model& model);

// v <- momentum*v + (grad + weight_decay*w); w <- w - lr*v.
// Weight decay applies to weights only, never biases.
void sgd_step(Model& model, const Gradients& grads, OptimState& state, double lr,
              const OptimConfig& cfg);

}  // namespace aupipe
