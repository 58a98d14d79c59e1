#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "aupipe/batching.hpp"
#include "aupipe/checkpoint.hpp"
#include "aupipe/loss.hpp"
#include "aupipe/matrix.hpp"
#include "aupipe/model.hpp"
#include "aupipe/optim.hpp"
#include "aupipe/predictions.hpp"
#include "aupipe/types.hpp"

namespace aupipe {

// Dense view of a dataset for training: features, {0,1} targets with invalid
// entries zeroed, and the validity mask that keeps them out of the loss.
struct TargetBatch {
    Matrix y;
    BoolMatrix mask;
    bool smoothed = false;
};

Matrix features_matrix(const LabelledDataset& ds);
TargetBatch targets_matrix(const LabelledDataset& ds, bool use_clean = false);

// Smooths in place; refuses to smooth twice so the eps cannot compound.
void apply_label_smoothing(TargetBatch& targets, double eps);

enum class SamplerKind {
    Balanced,  // bucketed per-AU positive/negative sampling
    Shuffle,   // epoch-wise permutation, wrap-around final batch
};

struct TrainOptions {
    ModelConfig model;  // input_dim 0 means "take it from the data"
    OptimConfig optim;
    LossConfig loss;
    SamplerKind sampler = SamplerKind::Balanced;
    std::uint64_t seed = 0;
    std::string checkpoint_dir;  // empty disables checkpoint files
};

struct EpochStats {
    int epoch = 0;
    double mean_train_loss = 0.0;
    double lr = 0.0;
    bool has_val = false;
    std::array<double, kNumAus> val_f1{};
    double macro_val_f1 = 0.0;

    bool operator==(const EpochStats&) const = default;
};

struct History {
    std::vector<EpochStats> epochs;

    bool operator==(const History&) const = default;
};

struct TrainResult {
    Checkpoint final_checkpoint;
    std::vector<Checkpoint> per_epoch;  // snapshot after each trained epoch
    History history;
    std::vector<std::string> warnings;
};

// Runs the full schedule (or the remainder of it when resuming). All
// randomness is derived from options.seed and the epoch/batch index, so a
// resumed run is bit-identical to the uninterrupted one.
TrainResult train(const LabelledDataset& train_ds, const LabelledDataset* val_ds,
                  const TrainOptions& options, const Checkpoint* resume = nullptr);

// Deterministic inference over every sample; logits in canonical AU order.
PredictionRun predict(const Model& model, const LabelledDataset& ds);

std::string checkpoint_filename(int epoch_completed);

}  // namespace aupipe
