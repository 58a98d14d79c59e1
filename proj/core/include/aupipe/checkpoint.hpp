#pragma once

#include <cstdint>
#include <string>

#include "aupipe/loss.hpp"
#include "aupipe/model.hpp"
#include "aupipe/optim.hpp"

namespace aupipe {

// Single-file binary container: magic "AUPIPE-CKPT-v1\n", a length-prefixed
// JSON header (epoch, seed, config fingerprint, layer shapes), then raw
// little-endian 64-bit floats for weights and momentum buffers. Reloading
// and continuing training reproduces the uninterrupted run exactly, since
// all per-epoch randomness is derived from (train_seed, epoch).
inline constexpr char kCheckpointMagic[] = "AUPIPE-CKPT-v1\n";

struct Checkpoint {
    int epoch_completed = 0;  // number of finished epochs
    std::uint64_t train_seed = 0;
    std::string config_fingerprint;
    Model model;
    OptimState optim_state;
};

// Stable hash of the full training configuration; mismatched fingerprints
// refuse to resume.
std::string config_fingerprint(const ModelConfig& model, const OptimConfig& optim,
                               const LossConfig& loss);

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace aupipe
