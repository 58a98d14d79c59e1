#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "aupipe/types.hpp"

namespace aupipe {

// One correlated AU pair: the joint positive probability of (first, second)
// is raised above independence by `corr` in [0, 1] (0 = independent,
// 1 = maximal co-occurrence given the marginal rates).
struct CooccurrencePair {
    int first = 0;
    int second = 0;
    double corr = 0.0;
};

// Synthetic stand-in for a video AU corpus. Labels evolve as sticky
// two-state Markov chains with exact stationary positive rates, so temporal
// smoothing has structure to exploit; features are label prototypes plus
// noise, so the task is learnable by a small network.
//
// Member defaults are the shipped default preset: skewed rates (rare
// AU15/AU23/AU24/AU26, mid AU2, common elsewhere, echoing the loss weight
// vector) and one co-occurring pair (AU25, AU26).
struct SynthConfig {
    int n_videos = 40;
    int frames_per_video = 500;
    int feature_dim = 32;
    std::array<double, kNumAus> positive_rates = {0.45, 0.35, 0.45, 0.40, 0.40, 0.40,
                                                  0.45, 0.05, 0.06, 0.08, 0.45, 0.10};
    std::vector<CooccurrencePair> cooccurrence_pairs = {{10, 11, 0.7}};
    // Probability of keeping the current state instead of redrawing it;
    // higher values give longer label runs (stationary rates are unaffected).
    double persistence = 0.95;
    double flicker_rate = 0.0;
    std::uint64_t seed = 0;
};

// Validates ranges; throws ConfigError on violation.
void validate(const SynthConfig& cfg);

// Pure function of cfg: identical configs yield identical datasets.
// When flicker_rate > 0, `labels` carry the flickered observations and
// `clean_labels` the pre-flicker tracks (has_clean is set).
LabelledDataset generate_synthetic(const SynthConfig& cfg);

}  // namespace aupipe
