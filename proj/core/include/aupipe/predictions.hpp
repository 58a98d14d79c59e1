#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "aupipe/matrix.hpp"
#include "aupipe/types.hpp"

namespace aupipe {

// One model's raw logits over a dataset, ordered by (video_id, frame_idx).
struct PredictionEntry {
    std::string video_id;
    std::int64_t frame_idx = 0;
    std::array<double, kNumAus> logits{};
};

struct PredictionRun {
    std::vector<PredictionEntry> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }

    // Sorts entries and enforces (video_id, frame_idx) uniqueness.
    static PredictionRun build(std::vector<PredictionEntry> entries);
};

// Per-video logit track with strictly increasing frame indices.
struct LogitSequence {
    std::string video_id;
    std::vector<std::int64_t> frames;
    Matrix logits;  // frames.size() x 12
};

// Splits a run into per-video sequences (entries are already sorted).
std::vector<LogitSequence> split_by_video(const PredictionRun& run);

// Reassembles a run from per-video sequences.
PredictionRun merge_sequences(const std::vector<LogitSequence>& seqs);

}  // namespace aupipe
