#pragma once

#include <array>
#include <cstdint>

#include "aupipe/types.hpp"

namespace aupipe {

// Per-AU confusion counts over valid (non-Invalid) truth frames only.
struct ConfusionCounts {
    struct Cell {
        std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
        std::int64_t valid() const { return tp + fp + fn + tn; }
    };
    std::array<Cell, kNumAus> per_au{};
};

struct F1Report {
    std::array<double, kNumAus> per_au_f1{};
    double macro_f1 = 0.0;
    // True where 2tp+fp+fn == 0 and the 0-by-convention value was used.
    std::array<bool, kNumAus> degenerate{};
};

// preds and truth must cover exactly the same (video_id, frame) keys;
// mismatches raise AlignmentError listing the first 10 offending keys.
// Invalid truth entries are excluded; Invalid prediction entries count as
// negative predictions.
ConfusionCounts confusion(const LabelledDataset& preds, const LabelledDataset& truth,
                          bool use_clean_truth = false);

// Per-AU F1 = 2tp/(2tp+fp+fn), 0 when the denominator is 0 (flagged);
// macro F1 is the arithmetic mean over the 12 AUs.
F1Report f1(const ConfusionCounts& counts);

// Convenience composition.
F1Report f1_score(const LabelledDataset& preds, const LabelledDataset& truth,
                  bool use_clean_truth = false);

}  // namespace aupipe
