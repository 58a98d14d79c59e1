#pragma once

#include <array>

#include "aupipe/matrix.hpp"
#include "aupipe/types.hpp"

namespace aupipe {

// Per-AU loss weights: AU15/AU23 get 6x, AU24/AU26 5x, AU2 2x.
inline constexpr std::array<double, kNumAus> kPaperAuWeights = {1, 2, 1, 1, 1, 1,
                                                               1, 6, 6, 5, 1, 5};

enum class LossComponents { BceOnly, MllOnly, Sum };
enum class BatchReduction { Mean, Sum };

struct LossConfig {
    std::array<double, kNumAus> weights = kPaperAuWeights;
    double label_smooth_eps = 0.1;  // 0 disables smoothing
    LossComponents components = LossComponents::Sum;
    BatchReduction batch_reduction = BatchReduction::Mean;
    // Scalar weight on each sample's summed multi-label loss.
    double mll_sample_weight = 1.0;

    void validate() const;
};

// value:       reduced scalar, finite for finite logits.
// per_element: weighted per-element losses before batch reduction; masked
//              entries are exactly 0, so a row sum is the sample's loss term.
// grad:        d(value)/d(logit), batch-reduction factor included; masked
//              entries are exactly 0.
struct LossOutput {
    double value = 0.0;
    Matrix per_element;
    Matrix grad;
};

// Numerically stable logistic function (sign-split form); underflows to 0
// for very negative inputs instead of overflowing.
double stable_sigmoid(double x);

// Weighted binary cross-entropy over logits: each element contributes
// w_k * (max(x,0) - x*y + log1p(exp(-|x|))), summed over the 12 AUs per
// sample and then reduced over the batch per cfg. Targets may be smoothed
// (any value in [0,1]); masked elements contribute nothing to value or grad.
LossOutput bce_loss(const Matrix& logits, const Matrix& targets, const BoolMatrix& mask,
                    const LossConfig& cfg);

// Same stable element term, but the scalar mll_sample_weight scales each
// sample's AU-summed loss instead of weighting per element. Coincides with
// bce_loss exactly (same summation order) when every weight is 1.
LossOutput multi_label_loss(const Matrix& logits, const Matrix& targets, const BoolMatrix& mask,
                            const LossConfig& cfg);

// Component sum (or single-component passthrough) per cfg.components.
LossOutput total_loss(const Matrix& logits, const Matrix& targets, const BoolMatrix& mask,
                      const LossConfig& cfg);

// Hard targets {0,1} -> {eps/2, 1-eps/2}; masked entries pass through
// unchanged. Not idempotent: re-applying smooths the smoothed values again.
Matrix smooth_labels(const Matrix& targets, const BoolMatrix& mask, double eps);

}  // namespace aupipe
