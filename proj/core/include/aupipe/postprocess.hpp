#pragma once

#include "aupipe/predictions.hpp"

namespace aupipe {

// Centered per-AU moving average over a video's logit track. The window must
// be odd; edges replicate the first/last frame so every output averages a
// full window (this shifts the outer floor(window/2) frames). window = 1 is
// the identity.
LogitSequence smooth_logits(const LogitSequence& seq, int window);

// Smooths every video track of a run independently.
PredictionRun smooth_logits(const PredictionRun& run, int window);

// prediction = 1 iff logit > threshold (strict; a logit exactly at the
// threshold maps to 0). Threshold 0 on logits equals 0.5 on probabilities.
// Result is a labels-only dataset so it plugs directly into the metrics.
LabelledDataset binarize(const PredictionRun& run, double threshold = 0.0);

}  // namespace aupipe
