#include "aupipe/postprocess.hpp"

#include <algorithm>
#include <string>

namespace aupipe {

LogitSequence smooth_logits(const LogitSequence& seq, int window) {
    const auto n = static_cast<std::ptrdiff_t>(seq.frames.size());
    if (window % 2 == 0) throw ConfigError("smoothing window must be odd, got " +
                                           std::to_string(window));
    if (window < 1) throw ConfigError("smoothing window must be >= 1");
    if (n > 0 && window > 2 * n - 1)
        throw ConfigError("smoothing window " + std::to_string(window) +
                          " exceeds 2*len-1 = " + std::to_string(2 * n - 1));

    LogitSequence out = seq;
    if (window == 1 || n == 0) return out;
    const int half = window / 2;
    const double inv_w = 1.0 / static_cast<double>(window);
    for (std::ptrdiff_t t = 0; t < n; ++t) {
        for (int k = 0; k < kNumAus; ++k) {
            double sum = 0.0;
            for (int d = -half; d <= half; ++d) {
                const std::ptrdiff_t idx = std::clamp<std::ptrdiff_t>(t + d, 0, n - 1);
                sum += seq.logits(static_cast<std::size_t>(idx), static_cast<std::size_t>(k));
            }
            out.logits(static_cast<std::size_t>(t), static_cast<std::size_t>(k)) = sum * inv_w;
        }
    }
    return out;
}

PredictionRun smooth_logits(const PredictionRun& run, int window) {
    auto seqs = split_by_video(run);
    for (auto& seq : seqs) seq = smooth_logits(seq, window);
    return merge_sequences(seqs);
}

LabelledDataset binarize(const PredictionRun& run, double threshold) {
    std::vector<Sample> samples;
    samples.reserve(run.size());
    for (const auto& e : run.entries) {
        Sample s;
        s.video_id = e.video_id;
        s.frame_idx = e.frame_idx;
        for (int k = 0; k < kNumAus; ++k)
            s.labels[k] = e.logits[static_cast<std::size_t>(k)] > threshold ? AuLabel::Positive
                                                                            : AuLabel::Negative;
        s.clean_labels = s.labels;
        samples.push_back(std::move(s));
    }
    return LabelledDataset::build(std::move(samples));
}

}  // namespace aupipe
