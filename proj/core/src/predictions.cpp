#include "aupipe/predictions.hpp"

#include <algorithm>
#include <tuple>

namespace aupipe {

PredictionRun PredictionRun::build(std::vector<PredictionEntry> entries) {
    std::sort(entries.begin(), entries.end(), [](const PredictionEntry& a, const PredictionEntry& b) {
        return std::tie(a.video_id, a.frame_idx) < std::tie(b.video_id, b.frame_idx);
    });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].video_id == entries[i - 1].video_id &&
            entries[i].frame_idx == entries[i - 1].frame_idx)
            throw DuplicateKeyError("duplicate prediction key (" + entries[i].video_id + ", " +
                                    std::to_string(entries[i].frame_idx) + ")");
    }
    PredictionRun run;
    run.entries = std::move(entries);
    return run;
}

std::vector<LogitSequence> split_by_video(const PredictionRun& run) {
    std::vector<LogitSequence> seqs;
    std::size_t i = 0;
    while (i < run.entries.size()) {
        std::size_t j = i;
        while (j < run.entries.size() && run.entries[j].video_id == run.entries[i].video_id) ++j;
        LogitSequence seq;
        seq.video_id = run.entries[i].video_id;
        seq.frames.reserve(j - i);
        seq.logits = Matrix(j - i, kNumAus);
        for (std::size_t r = i; r < j; ++r) {
            seq.frames.push_back(run.entries[r].frame_idx);
            for (int k = 0; k < kNumAus; ++k)
                seq.logits(r - i, static_cast<std::size_t>(k)) =
                    run.entries[r].logits[static_cast<std::size_t>(k)];
        }
        seqs.push_back(std::move(seq));
        i = j;
    }
    return seqs;
}

PredictionRun merge_sequences(const std::vector<LogitSequence>& seqs) {
    std::vector<PredictionEntry> entries;
    for (const auto& seq : seqs) {
        for (std::size_t r = 0; r < seq.frames.size(); ++r) {
            PredictionEntry e;
            e.video_id = seq.video_id;
            e.frame_idx = seq.frames[r];
            for (int k = 0; k < kNumAus; ++k)
                e.logits[static_cast<std::size_t>(k)] = seq.logits(r, static_cast<std::size_t>(k));
            entries.push_back(std::move(e));
        }
    }
    return PredictionRun::build(std::move(entries));
}

}  // namespace aupipe
