#include "aupipe/metrics.hpp"

#include <string>
#include <tuple>

namespace aupipe {

ConfusionCounts confusion(const LabelledDataset& preds, const LabelledDataset& truth,
                          bool use_clean_truth) {
    // Both sides are sorted by key, so a merge walk finds mismatches.
    std::vector<std::string> offenders;
    std::size_t i = 0, j = 0;
    ConfusionCounts counts;
    auto key_str = [](const Sample& s) {
        return "(" + s.video_id + ", " + std::to_string(s.frame_idx) + ")";
    };
    auto key_less = [](const Sample& a, const Sample& b) {
        return std::tie(a.video_id, a.frame_idx) < std::tie(b.video_id, b.frame_idx);
    };
    while (i < preds.size() || j < truth.size()) {
        if (j >= truth.size() || (i < preds.size() && key_less(preds.samples[i], truth.samples[j]))) {
            if (offenders.size() < 10) offenders.push_back("pred-only " + key_str(preds.samples[i]));
            ++i;
            continue;
        }
        if (i >= preds.size() || key_less(truth.samples[j], preds.samples[i])) {
            if (offenders.size() < 10) offenders.push_back("truth-only " + key_str(truth.samples[j]));
            ++j;
            continue;
        }
        const Sample& p = preds.samples[i];
        const Sample& t = truth.samples[j];
        const AuLabelVector& tl = use_clean_truth ? t.clean_labels : t.labels;
        for (int k = 0; k < kNumAus; ++k) {
            if (tl[k] == AuLabel::Invalid) continue;
            const bool truth_pos = tl[k] == AuLabel::Positive;
            const bool pred_pos = p.labels[k] == AuLabel::Positive;
            auto& cell = counts.per_au[static_cast<std::size_t>(k)];
            if (pred_pos && truth_pos) ++cell.tp;
            else if (pred_pos && !truth_pos) ++cell.fp;
            else if (!pred_pos && truth_pos) ++cell.fn;
            else ++cell.tn;
        }
        ++i;
        ++j;
    }
    if (!offenders.empty()) {
        std::string msg = "prediction/truth frame mismatch; first offenders:";
        for (const auto& o : offenders) msg += " " + o;
        throw AlignmentError(msg);
    }
    return counts;
}

F1Report f1(const ConfusionCounts& counts) {
    F1Report rep;
    double sum = 0.0;
    for (int k = 0; k < kNumAus; ++k) {
        const auto& c = counts.per_au[static_cast<std::size_t>(k)];
        const std::int64_t denom = 2 * c.tp + c.fp + c.fn;
        double v = 0.0;
        if (denom == 0) {
            rep.degenerate[static_cast<std::size_t>(k)] = true;
        } else {
            v = 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
        }
        rep.per_au_f1[static_cast<std::size_t>(k)] = v;
        sum += v;
    }
    rep.macro_f1 = sum / kNumAus;
    return rep;
}

F1Report f1_score(const LabelledDataset& preds, const LabelledDataset& truth,
                  bool use_clean_truth) {
    return f1(confusion(preds, truth, use_clean_truth));
}

}  // namespace aupipe
