#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aupipe/error.hpp"

namespace aupipe {

inline constexpr int kNumAus = 12;

// Fixed AU column order used by every 12-vector in the pipeline.
inline constexpr std::array<const char*, kNumAus> kAuNames = {
    "AU1", "AU2", "AU4", "AU6", "AU7", "AU10", "AU12", "AU15", "AU23", "AU24", "AU25", "AU26"};

// Returns the index of an AU name in kAuNames, or -1 if unknown.
int au_index(const std::string& name);

enum class AuLabel : std::int8_t {
    Negative = 0,
    Positive = 1,
    Invalid = -1,  // excluded from every loss and every metric
};

struct AuLabelVector {
    std::array<AuLabel, kNumAus> values{};

    AuLabelVector() { values.fill(AuLabel::Negative); }

    AuLabel operator[](int k) const { return values[static_cast<std::size_t>(k)]; }
    AuLabel& operator[](int k) { return values[static_cast<std::size_t>(k)]; }

    bool is_valid(int k) const { return values[static_cast<std::size_t>(k)] != AuLabel::Invalid; }
    bool is_positive(int k) const { return values[static_cast<std::size_t>(k)] == AuLabel::Positive; }

    bool operator==(const AuLabelVector&) const = default;
};

struct Sample {
    std::string video_id;
    std::int64_t frame_idx = 0;
    std::vector<double> features;  // empty when the dataset is labels-only
    AuLabelVector labels;          // observed labels (flicker included, if any)
    AuLabelVector clean_labels;    // pre-flicker ground truth; == labels otherwise
};

// Ordered sample collection. Iteration order is (video_id, frame_idx)
// lexicographic; construction sorts and enforces key uniqueness.
struct LabelledDataset {
    std::vector<Sample> samples;
    std::size_t feature_dim = 0;  // 0 = labels only
    bool has_clean = false;       // true when clean_labels carry a distinct channel

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }

    static constexpr const std::array<const char*, kNumAus>& au_names() { return kAuNames; }

    // Sorts samples, checks key uniqueness and uniform feature dimension.
    static LabelledDataset build(std::vector<Sample> samples, bool has_clean = false);

    std::vector<std::string> video_ids() const;  // distinct, sorted
};

// Video-granular split: no video straddles both sides. Deterministic in seed.
std::pair<LabelledDataset, LabelledDataset> split_by_video(const LabelledDataset& ds,
                                                           double val_fraction,
                                                           std::uint64_t seed);

}  // namespace aupipe
