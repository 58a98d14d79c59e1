#include "aupipe/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "aupipe/rng.hpp"

namespace aupipe {

int au_index(const std::string& name) {
    for (int k = 0; k < kNumAus; ++k)
        if (name == kAuNames[static_cast<std::size_t>(k)]) return k;
    return -1;
}

LabelledDataset LabelledDataset::build(std::vector<Sample> samples, bool has_clean) {
    std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) {
        return std::tie(a.video_id, a.frame_idx) < std::tie(b.video_id, b.frame_idx);
    });
    std::size_t feature_dim = samples.empty() ? 0 : samples.front().features.size();
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (i > 0 && samples[i].video_id == samples[i - 1].video_id &&
            samples[i].frame_idx == samples[i - 1].frame_idx) {
            throw DuplicateKeyError("duplicate sample key (" + samples[i].video_id + ", " +
                                    std::to_string(samples[i].frame_idx) + ")");
        }
        if (samples[i].features.size() != feature_dim) {
            throw ShapeError("inconsistent feature dimension at (" + samples[i].video_id + ", " +
                             std::to_string(samples[i].frame_idx) + "): expected " +
                             std::to_string(feature_dim) + ", got " +
                             std::to_string(samples[i].features.size()));
        }
    }
    LabelledDataset ds;
    ds.samples = std::move(samples);
    ds.feature_dim = feature_dim;
    ds.has_clean = has_clean;
    return ds;
}

std::vector<std::string> LabelledDataset::video_ids() const {
    std::vector<std::string> ids;
    for (const auto& s : samples)
        if (ids.empty() || ids.back() != s.video_id) ids.push_back(s.video_id);
    // samples are sorted, so consecutive dedup is enough
    return ids;
}

std::pair<LabelledDataset, LabelledDataset> split_by_video(const LabelledDataset& ds,
                                                           double val_fraction,
                                                           std::uint64_t seed) {
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw ConfigError("val_fraction must lie in (0, 1), got " + std::to_string(val_fraction));
    std::vector<std::string> ids = ds.video_ids();
    if (ids.size() < 2)
        throw SplitError("split_by_video requires at least 2 videos, got " +
                         std::to_string(ids.size()));

    // Fisher-Yates on the sorted id list, then take the tail as validation.
    Rng rng(seed);
    for (std::size_t i = ids.size() - 1; i > 0; --i) {
        const auto j = rng.uniform_int(i + 1);
        std::swap(ids[i], ids[j]);
    }
    auto n_val = static_cast<std::size_t>(
        std::llround(val_fraction * static_cast<double>(ids.size())));
    n_val = std::clamp<std::size_t>(n_val, 1, ids.size() - 1);

    std::set<std::string> val_ids(ids.end() - static_cast<std::ptrdiff_t>(n_val), ids.end());
    std::vector<Sample> train, val;
    for (const auto& s : ds.samples)
        (val_ids.count(s.video_id) ? val : train).push_back(s);
    return {LabelledDataset::build(std::move(train), ds.has_clean),
            LabelledDataset::build(std::move(val), ds.has_clean)};
}

}  // namespace aupipe
