#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "aupipe/types.hpp"

namespace aupipe {

// Per-label imbalance quantities. irlbl[k] = max_j pos[j] / pos[k]
// (+inf when pos[k] == 0); mean_ir averages the finite entries.
struct ImbalanceReport {
    std::array<std::int64_t, kNumAus> pos_counts{};
    std::array<std::int64_t, kNumAus> neg_counts{};
    std::array<double, kNumAus> irlbl{};
    double mean_ir = 1.0;

    bool has_infinite_irlbl() const;
};

// Counts exclude Invalid entries. An all-Invalid AU gets irlbl = +inf and is
// flagged, not treated as an error.
ImbalanceReport label_counts(const LabelledDataset& ds);

// Clone budget: either an absolute clone count or a percentage of |D|.
struct CloneBudget {
    enum class Kind { Count, Percent };
    Kind kind = Kind::Percent;
    double value = 25.0;

    static CloneBudget count(std::int64_t n) { return {Kind::Count, static_cast<double>(n)}; }
    static CloneBudget percent(double p) { return {Kind::Percent, p}; }
    std::int64_t resolve(std::size_t dataset_size) const;
};

// Fixed per-AU repeat/keep table for the manual oversample/downsample
// strategy. Repeat > 1 duplicates samples carrying that AU; keep < 1 drops
// them probabilistically. Defaults: 2x repeat on the rare AUs
// (AU2/AU15/AU23/AU24/AU26), keep 0.5 on the common ones.
struct ManualResampleTable {
    std::array<double, kNumAus> repeat = {1, 2, 1, 1, 1, 1, 1, 2, 2, 2, 1, 2};
    std::array<double, kNumAus> keep = {0.5, 1, 0.5, 0.5, 0.5, 0.5, 0.5, 1, 1, 1, 0.5, 1};
};

struct ResampleConfig {
    CloneBudget clone_budget;
    std::uint64_t seed = 0;
    std::optional<ManualResampleTable> manual;  // engages the manual strategy when set
};

// One ML-ROS clone step, recorded for the brute-force state-trace oracle.
struct MlRosStep {
    int label = 0;                 // minority bag the turn belonged to
    std::size_t source_index = 0;  // input-sample index that was cloned
    std::array<std::int64_t, kNumAus> pos_counts_after{};
    double irlbl_after = 0.0;      // bag label's irlbl after the clone
    bool retired = false;          // bag dropped out after this step
};

struct MlRosTrace {
    double mean_ir = 1.0;              // frozen; computed once on the input
    std::vector<int> minority_labels;  // initial bags in round-robin order
    std::vector<MlRosStep> steps;
    std::int64_t budget = 0;
    bool nothing_to_do = false;
};

// Multi-label random oversampling. mean_ir is frozen on the input; minority
// bags (finite irlbl > mean_ir) are visited round-robin, each turn cloning
// one uniformly random bag member (keeping all its labels); a bag retires
// once its irlbl, recomputed against the current max positive count, falls
// to mean_ir. Original samples are never touched; clones get ids suffixed
// "#cloneN". Deterministic given cfg.seed.
LabelledDataset ml_ros(const LabelledDataset& ds, const ResampleConfig& cfg,
                       MlRosTrace* trace = nullptr);

// Dispatches to ml_ros or the manual repeat/keep strategy per cfg.manual.
LabelledDataset resample(const LabelledDataset& ds, const ResampleConfig& cfg,
                         MlRosTrace* trace = nullptr);

}  // namespace aupipe
