#include "aupipe/imbalance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aupipe/rng.hpp"

namespace aupipe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::array<std::int64_t, kNumAus> positive_counts(const std::vector<Sample>& samples) {
    std::array<std::int64_t, kNumAus> pos{};
    for (const auto& s : samples)
        for (int k = 0; k < kNumAus; ++k)
            if (s.labels[k] == AuLabel::Positive) ++pos[static_cast<std::size_t>(k)];
    return pos;
}

std::int64_t max_count(const std::array<std::int64_t, kNumAus>& pos) {
    return *std::max_element(pos.begin(), pos.end());
}

double irlbl_of(const std::array<std::int64_t, kNumAus>& pos, int k) {
    const auto p = pos[static_cast<std::size_t>(k)];
    if (p == 0) return kInf;
    return static_cast<double>(max_count(pos)) / static_cast<double>(p);
}

}  // namespace

bool ImbalanceReport::has_infinite_irlbl() const {
    return std::any_of(irlbl.begin(), irlbl.end(), [](double v) { return std::isinf(v); });
}

ImbalanceReport label_counts(const LabelledDataset& ds) {
    if (ds.empty()) throw ValueError("label_counts: dataset is empty");
    ImbalanceReport rep;
    for (const auto& s : ds.samples) {
        for (int k = 0; k < kNumAus; ++k) {
            switch (s.labels[k]) {
                case AuLabel::Positive: ++rep.pos_counts[static_cast<std::size_t>(k)]; break;
                case AuLabel::Negative: ++rep.neg_counts[static_cast<std::size_t>(k)]; break;
                case AuLabel::Invalid: break;
            }
        }
    }
    double sum = 0.0;
    int finite = 0;
    for (int k = 0; k < kNumAus; ++k) {
        rep.irlbl[static_cast<std::size_t>(k)] = irlbl_of(rep.pos_counts, k);
        if (std::isfinite(rep.irlbl[static_cast<std::size_t>(k)])) {
            sum += rep.irlbl[static_cast<std::size_t>(k)];
            ++finite;
        }
    }
    rep.mean_ir = finite > 0 ? sum / finite : kInf;
    return rep;
}

std::int64_t CloneBudget::resolve(std::size_t dataset_size) const {
    switch (kind) {
        case Kind::Count: return static_cast<std::int64_t>(value);
        case Kind::Percent:
            return std::llround(value / 100.0 * static_cast<double>(dataset_size));
    }
    return 0;
}

LabelledDataset ml_ros(const LabelledDataset& ds, const ResampleConfig& cfg, MlRosTrace* trace) {
    if (ds.empty()) throw ValueError("ml_ros: dataset is empty");
    const std::int64_t budget = cfg.clone_budget.resolve(ds.size());
    if (budget < 1) throw ConfigError("ml_ros: clone budget resolves to " +
                                      std::to_string(budget) + " clones; need >= 1");

    const ImbalanceReport rep = label_counts(ds);
    MlRosTrace local;
    MlRosTrace& tr = trace ? *trace : local;
    tr = MlRosTrace{};
    tr.mean_ir = rep.mean_ir;
    tr.budget = budget;

    // Bags are frozen on the input: labels with finite irlbl above mean_ir,
    // holding the input-sample indices that carry the label.
    std::vector<int> bag_labels;
    std::array<std::vector<std::size_t>, kNumAus> members;
    for (int k = 0; k < kNumAus; ++k) {
        const double ir = rep.irlbl[static_cast<std::size_t>(k)];
        if (std::isfinite(ir) && ir > rep.mean_ir) bag_labels.push_back(k);
    }
    for (std::size_t i = 0; i < ds.samples.size(); ++i)
        for (int k : bag_labels)
            if (ds.samples[i].labels[k] == AuLabel::Positive)
                members[static_cast<std::size_t>(k)].push_back(i);

    tr.minority_labels = bag_labels;
    if (bag_labels.empty()) {
        tr.nothing_to_do = true;
        return ds;
    }

    std::array<std::int64_t, kNumAus> pos = rep.pos_counts;
    std::vector<bool> retired(bag_labels.size(), false);
    std::size_t active = bag_labels.size();
    std::int64_t remaining = budget;
    Rng rng(cfg.seed);

    std::vector<Sample> out = ds.samples;
    std::int64_t clone_serial = 0;
    std::size_t turn = 0;
    while (remaining > 0 && active > 0) {
        const std::size_t b = turn % bag_labels.size();
        ++turn;
        if (retired[b]) continue;
        const int label = bag_labels[b];
        const auto& bag = members[static_cast<std::size_t>(label)];
        const std::size_t pick = bag[rng.uniform_int(bag.size())];

        Sample clone = ds.samples[pick];
        ++clone_serial;
        clone.video_id += "#clone" + std::to_string(clone_serial);
        for (int k = 0; k < kNumAus; ++k)
            if (clone.labels[k] == AuLabel::Positive) ++pos[static_cast<std::size_t>(k)];
        out.push_back(std::move(clone));
        --remaining;

        MlRosStep step;
        step.label = label;
        step.source_index = pick;
        step.pos_counts_after = pos;
        step.irlbl_after = irlbl_of(pos, label);
        if (step.irlbl_after <= rep.mean_ir) {
            retired[b] = true;
            --active;
            step.retired = true;
        }
        tr.steps.push_back(step);
    }
    return LabelledDataset::build(std::move(out), ds.has_clean);
}

namespace {

LabelledDataset manual_resample(const LabelledDataset& ds, const ResampleConfig& cfg) {
    const ManualResampleTable& table = *cfg.manual;
    for (int k = 0; k < kNumAus; ++k) {
        if (table.repeat[static_cast<std::size_t>(k)] < 1.0)
            throw ConfigError("manual resample: repeat factors must be >= 1");
        const double keep = table.keep[static_cast<std::size_t>(k)];
        if (!(keep > 0.0 && keep <= 1.0))
            throw ConfigError("manual resample: keep probabilities must lie in (0, 1]");
    }

    Rng rng(cfg.seed);
    std::vector<Sample> out;
    std::int64_t clone_serial = 0;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const Sample& s = ds.samples[i];
        double repeat = 1.0, keep = 1.0;
        for (int k = 0; k < kNumAus; ++k) {
            if (s.labels[k] != AuLabel::Positive) continue;
            repeat = std::max(repeat, table.repeat[static_cast<std::size_t>(k)]);
            keep = std::min(keep, table.keep[static_cast<std::size_t>(k)]);
        }
        // Oversampling wins over downsampling when a sample carries both.
        const double expected = repeat > 1.0 ? repeat : keep;
        auto copies = static_cast<std::int64_t>(expected);
        if (rng.bernoulli(expected - static_cast<double>(copies))) ++copies;
        for (std::int64_t c = 0; c < copies; ++c) {
            Sample copy = s;
            if (c > 0) copy.video_id += "#clone" + std::to_string(++clone_serial);
            out.push_back(std::move(copy));
        }
    }
    if (out.empty()) throw ValueError("manual resample dropped every sample");
    return LabelledDataset::build(std::move(out), ds.has_clean);
}

}  // namespace

LabelledDataset resample(const LabelledDataset& ds, const ResampleConfig& cfg, MlRosTrace* trace) {
    if (cfg.manual.has_value()) return manual_resample(ds, cfg);
    return ml_ros(ds, cfg, trace);
}

}  // namespace aupipe
