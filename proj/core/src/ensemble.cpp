#include "aupipe/ensemble.hpp"

#include <algorithm>

#include "aupipe/postprocess.hpp"

namespace aupipe {

namespace {

void check_runs(const std::vector<NamedRun>& runs) {
    if (runs.empty()) throw ValueError("ensemble: need at least one run");
    for (std::size_t a = 1; a < runs.size(); ++a)
        if (runs[a].name == runs[a - 1].name || runs[a].run.size() != runs[0].run.size())
            for (std::size_t b = 0; b < a; ++b)
                if (runs[a].name == runs[b].name)
                    throw ValueError("ensemble: duplicate run name '" + runs[a].name + "'");
}

void check_alignment(const PredictionRun& a, const PredictionRun& b, const std::string& name) {
    if (a.size() != b.size())
        throw AlignmentError("ensemble: run '" + name + "' covers " + std::to_string(b.size()) +
                             " frames, expected " + std::to_string(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a.entries[i].video_id != b.entries[i].video_id ||
            a.entries[i].frame_idx != b.entries[i].frame_idx)
            throw AlignmentError("ensemble: run '" + name + "' misaligned at (" +
                                 b.entries[i].video_id + ", " +
                                 std::to_string(b.entries[i].frame_idx) + ")");
}

}  // namespace

EnsembleSpec select_ensemble(const std::vector<NamedRun>& runs, const LabelledDataset& truth,
                             const std::vector<int>& windows, double threshold) {
    check_runs(runs);
    if (windows.size() != 1 && windows.size() != runs.size())
        throw ConfigError("ensemble: windows must hold 1 entry or one per run");

    EnsembleSpec spec;
    for (std::size_t r = 0; r < runs.size(); ++r) {
        const int window = windows[windows.size() == 1 ? 0 : r];
        const PredictionRun scored =
            window == 1 ? runs[r].run : smooth_logits(runs[r].run, window);
        spec.provenance[runs[r].name] = f1_score(binarize(scored, threshold), truth);
    }

    for (int k = 0; k < kNumAus; ++k) {
        const std::string* best_name = nullptr;
        double best_f1 = -1.0;
        for (const auto& run : runs) {
            const double v = spec.provenance.at(run.name).per_au_f1[static_cast<std::size_t>(k)];
            if (v > best_f1 || (v == best_f1 && best_name && run.name < *best_name)) {
                best_f1 = v;
                best_name = &run.name;
            }
        }
        spec.chosen_run[static_cast<std::size_t>(k)] = *best_name;
    }
    return spec;
}

PredictionRun apply_ensemble(const EnsembleSpec& spec, const std::vector<NamedRun>& runs) {
    check_runs(runs);
    std::array<const PredictionRun*, kNumAus> sources{};
    for (int k = 0; k < kNumAus; ++k) {
        const std::string& want = spec.chosen_run[static_cast<std::size_t>(k)];
        const auto it = std::find_if(runs.begin(), runs.end(),
                                     [&](const NamedRun& r) { return r.name == want; });
        if (it == runs.end())
            throw SpecError("ensemble spec chooses run '" + want + "' for " +
                            kAuNames[static_cast<std::size_t>(k)] +
                            " but no such run was provided");
        sources[static_cast<std::size_t>(k)] = &it->run;
    }
    for (const auto& run : runs) check_alignment(runs[0].run, run.run, run.name);

    PredictionRun combined = runs[0].run;
    for (std::size_t i = 0; i < combined.size(); ++i)
        for (int k = 0; k < kNumAus; ++k)
            combined.entries[i].logits[static_cast<std::size_t>(k)] =
                sources[static_cast<std::size_t>(k)]->entries[i].logits[static_cast<std::size_t>(k)];
    return combined;
}

}  // namespace aupipe
