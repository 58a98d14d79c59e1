#pragma once

#include <map>
#include <string>
#include <vector>

#include "aupipe/metrics.hpp"
#include "aupipe/predictions.hpp"

namespace aupipe {

struct NamedRun {
    std::string name;
    PredictionRun run;
};

// Per-AU model assignment derived from per-AU validation F1, plus the full
// F1 table it was selected from.
struct EnsembleSpec {
    std::array<std::string, kNumAus> chosen_run{};
    std::map<std::string, F1Report> provenance;
};

// For every AU, picks the run with the highest per-AU F1 against truth on
// the selection set; exact ties go to the lexicographically smallest run
// name. Each run is smoothed with its window (1 = none) before scoring;
// `windows` holds one entry per run or a single broadcast entry.
EnsembleSpec select_ensemble(const std::vector<NamedRun>& runs, const LabelledDataset& truth,
                             const std::vector<int>& windows = {1}, double threshold = 0.0);

// Column-swap combination: AU k's logits are taken verbatim from the run the
// spec chose for AU k. Runs must be frame-aligned; a spec entry naming an
// absent run raises SpecError.
PredictionRun apply_ensemble(const EnsembleSpec& spec, const std::vector<NamedRun>& runs);

}  // namespace aupipe
