#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "aupipe/config.hpp"
#include "aupipe/metrics.hpp"

namespace aupipe::cli {

struct ReproOutcome {
    F1Report ensemble_f1;              // combined run scored on the validation split
    std::vector<std::string> run_names;
    std::vector<double> run_macro_f1;  // parallel to run_names; every ensemble candidate
    std::string metrics_json;          // exact bytes of the written metrics.json
};

// Full pipeline under one config: synth -> split -> resample -> train
// n_models models -> predict -> smooth -> eval -> ensemble. Each model
// contributes its raw and its smoothed track as separate ensemble
// candidates, so the per-AU selection can also decide whether smoothing
// helps that AU. Every artifact lands under out_dir with fixed names;
// progress lines go to `log` only, so the artifacts are byte-identical
// across reruns of the same config.
ReproOutcome run_repro(const PipelineConfig& cfg, const std::string& out_dir, std::ostream& log);

}  // namespace aupipe::cli
