#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aupipe/imbalance.hpp"
#include "aupipe/loss.hpp"
#include "aupipe/model.hpp"
#include "aupipe/optim.hpp"
#include "aupipe/synth.hpp"
#include "aupipe/train.hpp"

namespace aupipe {

// Whole-pipeline configuration, loadable from JSON. Parsing is strict: an
// unknown key anywhere raises ConfigError with its dotted path, so typos
// cannot silently fall back to defaults. Field defaults double as the
// shipped default preset (configs/default.json is the canonical dump of a
// default-constructed PipelineConfig).

enum class ResampleMethod { None, MlRos, Manual };

struct ResampleSection {
    ResampleMethod method = ResampleMethod::MlRos;
    CloneBudget clone_budget;                        // ml_ros only
    std::optional<ManualResampleTable> manual_table; // manual only; unset = table defaults
};

struct PostprocessSection {
    int smooth_window = 5;  // odd; 1 disables smoothing
    double threshold = 0.0;
};

struct EnsembleSection {
    // Models trained with independent seeds; each contributes its raw and
    // its smoothed prediction track as a separate ensemble candidate.
    int n_models = 5;
    // Extra per-run smoothing applied inside ensemble selection, on top of
    // the postprocess smoothing the pipeline already did. A single entry
    // broadcasts to every run; 1 leaves runs untouched.
    std::vector<int> windows = {1};
};

// Optional fixed seeds per stage; anything unset derives from the global
// seed as derive_seed(seed, stage_name).
struct StageSeedOverrides {
    std::optional<std::uint64_t> synth;
    std::optional<std::uint64_t> split;
    std::optional<std::uint64_t> resample;
    std::optional<std::uint64_t> init;
    std::optional<std::uint64_t> train;
};

struct PipelineConfig {
    std::uint64_t seed = 0;
    SynthConfig synth;          // synth.seed is ignored; stage_seed("synth") wins
    double val_fraction = 0.25;
    ResampleSection resample;
    ModelConfig model;          // input_dim 0 = taken from the data
    OptimConfig optim;
    LossConfig loss;
    SamplerKind sampler = SamplerKind::Balanced;
    PostprocessSection postprocess;
    EnsembleSection ensemble;
    StageSeedOverrides seeds;

    void validate() const;

    // Stage names: "synth", "split", "resample", "init", "train".
    std::uint64_t stage_seed(std::string_view stage) const;
};

PipelineConfig parse_pipeline_config(const std::string& json_text);
PipelineConfig load_pipeline_config(const std::string& path);

// Canonical two-space-indented JSON; parse(dump(c)) == c for any valid c.
std::string dump_pipeline_config(const PipelineConfig& cfg);

}  // namespace aupipe
