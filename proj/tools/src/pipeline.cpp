#include "pipeline.hpp"

#include <filesystem>

#include <json.hpp>

#include "aupipe/csv.hpp"
#include "aupipe/ensemble.hpp"
#include "aupipe/error.hpp"
#include "aupipe/imbalance.hpp"
#include "aupipe/postprocess.hpp"
#include "aupipe/rng.hpp"
#include "aupipe/synth.hpp"
#include "aupipe/train.hpp"
#include "json_util.hpp"

namespace aupipe::cli {

namespace {

using nlohmann::json;

std::string run_name(int m) { return "model_" + std::to_string(m); }

std::string history_json(const History& history) {
    json rows = json::array();
    for (const EpochStats& row : history.epochs) {
        json r;
        r["epoch"] = row.epoch;
        r["mean_train_loss"] = row.mean_train_loss;
        r["lr"] = row.lr;
        if (row.has_val) {
            json per_au = json::object();
            for (int k = 0; k < kNumAus; ++k)
                per_au[kAuNames[static_cast<std::size_t>(k)]] =
                    row.val_f1[static_cast<std::size_t>(k)];
            r["val_f1"] = per_au;
            r["macro_val_f1"] = row.macro_val_f1;
        }
        rows.push_back(r);
    }
    return rows.dump(2) + "\n";
}

}  // namespace

ReproOutcome run_repro(const PipelineConfig& cfg, const std::string& out_dir, std::ostream& log) {
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir + ": " + ec.message());
    const auto file = [&out_dir](const std::string& name) { return out_dir + "/" + name; };
    write_text_file(file("config.json"), dump_pipeline_config(cfg));

    SynthConfig synth_cfg = cfg.synth;
    synth_cfg.seed = cfg.stage_seed("synth");
    const LabelledDataset full = generate_synthetic(synth_cfg);
    write_text_file(file("dataset.csv"), write_dataset_csv(full));
    log << "synth: " << full.size() << " samples, " << full.video_ids().size() << " videos\n";

    const auto [train_split, val_split] =
        split_by_video(full, cfg.val_fraction, cfg.stage_seed("split"));
    write_text_file(file("train.csv"), write_dataset_csv(train_split));
    write_text_file(file("val.csv"), write_dataset_csv(val_split));
    log << "split: " << train_split.size() << " train / " << val_split.size() << " val samples\n";

    const ImbalanceReport before = label_counts(train_split);
    LabelledDataset train_ds;
    if (cfg.resample.method == ResampleMethod::None) {
        train_ds = train_split;
    } else {
        ResampleConfig rc;
        rc.clone_budget = cfg.resample.clone_budget;
        rc.seed = cfg.stage_seed("resample");
        if (cfg.resample.method == ResampleMethod::Manual)
            rc.manual = cfg.resample.manual_table.value_or(ManualResampleTable{});
        train_ds = resample(train_split, rc);
    }
    write_text_file(file("resampled.csv"), write_dataset_csv(train_ds));
    const ImbalanceReport after = label_counts(train_ds);
    log << "resample: " << train_split.size() << " -> " << train_ds.size()
        << " samples, mean_ir " << before.mean_ir << " -> " << after.mean_ir << "\n";

    ReproOutcome outcome;
    std::vector<NamedRun> candidates;
    json per_run_metrics = json::object();
    for (int m = 0; m < cfg.ensemble.n_models; ++m) {
        const std::string name = run_name(m);
        TrainOptions options;
        options.model = cfg.model;
        options.model.init_seed = derive_seed(cfg.stage_seed("init"), "model",
                                              static_cast<std::uint64_t>(m));
        options.optim = cfg.optim;
        options.loss = cfg.loss;
        options.sampler = cfg.sampler;
        options.seed = derive_seed(cfg.stage_seed("train"), "model",
                                   static_cast<std::uint64_t>(m));
        const std::string ckpt_dir = file(name);
        std::filesystem::create_directories(ckpt_dir, ec);
        if (ec) throw IoError("cannot create " + ckpt_dir + ": " + ec.message());
        options.checkpoint_dir = ckpt_dir;

        const TrainResult result = train(train_ds, &val_split, options);
        for (const std::string& warning : result.warnings) log << name << ": " << warning << "\n";
        write_text_file(file("history_" + std::to_string(m) + ".json"),
                        history_json(result.history));

        const PredictionRun raw = predict(result.final_checkpoint.model, val_split);
        write_predictions(raw, file("preds_raw_" + std::to_string(m) + ".csv"));
        candidates.push_back(NamedRun{name + "_w1", raw});
        if (cfg.postprocess.smooth_window != 1) {
            const PredictionRun smoothed = smooth_logits(raw, cfg.postprocess.smooth_window);
            write_predictions(smoothed, file("preds_smoothed_" + std::to_string(m) + ".csv"));
            candidates.push_back(
                NamedRun{name + "_w" + std::to_string(cfg.postprocess.smooth_window), smoothed});
        }
    }

    for (const NamedRun& candidate : candidates) {
        const F1Report rep =
            f1_score(binarize(candidate.run, cfg.postprocess.threshold), val_split);
        outcome.run_names.push_back(candidate.name);
        outcome.run_macro_f1.push_back(rep.macro_f1);
        per_run_metrics[candidate.name] = f1_to_json_obj(rep);
        log << candidate.name << ": macro val F1 " << rep.macro_f1 << "\n";
    }

    const EnsembleSpec spec = select_ensemble(candidates, val_split, cfg.ensemble.windows,
                                              cfg.postprocess.threshold);
    const PredictionRun combined = apply_ensemble(spec, candidates);
    write_predictions(combined, file("ensemble.csv"));
    outcome.ensemble_f1 =
        f1_score(binarize(combined, cfg.postprocess.threshold), val_split);
    log << "ensemble: macro val F1 " << outcome.ensemble_f1.macro_f1 << "\n";

    json metrics;
    metrics["per_run"] = per_run_metrics;
    metrics["ensemble"] = f1_to_json_obj(outcome.ensemble_f1);
    json chosen = json::object();
    for (int k = 0; k < kNumAus; ++k)
        chosen[kAuNames[static_cast<std::size_t>(k)]] =
            spec.chosen_run[static_cast<std::size_t>(k)];
    metrics["chosen_run"] = chosen;
    metrics["mean_ir_before_resample"] = before.mean_ir;
    metrics["mean_ir_after_resample"] = after.mean_ir;
    outcome.metrics_json = metrics.dump(2) + "\n";
    write_text_file(file("metrics.json"), outcome.metrics_json);
    return outcome;
}

}  // namespace aupipe::cli
