#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include <json.hpp>

#include "aupipe/checkpoint.hpp"
#include "aupipe/config.hpp"
#include "aupipe/csv.hpp"
#include "aupipe/ensemble.hpp"
#include "aupipe/error.hpp"
#include "aupipe/imbalance.hpp"
#include "aupipe/postprocess.hpp"
#include "aupipe/report.hpp"
#include "aupipe/rng.hpp"
#include "aupipe/synth.hpp"
#include "aupipe/train.hpp"
#include "json_util.hpp"
#include "pipeline.hpp"

namespace aupipe::cli {

namespace {

PipelineConfig config_or_default(const std::string& path) {
    if (path.empty()) return PipelineConfig{};
    return load_pipeline_config(path);
}

// Writes a dataset back out in the richest layout it carries.
void write_dataset_file(const LabelledDataset& ds, const std::string& path) {
    if (ds.feature_dim > 0)
        write_text_file(path, write_dataset_csv(ds));
    else
        write_text_file(path, write_label_csv(ds));
}

struct StatsArgs {
    std::string data;
    bool as_json = false;
};

int cmd_stats(const StatsArgs& args) {
    const LabelledDataset ds = load_label_or_dataset_file(args.data);
    const ImbalanceReport report = label_counts(ds);
    std::cout << (args.as_json ? imbalance_to_json(report, ds.size())
                               : format_imbalance_table(report, ds.size()));
    return 0;
}

struct SynthArgs {
    std::string config;
    std::string out;
    std::string clean_out;
    std::uint64_t seed = 0;
    bool seed_given = false;
    bool labels_only = false;
};

int cmd_synth(const SynthArgs& args) {
    PipelineConfig cfg = config_or_default(args.config);
    if (args.seed_given) cfg.seed = args.seed;
    SynthConfig synth_cfg = cfg.synth;
    synth_cfg.seed = cfg.stage_seed("synth");
    const LabelledDataset ds = generate_synthetic(synth_cfg);
    if (args.labels_only)
        write_text_file(args.out, write_label_csv(ds));
    else
        write_text_file(args.out, write_dataset_csv(ds));
    if (!args.clean_out.empty()) write_text_file(args.clean_out, write_label_csv(ds, true));
    std::cerr << "synth: wrote " << ds.size() << " samples to " << args.out << "\n";
    return 0;
}

struct ResampleArgs {
    std::string data;
    std::string out;
    std::string method = "ml_ros";
    double percent = -1.0;
    std::int64_t count = -1;
    std::uint64_t seed = 0;
};

int cmd_resample(const ResampleArgs& args) {
    const LabelledDataset ds = load_label_or_dataset_file(args.data);
    LabelledDataset out;
    if (args.method == "none") {
        out = ds;
    } else {
        ResampleConfig cfg;
        cfg.seed = args.seed;
        if (args.percent >= 0.0 && args.count >= 0)
            throw ConfigError("--percent and --count are mutually exclusive");
        if (args.percent >= 0.0) cfg.clone_budget = CloneBudget::percent(args.percent);
        if (args.count >= 0) cfg.clone_budget = CloneBudget::count(args.count);
        if (args.method == "manual")
            cfg.manual = ManualResampleTable{};
        else if (args.method != "ml_ros")
            throw ConfigError("unknown resample method '" + args.method + "'");
        out = resample(ds, cfg);
    }
    write_dataset_file(out, args.out);
    std::cerr << "resample: " << ds.size() << " -> " << out.size() << " samples, mean_ir "
              << label_counts(ds).mean_ir << " -> " << label_counts(out).mean_ir << "\n";
    return 0;
}

struct TrainArgs {
    std::string data;
    std::string val;
    std::string config;
    std::string out_dir;
    std::string resume;
    std::uint64_t seed = 0;
    bool seed_given = false;
};

int cmd_train(const TrainArgs& args) {
    const PipelineConfig cfg = config_or_default(args.config);
    const LabelledDataset train_ds = load_dataset_file(args.data);
    LabelledDataset val_ds;
    if (!args.val.empty()) val_ds = load_dataset_file(args.val);

    TrainOptions options;
    options.model = cfg.model;
    options.model.init_seed = cfg.stage_seed("init");
    options.optim = cfg.optim;
    options.loss = cfg.loss;
    options.sampler = cfg.sampler;
    options.seed = args.seed_given ? args.seed : cfg.stage_seed("train");

    std::error_code ec;
    std::filesystem::create_directories(args.out_dir, ec);
    if (ec) throw IoError("cannot create " + args.out_dir + ": " + ec.message());
    options.checkpoint_dir = args.out_dir;

    Checkpoint resume_ckpt;
    const Checkpoint* resume = nullptr;
    if (!args.resume.empty()) {
        resume_ckpt = load_checkpoint(args.resume);
        resume = &resume_ckpt;
    }

    const TrainResult result =
        train(train_ds, val_ds.empty() ? nullptr : &val_ds, options, resume);
    for (const std::string& warning : result.warnings) std::cerr << "warning: " << warning << "\n";
    for (const EpochStats& row : result.history.epochs) {
        std::cerr << "epoch " << row.epoch << ": loss " << row.mean_train_loss << ", lr "
                  << row.lr;
        if (row.has_val) std::cerr << ", macro val F1 " << row.macro_val_f1;
        std::cerr << "\n";
    }
    std::cerr << "train: wrote checkpoints to " << args.out_dir << "\n";
    return 0;
}

struct PredictArgs {
    std::string ckpt;
    std::string data;
    std::string out;
};

int cmd_predict(const PredictArgs& args) {
    const Checkpoint ckpt = load_checkpoint(args.ckpt);
    const LabelledDataset ds = load_dataset_file(args.data);
    write_predictions(predict(ckpt.model, ds), args.out);
    std::cerr << "predict: wrote " << ds.size() << " rows to " << args.out << "\n";
    return 0;
}

struct SmoothArgs {
    std::string pred;
    std::string out;
    int window = 5;
};

int cmd_smooth(const SmoothArgs& args) {
    const PredictionRun run = load_prediction_file(args.pred);
    write_predictions(smooth_logits(run, args.window), args.out);
    std::cerr << "smooth: window " << args.window << " -> " << args.out << "\n";
    return 0;
}

struct EvalArgs {
    std::string pred;
    std::string truth;
    double threshold = 0.0;
    int window = 1;
    bool clean = false;
    bool as_json = false;
};

int cmd_eval(const EvalArgs& args) {
    const LabelledDataset truth = load_label_or_dataset_file(args.truth);
    const std::string pred_text = read_text_file(args.pred);
    LabelledDataset pred_ds;
    if (pred_text.rfind(prediction_csv_header(), 0) == 0) {
        PredictionRun run = parse_prediction_file(pred_text);
        if (args.window != 1) run = smooth_logits(run, args.window);
        pred_ds = binarize(run, args.threshold);
    } else {
        // Hard labels compare as-is; 0/1 thresholds and windows do not apply.
        pred_ds = parse_label_or_dataset_file(pred_text);
    }
    const F1Report report = f1_score(pred_ds, truth, args.clean);
    std::cout << (args.as_json ? f1_to_json(report) : format_f1_table(report));
    return 0;
}

struct EnsembleArgs {
    std::vector<std::string> runs;
    std::string truth;
    std::string out;
    std::string spec_out;
    std::vector<int> windows = {1};
    double threshold = 0.0;
    bool as_json = false;
};

nlohmann::json ensemble_spec_json(const EnsembleSpec& spec) {
    nlohmann::json chosen = nlohmann::json::object();
    for (int k = 0; k < kNumAus; ++k)
        chosen[kAuNames[static_cast<std::size_t>(k)]] =
            spec.chosen_run[static_cast<std::size_t>(k)];
    nlohmann::json provenance = nlohmann::json::object();
    for (const auto& [name, rep] : spec.provenance) provenance[name] = f1_to_json_obj(rep);
    return nlohmann::json{{"chosen_run", chosen}, {"provenance", provenance}};
}

int cmd_ensemble(const EnsembleArgs& args) {
    const LabelledDataset truth = load_label_or_dataset_file(args.truth);
    std::vector<NamedRun> runs;
    for (const std::string& path : args.runs)
        runs.push_back(NamedRun{std::filesystem::path(path).stem().string(),
                                load_prediction_file(path)});
    const EnsembleSpec spec = select_ensemble(runs, truth, args.windows, args.threshold);

    // Combination sees the same smoothed runs selection scored.
    std::vector<NamedRun> smoothed = runs;
    for (std::size_t i = 0; i < smoothed.size(); ++i) {
        const int w = args.windows.size() == 1 ? args.windows[0]
                                               : args.windows[i];
        if (w != 1) smoothed[i].run = smooth_logits(smoothed[i].run, w);
    }
    const PredictionRun combined = apply_ensemble(spec, smoothed);
    write_predictions(combined, args.out);

    const F1Report combined_f1 = f1_score(binarize(combined, args.threshold), truth);
    nlohmann::json spec_json = ensemble_spec_json(spec);
    if (!args.spec_out.empty()) write_text_file(args.spec_out, spec_json.dump(2) + "\n");
    if (args.as_json) {
        spec_json["macro_f1"] = combined_f1.macro_f1;
        std::cout << spec_json.dump(2) << "\n";
    } else {
        for (int k = 0; k < kNumAus; ++k)
            std::cout << kAuNames[static_cast<std::size_t>(k)] << " <- "
                      << spec.chosen_run[static_cast<std::size_t>(k)] << "\n";
        std::cout << "macro_f1 " << format_double(combined_f1.macro_f1) << "\n";
    }
    return 0;
}

struct ReproArgs {
    std::string config;
    std::string out_dir = "repro_out";
};

int cmd_repro(const ReproArgs& args) {
    const PipelineConfig cfg = config_or_default(args.config);
    const ReproOutcome outcome = run_repro(cfg, args.out_dir, std::cerr);
    std::cout << "macro_f1 " << format_double(outcome.ensemble_f1.macro_f1) << "\n";
    return 0;
}

}  // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app{"Imbalance-aware multi-label AU classification pipeline"};
    app.require_subcommand(1);

    StatsArgs stats_args;
    CLI::App* stats = app.add_subcommand("stats", "Label counts, IRLbl and MeanIR of a dataset");
    stats->add_option("--data", stats_args.data, "Label or dataset CSV")->required();
    stats->add_flag("--json", stats_args.as_json, "Machine-readable output");

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic video AU dataset");
    synth->add_option("--config", synth_args.config, "Pipeline config JSON");
    synth->add_option("--out", synth_args.out, "Output CSV path")->required();
    CLI::Option* synth_seed = synth->add_option("--seed", synth_args.seed, "Override global seed");
    synth->add_flag("--labels-only", synth_args.labels_only, "Omit feature columns");
    synth->add_option("--clean-out", synth_args.clean_out,
                      "Also write the pre-flicker labels as a separate label CSV");

    ResampleArgs resample_args;
    CLI::App* resample = app.add_subcommand("resample", "Rebalance a dataset (ML-ROS or manual)");
    resample->add_option("--data", resample_args.data, "Input CSV")->required();
    resample->add_option("--out", resample_args.out, "Output CSV path")->required();
    resample->add_option("--method", resample_args.method, "none|ml_ros|manual");
    resample->add_option("--percent", resample_args.percent, "Clone budget as % of dataset");
    resample->add_option("--count", resample_args.count, "Clone budget as absolute count");
    resample->add_option("--seed", resample_args.seed, "Resampling seed");

    TrainArgs train_args;
    CLI::App* train = app.add_subcommand("train", "Train one model, writing per-epoch checkpoints");
    train->add_option("--data", train_args.data, "Training dataset CSV (with features)")->required();
    train->add_option("--val", train_args.val, "Validation dataset CSV");
    train->add_option("--config", train_args.config, "Pipeline config JSON");
    train->add_option("--out", train_args.out_dir, "Checkpoint directory")->required();
    train->add_option("--resume", train_args.resume, "Checkpoint to resume from");
    CLI::Option* train_seed = train->add_option("--seed", train_args.seed, "Override train seed");

    PredictArgs predict_args;
    CLI::App* predict = app.add_subcommand("predict", "Run a checkpoint over a dataset");
    predict->add_option("--ckpt", predict_args.ckpt, "Checkpoint file")->required();
    predict->add_option("--data", predict_args.data, "Dataset CSV (with features)")->required();
    predict->add_option("--out", predict_args.out, "Prediction CSV path")->required();

    SmoothArgs smooth_args;
    CLI::App* smooth = app.add_subcommand("smooth", "Sliding-window smoothing of logit tracks");
    smooth->add_option("--in", smooth_args.pred, "Prediction CSV")->required();
    smooth->add_option("--out", smooth_args.out, "Output CSV path")->required();
    smooth->add_option("--window", smooth_args.window, "Odd window size")->required();

    EvalArgs eval_args;
    CLI::App* eval = app.add_subcommand("eval", "Per-AU and macro F1 of predictions vs truth");
    eval->add_option("--pred", eval_args.pred, "Prediction CSV (logits) or label CSV")->required();
    eval->add_option("--truth", eval_args.truth, "Truth label/dataset CSV")->required();
    eval->add_option("--threshold", eval_args.threshold, "Logit decision threshold");
    eval->add_option("--window", eval_args.window, "Smoothing window applied before binarizing");
    eval->add_flag("--clean", eval_args.clean, "Score against the clean label channel");
    eval->add_flag("--json", eval_args.as_json, "Machine-readable output");

    EnsembleArgs ensemble_args;
    CLI::App* ensemble = app.add_subcommand("ensemble", "Per-AU best-run combination");
    ensemble->add_option("--runs", ensemble_args.runs, "Prediction CSVs, comma-separated")
        ->required()
        ->delimiter(',');
    ensemble->add_option("--truth", ensemble_args.truth, "Selection-set truth CSV")->required();
    ensemble->add_option("--out", ensemble_args.out, "Combined prediction CSV path")->required();
    ensemble->add_option("--spec-out", ensemble_args.spec_out,
                         "Write the per-AU assignment and provenance F1 table as JSON");
    ensemble->add_option("--windows", ensemble_args.windows,
                         "Per-run smoothing windows (1 entry broadcasts)")
        ->delimiter(',');
    ensemble->add_option("--threshold", ensemble_args.threshold, "Logit decision threshold");
    ensemble->add_flag("--json", ensemble_args.as_json, "Machine-readable output");

    ReproArgs repro_args;
    CLI::App* repro = app.add_subcommand("repro", "End-to-end pipeline run from one config");
    repro->add_option("--config", repro_args.config, "Pipeline config JSON");
    repro->add_option("--out-dir", repro_args.out_dir, "Artifact directory");

    try {
        // CLI11's vector overload consumes args back-to-front.
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help() << "\n";
        return 1;
    }

    try {
        synth_args.seed_given = synth_seed->count() > 0;
        train_args.seed_given = train_seed->count() > 0;
        if (stats->parsed()) return cmd_stats(stats_args);
        if (synth->parsed()) return cmd_synth(synth_args);
        if (resample->parsed()) return cmd_resample(resample_args);
        if (train->parsed()) return cmd_train(train_args);
        if (predict->parsed()) return cmd_predict(predict_args);
        if (smooth->parsed()) return cmd_smooth(smooth_args);
        if (eval->parsed()) return cmd_eval(eval_args);
        if (ensemble->parsed()) return cmd_ensemble(ensemble_args);
        if (repro->parsed()) return cmd_repro(repro_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace aupipe::cli
