#include "aupipe/config.hpp"

#include <cmath>
#include <cstdint>

#include <json.hpp>

#include "aupipe/csv.hpp"
#include "aupipe/error.hpp"
#include "aupipe/rng.hpp"

namespace aupipe {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& path, const std::string& what) {
    throw ConfigError("config: " + path + ": " + what);
}

void require_object(const json& j, const std::string& path) {
    if (!j.is_object()) bad(path, "expected an object");
}

// Every parser below declares its full key set; anything else is a typo.
void check_keys(const json& j, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* key : allowed)
            if (item.key() == key) {
                known = true;
                break;
            }
        if (!known) bad(path.empty() ? item.key() : path + "." + item.key(), "unknown key");
    }
}

double get_double(const json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) bad(path, "expected an integer");
    return j.get<int>();
}

std::uint64_t get_u64(const json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        bad(path, "expected a non-negative integer");
    return j.get<std::uint64_t>();
}

std::string get_string(const json& j, const std::string& path) {
    if (!j.is_string()) bad(path, "expected a string");
    return j.get<std::string>();
}

std::array<double, kNumAus> get_au_array(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != kNumAus)
        bad(path, "expected an array of " + std::to_string(kNumAus) + " numbers");
    std::array<double, kNumAus> out{};
    for (int k = 0; k < kNumAus; ++k)
        out[static_cast<std::size_t>(k)] =
            get_double(j[static_cast<std::size_t>(k)], path + "[" + std::to_string(k) + "]");
    return out;
}

int au_from_name(const json& j, const std::string& path) {
    const std::string name = get_string(j, path);
    const int idx = au_index(name);
    if (idx < 0) bad(path, "unknown AU name '" + name + "'");
    return idx;
}

void parse_synth(const json& j, const std::string& path, SynthConfig& out) {
    require_object(j, path);
    check_keys(j, path,
               {"n_videos", "frames_per_video", "feature_dim", "positive_rates", "cooccurrence",
                "persistence", "flicker_rate"});
    if (j.contains("n_videos")) out.n_videos = get_int(j["n_videos"], path + ".n_videos");
    if (j.contains("frames_per_video"))
        out.frames_per_video = get_int(j["frames_per_video"], path + ".frames_per_video");
    if (j.contains("feature_dim")) out.feature_dim = get_int(j["feature_dim"], path + ".feature_dim");
    if (j.contains("positive_rates"))
        out.positive_rates = get_au_array(j["positive_rates"], path + ".positive_rates");
    if (j.contains("cooccurrence")) {
        const json& arr = j["cooccurrence"];
        if (!arr.is_array()) bad(path + ".cooccurrence", "expected an array");
        out.cooccurrence_pairs.clear();
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = path + ".cooccurrence[" + std::to_string(i) + "]";
            require_object(arr[i], p);
            check_keys(arr[i], p, {"first", "second", "corr"});
            CooccurrencePair pair;
            if (!arr[i].contains("first") || !arr[i].contains("second"))
                bad(p, "needs both 'first' and 'second'");
            pair.first = au_from_name(arr[i]["first"], p + ".first");
            pair.second = au_from_name(arr[i]["second"], p + ".second");
            if (arr[i].contains("corr")) pair.corr = get_double(arr[i]["corr"], p + ".corr");
            out.cooccurrence_pairs.push_back(pair);
        }
    }
    if (j.contains("persistence"))
        out.persistence = get_double(j["persistence"], path + ".persistence");
    if (j.contains("flicker_rate"))
        out.flicker_rate = get_double(j["flicker_rate"], path + ".flicker_rate");
}

void parse_resample(const json& j, const std::string& path, ResampleSection& out) {
    require_object(j, path);
    check_keys(j, path,
               {"method", "clone_budget_percent", "clone_budget_count", "repeat", "keep"});
    if (j.contains("method")) {
        const std::string m = get_string(j["method"], path + ".method");
        if (m == "none")
            out.method = ResampleMethod::None;
        else if (m == "ml_ros")
            out.method = ResampleMethod::MlRos;
        else if (m == "manual")
            out.method = ResampleMethod::Manual;
        else
            bad(path + ".method", "expected one of none|ml_ros|manual, got '" + m + "'");
    }
    const bool has_pct = j.contains("clone_budget_percent");
    const bool has_cnt = j.contains("clone_budget_count");
    if (has_pct && has_cnt)
        bad(path, "clone_budget_percent and clone_budget_count are mutually exclusive");
    if (has_pct)
        out.clone_budget =
            CloneBudget::percent(get_double(j["clone_budget_percent"], path + ".clone_budget_percent"));
    if (has_cnt)
        out.clone_budget = CloneBudget::count(get_int(j["clone_budget_count"], path + ".clone_budget_count"));
    if (j.contains("repeat") || j.contains("keep")) {
        ManualResampleTable table = out.manual_table.value_or(ManualResampleTable{});
        if (j.contains("repeat")) table.repeat = get_au_array(j["repeat"], path + ".repeat");
        if (j.contains("keep")) table.keep = get_au_array(j["keep"], path + ".keep");
        out.manual_table = table;
    }
}

void parse_model(const json& j, const std::string& path, ModelConfig& out) {
    require_object(j, path);
    check_keys(j, path, {"input_dim", "hidden_dims", "output_dim", "dropout_p"});
    if (j.contains("input_dim"))
        out.input_dim = static_cast<std::size_t>(get_int(j["input_dim"], path + ".input_dim"));
    if (j.contains("hidden_dims")) {
        const json& arr = j["hidden_dims"];
        if (!arr.is_array()) bad(path + ".hidden_dims", "expected an array");
        out.hidden_dims.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
            out.hidden_dims.push_back(static_cast<std::size_t>(
                get_int(arr[i], path + ".hidden_dims[" + std::to_string(i) + "]")));
    }
    if (j.contains("output_dim"))
        out.output_dim = static_cast<std::size_t>(get_int(j["output_dim"], path + ".output_dim"));
    if (j.contains("dropout_p")) out.dropout_p = get_double(j["dropout_p"], path + ".dropout_p");
}

void parse_optim(const json& j, const std::string& path, OptimConfig& out) {
    require_object(j, path);
    check_keys(j, path,
               {"lr0", "momentum", "weight_decay", "batch_size", "epochs", "lr_drop_epochs",
                "lr_drop_factor"});
    if (j.contains("lr0")) out.lr0 = get_double(j["lr0"], path + ".lr0");
    if (j.contains("momentum")) out.momentum = get_double(j["momentum"], path + ".momentum");
    if (j.contains("weight_decay"))
        out.weight_decay = get_double(j["weight_decay"], path + ".weight_decay");
    if (j.contains("batch_size")) out.batch_size = get_int(j["batch_size"], path + ".batch_size");
    if (j.contains("epochs")) out.epochs = get_int(j["epochs"], path + ".epochs");
    if (j.contains("lr_drop_epochs")) {
        const json& arr = j["lr_drop_epochs"];
        if (!arr.is_array()) bad(path + ".lr_drop_epochs", "expected an array");
        out.lr_drop_epochs.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
            out.lr_drop_epochs.push_back(
                get_int(arr[i], path + ".lr_drop_epochs[" + std::to_string(i) + "]"));
    }
    if (j.contains("lr_drop_factor"))
        out.lr_drop_factor = get_double(j["lr_drop_factor"], path + ".lr_drop_factor");
}

void parse_loss(const json& j, const std::string& path, LossConfig& out) {
    require_object(j, path);
    check_keys(j, path,
               {"au_weights", "label_smooth_eps", "components", "batch_reduction",
                "mll_sample_weight"});
    if (j.contains("au_weights")) out.weights = get_au_array(j["au_weights"], path + ".au_weights");
    if (j.contains("label_smooth_eps"))
        out.label_smooth_eps = get_double(j["label_smooth_eps"], path + ".label_smooth_eps");
    if (j.contains("components")) {
        const std::string c = get_string(j["components"], path + ".components");
        if (c == "bce")
            out.components = LossComponents::BceOnly;
        else if (c == "mll")
            out.components = LossComponents::MllOnly;
        else if (c == "sum")
            out.components = LossComponents::Sum;
        else
            bad(path + ".components", "expected one of bce|mll|sum, got '" + c + "'");
    }
    if (j.contains("batch_reduction")) {
        const std::string r = get_string(j["batch_reduction"], path + ".batch_reduction");
        if (r == "mean")
            out.batch_reduction = BatchReduction::Mean;
        else if (r == "sum")
            out.batch_reduction = BatchReduction::Sum;
        else
            bad(path + ".batch_reduction", "expected mean|sum, got '" + r + "'");
    }
    if (j.contains("mll_sample_weight"))
        out.mll_sample_weight = get_double(j["mll_sample_weight"], path + ".mll_sample_weight");
}

void parse_postprocess(const json& j, const std::string& path, PostprocessSection& out) {
    require_object(j, path);
    check_keys(j, path, {"smooth_window", "threshold"});
    if (j.contains("smooth_window"))
        out.smooth_window = get_int(j["smooth_window"], path + ".smooth_window");
    if (j.contains("threshold")) out.threshold = get_double(j["threshold"], path + ".threshold");
}

void parse_ensemble(const json& j, const std::string& path, EnsembleSection& out) {
    require_object(j, path);
    check_keys(j, path, {"n_models", "windows"});
    if (j.contains("n_models")) out.n_models = get_int(j["n_models"], path + ".n_models");
    if (j.contains("windows")) {
        const json& arr = j["windows"];
        if (!arr.is_array()) bad(path + ".windows", "expected an array");
        out.windows.clear();
        for (std::size_t i = 0; i < arr.size(); ++i)
            out.windows.push_back(get_int(arr[i], path + ".windows[" + std::to_string(i) + "]"));
    }
}

void parse_seeds(const json& j, const std::string& path, StageSeedOverrides& out) {
    require_object(j, path);
    check_keys(j, path, {"synth", "split", "resample", "init", "train"});
    if (j.contains("synth")) out.synth = get_u64(j["synth"], path + ".synth");
    if (j.contains("split")) out.split = get_u64(j["split"], path + ".split");
    if (j.contains("resample")) out.resample = get_u64(j["resample"], path + ".resample");
    if (j.contains("init")) out.init = get_u64(j["init"], path + ".init");
    if (j.contains("train")) out.train = get_u64(j["train"], path + ".train");
}

json number_or_int(double v) {
    // Keeps integral doubles as JSON integers so dumps stay tidy.
    if (v == static_cast<double>(static_cast<std::int64_t>(v)) && std::abs(v) < 1e15)
        return json(static_cast<std::int64_t>(v));
    return json(v);
}

}  // namespace

void PipelineConfig::validate() const {
    aupipe::validate(synth);
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw ConfigError("val_fraction must lie in (0, 1), got " + std::to_string(val_fraction));
    if (resample.clone_budget.value < 0.0) throw ConfigError("clone budget must be >= 0");
    if (resample.method == ResampleMethod::Manual && resample.manual_table) {
        for (int k = 0; k < kNumAus; ++k) {
            const auto ks = static_cast<std::size_t>(k);
            if (resample.manual_table->repeat[ks] < 1.0)
                throw ConfigError("manual repeat factors must be >= 1");
            if (!(resample.manual_table->keep[ks] > 0.0 && resample.manual_table->keep[ks] <= 1.0))
                throw ConfigError("manual keep fractions must lie in (0, 1]");
        }
    }
    // input_dim 0 defers to the data, so only the remaining model fields are
    // checked here.
    if (model.input_dim != 0) {
        model.validate();
    } else {
        ModelConfig probe = model;
        probe.input_dim = 1;
        probe.validate();
    }
    optim.validate();
    loss.validate();
    if (postprocess.smooth_window < 1 || postprocess.smooth_window % 2 == 0)
        throw ConfigError("postprocess.smooth_window must be a positive odd number");
    if (ensemble.n_models < 1) throw ConfigError("ensemble.n_models must be >= 1");
    if (ensemble.windows.empty()) throw ConfigError("ensemble.windows must not be empty");
    for (int w : ensemble.windows)
        if (w < 1 || w % 2 == 0) throw ConfigError("ensemble windows must be positive odd numbers");
    if (ensemble.windows.size() != 1 &&
        ensemble.windows.size() != static_cast<std::size_t>(ensemble.n_models))
        throw ConfigError("ensemble.windows must have 1 entry or one per model");
}

std::uint64_t PipelineConfig::stage_seed(std::string_view stage) const {
    const std::optional<std::uint64_t>* override_slot = nullptr;
    if (stage == "synth")
        override_slot = &seeds.synth;
    else if (stage == "split")
        override_slot = &seeds.split;
    else if (stage == "resample")
        override_slot = &seeds.resample;
    else if (stage == "init")
        override_slot = &seeds.init;
    else if (stage == "train")
        override_slot = &seeds.train;
    else
        throw ConfigError("unknown stage name '" + std::string(stage) + "'");
    if (override_slot->has_value()) return **override_slot;
    return derive_seed(seed, stage);
}

PipelineConfig parse_pipeline_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    require_object(root, "<root>");
    check_keys(root, "",
               {"seed", "synth", "split", "resample", "model", "optim", "loss", "sampler",
                "postprocess", "ensemble", "seeds"});

    PipelineConfig cfg;
    try {
        if (root.contains("seed")) cfg.seed = get_u64(root["seed"], "seed");
        if (root.contains("synth")) parse_synth(root["synth"], "synth", cfg.synth);
        if (root.contains("split")) {
            require_object(root["split"], "split");
            check_keys(root["split"], "split", {"val_fraction"});
            if (root["split"].contains("val_fraction"))
                cfg.val_fraction = get_double(root["split"]["val_fraction"], "split.val_fraction");
        }
        if (root.contains("resample")) parse_resample(root["resample"], "resample", cfg.resample);
        if (root.contains("model")) parse_model(root["model"], "model", cfg.model);
        if (root.contains("optim")) parse_optim(root["optim"], "optim", cfg.optim);
        if (root.contains("loss")) parse_loss(root["loss"], "loss", cfg.loss);
        if (root.contains("sampler")) {
            const std::string s = get_string(root["sampler"], "sampler");
            if (s == "balanced")
                cfg.sampler = SamplerKind::Balanced;
            else if (s == "shuffle")
                cfg.sampler = SamplerKind::Shuffle;
            else
                bad("sampler", "expected balanced|shuffle, got '" + s + "'");
        }
        if (root.contains("postprocess"))
            parse_postprocess(root["postprocess"], "postprocess", cfg.postprocess);
        if (root.contains("ensemble")) parse_ensemble(root["ensemble"], "ensemble", cfg.ensemble);
        if (root.contains("seeds")) parse_seeds(root["seeds"], "seeds", cfg.seeds);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: malformed value: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_pipeline_config(const std::string& path) {
    return parse_pipeline_config(read_text_file(path));
}

std::string dump_pipeline_config(const PipelineConfig& cfg) {
    json root;
    root["seed"] = cfg.seed;

    json synth;
    synth["n_videos"] = cfg.synth.n_videos;
    synth["frames_per_video"] = cfg.synth.frames_per_video;
    synth["feature_dim"] = cfg.synth.feature_dim;
    synth["positive_rates"] = cfg.synth.positive_rates;
    json pairs = json::array();
    for (const CooccurrencePair& p : cfg.synth.cooccurrence_pairs) {
        json pj;
        pj["first"] = kAuNames[static_cast<std::size_t>(p.first)];
        pj["second"] = kAuNames[static_cast<std::size_t>(p.second)];
        pj["corr"] = p.corr;
        pairs.push_back(pj);
    }
    synth["cooccurrence"] = pairs;
    synth["persistence"] = cfg.synth.persistence;
    synth["flicker_rate"] = number_or_int(cfg.synth.flicker_rate);
    root["synth"] = synth;

    root["split"] = json{{"val_fraction", cfg.val_fraction}};

    json resample;
    switch (cfg.resample.method) {
        case ResampleMethod::None: resample["method"] = "none"; break;
        case ResampleMethod::MlRos: resample["method"] = "ml_ros"; break;
        case ResampleMethod::Manual: resample["method"] = "manual"; break;
    }
    if (cfg.resample.clone_budget.kind == CloneBudget::Kind::Percent)
        resample["clone_budget_percent"] = number_or_int(cfg.resample.clone_budget.value);
    else
        resample["clone_budget_count"] =
            static_cast<std::int64_t>(cfg.resample.clone_budget.value);
    if (cfg.resample.manual_table) {
        resample["repeat"] = cfg.resample.manual_table->repeat;
        resample["keep"] = cfg.resample.manual_table->keep;
    }
    root["resample"] = resample;

    json model;
    if (cfg.model.input_dim != 0) model["input_dim"] = cfg.model.input_dim;
    model["hidden_dims"] = cfg.model.hidden_dims;
    model["dropout_p"] = cfg.model.dropout_p;
    root["model"] = model;

    json optim;
    optim["lr0"] = cfg.optim.lr0;
    optim["momentum"] = cfg.optim.momentum;
    optim["weight_decay"] = cfg.optim.weight_decay;
    optim["batch_size"] = cfg.optim.batch_size;
    optim["epochs"] = cfg.optim.epochs;
    optim["lr_drop_epochs"] = cfg.optim.lr_drop_epochs;
    optim["lr_drop_factor"] = number_or_int(cfg.optim.lr_drop_factor);
    root["optim"] = optim;

    json loss;
    json weights = json::array();
    for (double w : cfg.loss.weights) weights.push_back(number_or_int(w));
    loss["au_weights"] = weights;
    loss["label_smooth_eps"] = cfg.loss.label_smooth_eps;
    switch (cfg.loss.components) {
        case LossComponents::BceOnly: loss["components"] = "bce"; break;
        case LossComponents::MllOnly: loss["components"] = "mll"; break;
        case LossComponents::Sum: loss["components"] = "sum"; break;
    }
    loss["batch_reduction"] =
        cfg.loss.batch_reduction == BatchReduction::Mean ? "mean" : "sum";
    loss["mll_sample_weight"] = number_or_int(cfg.loss.mll_sample_weight);
    root["loss"] = loss;

    root["sampler"] = cfg.sampler == SamplerKind::Balanced ? "balanced" : "shuffle";

    root["postprocess"] = json{{"smooth_window", cfg.postprocess.smooth_window},
                               {"threshold", number_or_int(cfg.postprocess.threshold)}};

    json ensemble;
    ensemble["n_models"] = cfg.ensemble.n_models;
    ensemble["windows"] = cfg.ensemble.windows;
    root["ensemble"] = ensemble;

    json seeds = json::object();
    if (cfg.seeds.synth) seeds["synth"] = *cfg.seeds.synth;
    if (cfg.seeds.split) seeds["split"] = *cfg.seeds.split;
    if (cfg.seeds.resample) seeds["resample"] = *cfg.seeds.resample;
    if (cfg.seeds.init) seeds["init"] = *cfg.seeds.init;
    if (cfg.seeds.train) seeds["train"] = *cfg.seeds.train;
    if (!seeds.empty()) root["seeds"] = seeds;

    return root.dump(2) + "\n";
}

}  // namespace aupipe
