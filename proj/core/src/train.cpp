#include "aupipe/train.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <utility>

#include "aupipe/error.hpp"
#include "aupipe/metrics.hpp"
#include "aupipe/postprocess.hpp"
#include "aupipe/rng.hpp"

namespace aupipe {

namespace {

// Epoch-wise permutation cut into ceil(n/bs) batches; the tail batch wraps
// back to the front of the same permutation so every batch has exactly
// batch_size rows.
std::vector<std::vector<std::size_t>> shuffle_batches(std::size_t n, int batch_size,
                                                      int n_batches, std::uint64_t seed) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::size_t j = rng.uniform_int(i + 1);
        std::swap(perm[i], perm[j]);
    }
    std::vector<std::vector<std::size_t>> batches(static_cast<std::size_t>(n_batches));
    std::size_t cursor = 0;
    for (auto& batch : batches) {
        batch.reserve(static_cast<std::size_t>(batch_size));
        for (int i = 0; i < batch_size; ++i) {
            batch.push_back(perm[cursor % n]);
            ++cursor;
        }
    }
    return batches;
}

}  // namespace

Matrix features_matrix(const LabelledDataset& ds) {
    if (ds.feature_dim == 0) throw ValueError("dataset has no feature columns");
    Matrix x(ds.size(), ds.feature_dim);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const std::vector<double>& f = ds.samples[i].features;
        std::copy(f.begin(), f.end(), x.data.begin() + static_cast<std::ptrdiff_t>(i * ds.feature_dim));
    }
    return x;
}

TargetBatch targets_matrix(const LabelledDataset& ds, bool use_clean) {
    TargetBatch t;
    t.y = Matrix(ds.size(), kNumAus);
    t.mask = BoolMatrix(ds.size(), kNumAus, true);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const AuLabelVector& lab = use_clean ? ds.samples[i].clean_labels : ds.samples[i].labels;
        for (int k = 0; k < kNumAus; ++k) {
            if (!lab.is_valid(k)) {
                t.mask(i, static_cast<std::size_t>(k)) = 0;
            } else if (lab.is_positive(k)) {
                t.y(i, static_cast<std::size_t>(k)) = 1.0;
            }
        }
    }
    return t;
}

void apply_label_smoothing(TargetBatch& targets, double eps) {
    if (targets.smoothed)
        throw ConfigError("targets already label-smoothed; smoothing is not idempotent");
    targets.y = smooth_labels(targets.y, targets.mask, eps);
    targets.smoothed = true;
}

TrainResult train(const LabelledDataset& train_ds, const LabelledDataset* val_ds,
                  const TrainOptions& options, const Checkpoint* resume) {
    if (train_ds.empty()) throw ValueError("train: empty training dataset");
    if (train_ds.feature_dim == 0) throw ValueError("train: training dataset has no features");
    options.optim.validate();
    options.loss.validate();

    ModelConfig mcfg = options.model;
    if (mcfg.input_dim == 0) mcfg.input_dim = train_ds.feature_dim;
    if (mcfg.input_dim != train_ds.feature_dim)
        throw ConfigError("model input_dim " + std::to_string(mcfg.input_dim) +
                          " does not match feature dim " + std::to_string(train_ds.feature_dim));
    mcfg.validate();

    const bool has_val = val_ds != nullptr && !val_ds->empty();
    if (has_val && val_ds->feature_dim != train_ds.feature_dim)
        throw ShapeError("validation feature dim " + std::to_string(val_ds->feature_dim) +
                         " does not match training feature dim " +
                         std::to_string(train_ds.feature_dim));

    const std::string fingerprint = config_fingerprint(mcfg, options.optim, options.loss);
    const std::uint64_t seed = options.seed;

    TrainResult result;
    Model model;
    OptimState state;
    int start_epoch = 0;
    if (resume != nullptr) {
        if (resume->config_fingerprint != fingerprint)
            throw ConfigError("checkpoint was written under fingerprint " +
                              resume->config_fingerprint + ", current config is " + fingerprint);
        if (resume->train_seed != seed)
            throw ConfigError("checkpoint train_seed " + std::to_string(resume->train_seed) +
                              " does not match options.seed " + std::to_string(seed));
        if (resume->epoch_completed < 0 || resume->epoch_completed > options.optim.epochs)
            throw ValueError("checkpoint epoch_completed " +
                             std::to_string(resume->epoch_completed) + " outside schedule of " +
                             std::to_string(options.optim.epochs) + " epochs");
        model = resume->model;
        state = resume->optim_state.velocity.empty() ? init_optim_state(model)
                                                     : resume->optim_state;
        start_epoch = resume->epoch_completed;
    } else {
        model = init_model(mcfg);
        state = init_optim_state(model);
    }

    const Matrix x = features_matrix(train_ds);
    TargetBatch targets = targets_matrix(train_ds);
    apply_label_smoothing(targets, options.loss.label_smooth_eps);

    const int bs = options.optim.batch_size;
    const std::size_t n = train_ds.size();
    const int batches_per_epoch =
        static_cast<int>((n + static_cast<std::size_t>(bs) - 1) / static_cast<std::size_t>(bs));

    BatchPlan plan;
    if (options.sampler == SamplerKind::Balanced) {
        plan = build_batch_plan(train_ds, bs);
        if (!plan.infeasible_buckets.empty()) {
            std::string msg =
                "balanced sampler: empty buckets fall back to uniform fill:";
            for (const auto& [au, positive] : plan.infeasible_buckets) {
                msg += ' ';
                msg += kAuNames[static_cast<std::size_t>(au)];
                msg += positive ? "+" : "-";
            }
            result.warnings.push_back(msg);
        }
    }

    for (int epoch = start_epoch; epoch < options.optim.epochs; ++epoch) {
        const double lr = lr_at(options.optim, epoch);
        const std::uint64_t batch_seed =
            derive_seed(seed, "batches", static_cast<std::uint64_t>(epoch));
        const std::vector<std::vector<std::size_t>> batches =
            options.sampler == SamplerKind::Balanced
                ? balanced_batches(plan, batches_per_epoch, batch_seed)
                : shuffle_batches(n, bs, batches_per_epoch, batch_seed);

        double loss_sum = 0.0;
        for (std::size_t b = 0; b < batches.size(); ++b) {
            const std::vector<std::size_t>& idx = batches[b];
            Matrix xb(idx.size(), x.cols);
            Matrix yb(idx.size(), kNumAus);
            BoolMatrix mb(idx.size(), kNumAus);
            for (std::size_t r = 0; r < idx.size(); ++r) {
                const std::size_t src = idx[r];
                std::copy_n(x.data.begin() + static_cast<std::ptrdiff_t>(src * x.cols), x.cols,
                            xb.data.begin() + static_cast<std::ptrdiff_t>(r * x.cols));
                std::copy_n(targets.y.data.begin() + static_cast<std::ptrdiff_t>(src * kNumAus),
                            kNumAus,
                            yb.data.begin() + static_cast<std::ptrdiff_t>(r * kNumAus));
                std::copy_n(targets.mask.data.begin() + static_cast<std::ptrdiff_t>(src * kNumAus),
                            kNumAus,
                            mb.data.begin() + static_cast<std::ptrdiff_t>(r * kNumAus));
            }

            ForwardCache cache;
            const Matrix logits =
                forward(model, xb, ForwardMode::Train,
                        derive_seed(seed, "dropout", static_cast<std::uint64_t>(epoch), b), &cache);
            const LossOutput out = total_loss(logits, yb, mb, options.loss);
            loss_sum += out.value;
            const Gradients grads = backward(model, cache, out.grad);
            sgd_step(model, grads, state, lr, options.optim);
        }

        EpochStats row;
        row.epoch = epoch;
        row.mean_train_loss = loss_sum / static_cast<double>(batches.size());
        row.lr = lr;
        if (has_val) {
            const F1Report rep = f1_score(binarize(predict(model, *val_ds)), *val_ds);
            row.has_val = true;
            row.val_f1 = rep.per_au_f1;
            row.macro_val_f1 = rep.macro_f1;
        }
        result.history.epochs.push_back(row);

        Checkpoint snap{epoch + 1, seed, fingerprint, model, state};
        if (!options.checkpoint_dir.empty())
            save_checkpoint(snap, options.checkpoint_dir + "/" + checkpoint_filename(epoch + 1));
        result.per_epoch.push_back(std::move(snap));
    }

    if (!result.per_epoch.empty()) {
        result.final_checkpoint = result.per_epoch.back();
    } else if (resume != nullptr) {
        result.final_checkpoint = *resume;  // schedule already finished, nothing to run
    } else {
        result.final_checkpoint = Checkpoint{0, seed, fingerprint, std::move(model), std::move(state)};
    }
    return result;
}

PredictionRun predict(const Model& model, const LabelledDataset& ds) {
    if (ds.empty()) throw ValueError("predict: empty dataset");
    if (ds.feature_dim != model.cfg.input_dim)
        throw ShapeError("predict: feature dim " + std::to_string(ds.feature_dim) +
                         " does not match model input_dim " +
                         std::to_string(model.cfg.input_dim));
    const Matrix x = features_matrix(ds);
    const Matrix logits = forward(model, x, ForwardMode::Eval);
    std::vector<PredictionEntry> entries(ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        entries[i].video_id = ds.samples[i].video_id;
        entries[i].frame_idx = ds.samples[i].frame_idx;
        for (int k = 0; k < kNumAus; ++k)
            entries[i].logits[static_cast<std::size_t>(k)] = logits(i, static_cast<std::size_t>(k));
    }
    return PredictionRun::build(std::move(entries));
}

std::string checkpoint_filename(int epoch_completed) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "ckpt_epoch_%03d.bin", epoch_completed);
    return buf;
}

}  // namespace aupipe
