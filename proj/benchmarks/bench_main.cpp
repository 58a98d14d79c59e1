#include <benchmark/benchmark.h>

#include "aupipe/batching.hpp"
#include "aupipe/imbalance.hpp"
#include "aupipe/loss.hpp"
#include "aupipe/model.hpp"
#include "aupipe/postprocess.hpp"
#include "aupipe/rng.hpp"
#include "aupipe/synth.hpp"
#include "aupipe/train.hpp"

using namespace aupipe;

namespace {

// One training-shaped loss batch: 256 rows, smoothed targets, ~2% masked.
struct LossFixture {
    Matrix logits{256, kNumAus};
    Matrix targets{256, kNumAus};
    BoolMatrix mask{256, kNumAus, true};
    LossConfig cfg;

    LossFixture() {
        Rng rng(11);
        for (std::size_t i = 0; i < logits.size(); ++i) {
            logits.data[i] = rng.uniform(-4.0, 4.0);
            targets.data[i] = rng.bernoulli(0.3) ? 0.95 : 0.05;
            if (rng.bernoulli(0.02)) mask.data[i] = 0;
        }
        cfg.label_smooth_eps = 0.0;
    }
};

LabelledDataset skewed_labels(int n_videos, int frames) {
    SynthConfig sc;
    sc.n_videos = n_videos;
    sc.frames_per_video = frames;
    sc.feature_dim = 1;
    sc.positive_rates = {0.02, 0.03, 0.05, 0.08, 0.10, 0.15,
                         0.20, 0.25, 0.30, 0.35, 0.40, 0.50};
    sc.seed = 5;
    return generate_synthetic(sc);
}

void BM_TotalLoss(benchmark::State& state) {
    const LossFixture f;
    for (auto _ : state)
        benchmark::DoNotOptimize(total_loss(f.logits, f.targets, f.mask, f.cfg));
}
BENCHMARK(BM_TotalLoss);

void BM_ForwardEval(benchmark::State& state) {
    ModelConfig mc;
    mc.input_dim = 32;
    mc.init_seed = 1;
    const Model model = init_model(mc);
    Matrix features(256, 32);
    Rng rng(2);
    for (std::size_t i = 0; i < features.size(); ++i) features.data[i] = rng.uniform(-1.0, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(forward(model, features, ForwardMode::Eval));
}
BENCHMARK(BM_ForwardEval);

void BM_ForwardBackward(benchmark::State& state) {
    ModelConfig mc;
    mc.input_dim = 32;
    mc.init_seed = 1;
    const Model model = init_model(mc);
    const LossFixture f;
    Matrix features(256, 32);
    Rng rng(2);
    for (std::size_t i = 0; i < features.size(); ++i) features.data[i] = rng.uniform(-1.0, 1.0);
    std::uint64_t dropout_seed = 0;
    for (auto _ : state) {
        ForwardCache cache;
        const Matrix logits = forward(model, features, ForwardMode::Train, ++dropout_seed, &cache);
        const LossOutput loss = total_loss(logits, f.targets, f.mask, f.cfg);
        benchmark::DoNotOptimize(backward(model, cache, loss.grad));
    }
}
BENCHMARK(BM_ForwardBackward);

void BM_SmoothWindow5(benchmark::State& state) {
    std::vector<PredictionEntry> entries(10000);
    Rng rng(3);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        entries[i].video_id = "v";
        entries[i].frame_idx = static_cast<std::int64_t>(i);
        for (auto& logit : entries[i].logits) logit = rng.uniform(-3.0, 3.0);
    }
    const PredictionRun run = PredictionRun::build(std::move(entries));
    for (auto _ : state) benchmark::DoNotOptimize(smooth_logits(run, 5));
}
BENCHMARK(BM_SmoothWindow5);

void BM_MlRos(benchmark::State& state) {
    const LabelledDataset ds = skewed_labels(10, 100);
    ResampleConfig rc;
    rc.clone_budget = CloneBudget::percent(25.0);
    rc.seed = 7;
    for (auto _ : state) benchmark::DoNotOptimize(ml_ros(ds, rc));
}
BENCHMARK(BM_MlRos);

void BM_BalancedBatches(benchmark::State& state) {
    SynthConfig sc;
    sc.feature_dim = 1;
    sc.seed = 9;
    const LabelledDataset ds = generate_synthetic(sc);  // 40 x 500 frames
    const BatchPlan plan = build_batch_plan(ds, 256);
    for (auto _ : state) benchmark::DoNotOptimize(balanced_batches(plan, 100, 13));
}
BENCHMARK(BM_BalancedBatches);

void BM_TrainEpoch(benchmark::State& state) {
    SynthConfig sc;
    sc.n_videos = 4;
    sc.frames_per_video = 250;
    sc.seed = 21;
    const LabelledDataset ds = generate_synthetic(sc);
    TrainOptions options;
    options.optim.epochs = 1;
    options.seed = 17;
    for (auto _ : state) benchmark::DoNotOptimize(train(ds, nullptr, options));
}
BENCHMARK(BM_TrainEpoch);

}  // namespace

BENCHMARK_MAIN();
