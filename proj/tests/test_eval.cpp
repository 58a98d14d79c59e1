#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "aupipe/ensemble.hpp"
#include "aupipe/metrics.hpp"
#include "aupipe/postprocess.hpp"
#include "aupipe/rng.hpp"

using namespace aupipe;

namespace {

LabelledDataset random_truth(Rng& rng, int videos, int frames, double invalid_rate = 0.0) {
    std::vector<Sample> samples;
    for (int v = 0; v < videos; ++v) {
        for (int f = 0; f < frames; ++f) {
            Sample s;
            s.video_id = "v" + std::to_string(v);
            s.frame_idx = f;
            for (int k = 0; k < kNumAus; ++k) {
                if (rng.bernoulli(invalid_rate))
                    s.labels[k] = AuLabel::Invalid;
                else if (rng.bernoulli(0.3 + 0.04 * k))
                    s.labels[k] = AuLabel::Positive;
            }
            s.clean_labels = s.labels;
            samples.push_back(std::move(s));
        }
    }
    return LabelledDataset::build(std::move(samples));
}

// Prediction run derived from truth with per-AU flip rates; unit logits.
PredictionRun noisy_run(const LabelledDataset& truth, const std::array<double, kNumAus>& flip,
                        Rng& rng) {
    std::vector<PredictionEntry> entries(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        entries[i].video_id = truth.samples[i].video_id;
        entries[i].frame_idx = truth.samples[i].frame_idx;
        for (int k = 0; k < kNumAus; ++k) {
            bool pos = truth.samples[i].labels.is_positive(k);
            if (rng.bernoulli(flip[static_cast<std::size_t>(k)])) pos = !pos;
            entries[i].logits[static_cast<std::size_t>(k)] = pos ? 1.0 : -1.0;
        }
    }
    return PredictionRun::build(std::move(entries));
}

LabelledDataset copy_labels(const LabelledDataset& ds) { return ds; }

}  // namespace

TEST_CASE("confusion on hand-built frames") {
    Rng rng(1);
    const LabelledDataset truth = random_truth(rng, 2, 10);

    // Perfect predictions: no fp, no fn, every valid frame lands in tp or tn.
    const ConfusionCounts perfect = confusion(copy_labels(truth), truth);
    for (int k = 0; k < kNumAus; ++k) {
        const auto& c = perfect.per_au[static_cast<std::size_t>(k)];
        CHECK(c.fp == 0);
        CHECK(c.fn == 0);
        CHECK(c.valid() == 20);
    }

    // Flip one prediction bit: exactly one fp appears for that AU.
    LabelledDataset flipped = copy_labels(truth);
    const AuLabel original = flipped.samples[3].labels[5];
    flipped.samples[3].labels[5] =
        original == AuLabel::Positive ? AuLabel::Negative : AuLabel::Positive;
    const ConfusionCounts one_off = confusion(flipped, truth);
    const auto& cell = one_off.per_au[5];
    CHECK(cell.fp + cell.fn == 1);
    CHECK(cell.valid() == 20);
}

TEST_CASE("invalid truth frames are excluded; invalid predictions read as negative") {
    Rng rng(2);
    LabelledDataset truth = random_truth(rng, 1, 10);
    truth.samples[0].labels[0] = AuLabel::Invalid;
    truth.samples[1].labels[0] = AuLabel::Invalid;

    const ConfusionCounts counts = confusion(copy_labels(truth), truth);
    CHECK(counts.per_au[0].valid() == 8);  // two frames dropped for AU1 only
    CHECK(counts.per_au[1].valid() == 10);

    // A prediction marked Invalid scores as a negative call.
    LabelledDataset preds = copy_labels(truth);
    std::size_t target = 5;
    REQUIRE(truth.samples[target].labels[3] != AuLabel::Invalid);
    const bool truth_pos = truth.samples[target].labels.is_positive(3);
    preds.samples[target].labels[3] = AuLabel::Invalid;
    const ConfusionCounts counts2 = confusion(preds, truth);
    if (truth_pos)
        CHECK(counts2.per_au[3].fn >= 1);
    else
        CHECK(counts2.per_au[3].tn >= 1);
}

TEST_CASE("frame misalignment raises AlignmentError naming offenders") {
    Rng rng(3);
    const LabelledDataset truth = random_truth(rng, 1, 5);
    LabelledDataset preds = copy_labels(truth);
    Sample extra;
    extra.video_id = "v9";
    extra.frame_idx = 3;
    preds.samples.push_back(extra);
    preds = LabelledDataset::build(std::move(preds.samples));
    CHECK_THROWS_WITH_AS(confusion(preds, truth), doctest::Contains("pred-only (v9, 3)"),
                         AlignmentError);

    LabelledDataset short_preds = copy_labels(truth);
    short_preds.samples.pop_back();
    CHECK_THROWS_WITH_AS(confusion(short_preds, truth), doctest::Contains("truth-only"),
                         AlignmentError);
}

TEST_CASE("f1 arithmetic: frozen cells, degenerate convention, macro mean") {
    ConfusionCounts counts;
    counts.per_au[0] = {2, 1, 1, 10};  // f1 = 4/6
    counts.per_au[1] = {5, 0, 0, 9};   // perfect
    // per_au[2..11] all-zero: degenerate, scored 0 by convention
    const F1Report rep = f1(counts);
    CHECK(rep.per_au_f1[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(rep.per_au_f1[1] == 1.0);
    CHECK(rep.per_au_f1[2] == 0.0);
    CHECK(rep.degenerate[2]);
    CHECK_FALSE(rep.degenerate[0]);
    double mean = 0.0;
    for (double v : rep.per_au_f1) mean += v;
    CHECK(rep.macro_f1 == mean / kNumAus);

    // tn-only cells are not degenerate but still score 0? No: denom counts
    // 2tp+fp+fn, so tn-only is degenerate too.
    ConfusionCounts tn_only;
    tn_only.per_au[0] = {0, 0, 0, 50};
    CHECK(f1(tn_only).degenerate[0]);
}

TEST_CASE("confusion matches a brute-force recount on random data") {
    Rng rng(47);
    for (int rep = 0; rep < 10; ++rep) {
        const LabelledDataset truth = random_truth(rng, 2, 50, 0.05);
        std::array<double, kNumAus> flip{};
        for (auto& f : flip) f = rng.uniform(0.0, 0.4);
        const LabelledDataset preds = binarize(noisy_run(truth, flip, rng));

        const ConfusionCounts fast = confusion(preds, truth);

        std::map<std::pair<std::string, std::int64_t>, const Sample*> by_key;
        for (const auto& s : preds.samples) by_key[{s.video_id, s.frame_idx}] = &s;
        ConfusionCounts slow;
        for (const auto& t : truth.samples) {
            const Sample* p = by_key.at({t.video_id, t.frame_idx});
            for (int k = 0; k < kNumAus; ++k) {
                if (t.labels[k] == AuLabel::Invalid) continue;
                const bool tp_ = t.labels.is_positive(k);
                const bool pp = p->labels.is_positive(k);
                auto& c = slow.per_au[static_cast<std::size_t>(k)];
                if (pp && tp_) ++c.tp;
                else if (pp) ++c.fp;
                else if (tp_) ++c.fn;
                else ++c.tn;
            }
        }
        for (int k = 0; k < kNumAus; ++k) {
            const auto& a = fast.per_au[static_cast<std::size_t>(k)];
            const auto& b = slow.per_au[static_cast<std::size_t>(k)];
            CHECK(a.tp == b.tp);
            CHECK(a.fp == b.fp);
            CHECK(a.fn == b.fn);
            CHECK(a.tn == b.tn);
        }
    }
}

TEST_CASE("select_ensemble picks the per-AU argmax with lexicographic ties") {
    Rng rng(99);
    const LabelledDataset truth = random_truth(rng, 2, 60);

    // Run "alpha" is clean on the first half of the AUs, noisy on the rest;
    // "beta" is the mirror image.
    std::array<double, kNumAus> flip_a{}, flip_b{};
    for (int k = 0; k < kNumAus; ++k) {
        flip_a[static_cast<std::size_t>(k)] = k < 6 ? 0.0 : 0.35;
        flip_b[static_cast<std::size_t>(k)] = k < 6 ? 0.35 : 0.0;
    }
    const std::vector<NamedRun> runs{{"alpha", noisy_run(truth, flip_a, rng)},
                                     {"beta", noisy_run(truth, flip_b, rng)}};

    const EnsembleSpec spec = select_ensemble(runs, truth);
    REQUIRE(spec.provenance.size() == 2);
    for (int k = 0; k < kNumAus; ++k) {
        const std::string& chosen = spec.chosen_run[static_cast<std::size_t>(k)];
        CHECK(chosen == (k < 6 ? "alpha" : "beta"));
        const double chosen_f1 = spec.provenance.at(chosen).per_au_f1[static_cast<std::size_t>(k)];
        for (const auto& [name, report] : spec.provenance)
            CHECK(chosen_f1 >= report.per_au_f1[static_cast<std::size_t>(k)]);
    }

    // Identical runs tie on every AU: the lexicographically smallest name wins.
    const std::vector<NamedRun> twins{{"zeta", runs[0].run}, {"eta", runs[0].run}};
    const EnsembleSpec tie_spec = select_ensemble(twins, truth);
    for (const auto& name : tie_spec.chosen_run) CHECK(name == "eta");

    // A single run is chosen everywhere.
    const EnsembleSpec solo = select_ensemble({runs[0]}, truth);
    for (const auto& name : solo.chosen_run) CHECK(name == "alpha");

    CHECK_THROWS_AS(select_ensemble({}, truth), ValueError);
    CHECK_THROWS_AS(select_ensemble({{"x", runs[0].run}, {"x", runs[0].run}}, truth), ValueError);
    CHECK_THROWS_AS(select_ensemble(runs, truth, {1, 1, 1}), ConfigError);
}

TEST_CASE("per-run windows smooth before scoring") {
    Rng rng(7);
    const LabelledDataset truth = random_truth(rng, 1, 40);
    std::array<double, kNumAus> flip{};
    flip.fill(0.2);
    const PredictionRun run = noisy_run(truth, flip, rng);

    const EnsembleSpec spec1 = select_ensemble({{"a", run}}, truth, {1});
    const EnsembleSpec spec5 = select_ensemble({{"a", run}}, truth, {5});
    const F1Report direct1 = f1_score(binarize(run), truth);
    const F1Report direct5 = f1_score(binarize(smooth_logits(run, 5)), truth);
    CHECK(spec1.provenance.at("a").macro_f1 == direct1.macro_f1);
    CHECK(spec5.provenance.at("a").macro_f1 == direct5.macro_f1);

    // Broadcast equals explicit per-run windows.
    const EnsembleSpec broadcast = select_ensemble({{"a", run}, {"b", run}}, truth, {5});
    const EnsembleSpec explicit_w = select_ensemble({{"a", run}, {"b", run}}, truth, {5, 5});
    CHECK(broadcast.provenance.at("a").macro_f1 == explicit_w.provenance.at("a").macro_f1);
    CHECK(broadcast.chosen_run == explicit_w.chosen_run);
}

TEST_CASE("apply_ensemble swaps columns verbatim") {
    Rng rng(13);
    const LabelledDataset truth = random_truth(rng, 2, 30);
    std::array<double, kNumAus> flip{};
    flip.fill(0.25);
    const PredictionRun run_a = noisy_run(truth, flip, rng);
    const PredictionRun run_b = noisy_run(truth, flip, rng);
    const std::vector<NamedRun> runs{{"a", run_a}, {"b", run_b}};

    // Single-run spec reproduces the run bit for bit.
    EnsembleSpec solo;
    solo.chosen_run.fill("b");
    const PredictionRun only_b = apply_ensemble(solo, runs);
    for (std::size_t i = 0; i < run_b.size(); ++i)
        CHECK(only_b.entries[i].logits == run_b.entries[i].logits);

    // Interleaved spec: even AUs from a, odd from b.
    EnsembleSpec mixed;
    for (int k = 0; k < kNumAus; ++k)
        mixed.chosen_run[static_cast<std::size_t>(k)] = k % 2 == 0 ? "a" : "b";
    const PredictionRun combined = apply_ensemble(mixed, runs);
    for (std::size_t i = 0; i < combined.size(); ++i) {
        CHECK(combined.entries[i].video_id == run_a.entries[i].video_id);
        for (int k = 0; k < kNumAus; ++k) {
            const auto& source = k % 2 == 0 ? run_a : run_b;
            CHECK(combined.entries[i].logits[static_cast<std::size_t>(k)] ==
                  source.entries[i].logits[static_cast<std::size_t>(k)]);
        }
    }

    EnsembleSpec absent;
    absent.chosen_run.fill("c");
    CHECK_THROWS_AS(apply_ensemble(absent, runs), SpecError);

    // Misaligned runs are rejected.
    PredictionRun shifted = run_b;
    shifted.entries.pop_back();
    CHECK_THROWS_AS(apply_ensemble(solo, {{"a", run_a}, {"b", shifted}}), AlignmentError);
}

TEST_CASE("combined per-AU F1 equals the per-AU maximum exactly") {
    Rng rng(1234);
    for (int rep = 0; rep < 5; ++rep) {
        const LabelledDataset truth = random_truth(rng, 2, 40);
        std::vector<NamedRun> runs;
        for (int m = 0; m < 4; ++m) {
            std::array<double, kNumAus> flip{};
            for (auto& f : flip) f = rng.uniform(0.0, 0.45);
            runs.push_back({"run" + std::to_string(m), noisy_run(truth, flip, rng)});
        }
        const EnsembleSpec spec = select_ensemble(runs, truth);
        const PredictionRun combined = apply_ensemble(spec, runs);
        const F1Report combined_rep = f1_score(binarize(combined), truth);

        double best_single_macro = -1.0;
        for (const auto& run : runs) {
            const auto& rep_r = spec.provenance.at(run.name);
            best_single_macro = std::max(best_single_macro, rep_r.macro_f1);
        }
        for (int k = 0; k < kNumAus; ++k) {
            double best = -1.0;
            for (const auto& run : runs)
                best = std::max(best,
                                spec.provenance.at(run.name).per_au_f1[static_cast<std::size_t>(k)]);
            CHECK(combined_rep.per_au_f1[static_cast<std::size_t>(k)] == best);
        }
        CHECK(combined_rep.macro_f1 >= best_single_macro);
    }
}
