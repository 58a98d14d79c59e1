#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "aupipe/config.hpp"
#include "aupipe/csv.hpp"
#include "aupipe/rng.hpp"
#include "aupipe/synth.hpp"
#include "aupipe/types.hpp"

using namespace aupipe;

namespace {

Sample make_sample(const std::string& video, std::int64_t frame,
                   std::vector<int> positive_aus = {}, std::vector<double> features = {}) {
    Sample s;
    s.video_id = video;
    s.frame_idx = frame;
    for (int k : positive_aus) s.labels[k] = AuLabel::Positive;
    s.clean_labels = s.labels;
    s.features = std::move(features);
    return s;
}

}  // namespace

TEST_CASE("au_index maps the fixed order and rejects unknowns") {
    CHECK(au_index("AU1") == 0);
    CHECK(au_index("AU2") == 1);
    CHECK(au_index("AU26") == 11);
    CHECK(au_index("AU99") == -1);
    CHECK(au_index("") == -1);
    for (int k = 0; k < kNumAus; ++k) CHECK(au_index(kAuNames[static_cast<std::size_t>(k)]) == k);
}

TEST_CASE("parse_label_file maps cells, -1 sentinel, and sorts rows") {
    const std::string text = label_csv_header() + "\nv1,0,1,0,0,0,0,0,0,0,0,0,1,1\n";
    const LabelledDataset ds = parse_label_file(text);
    REQUIRE(ds.size() == 1);
    const Sample& s = ds.samples[0];
    CHECK(s.video_id == "v1");
    CHECK(s.frame_idx == 0);
    CHECK(s.labels.is_positive(au_index("AU1")));
    CHECK(s.labels.is_positive(au_index("AU25")));
    CHECK(s.labels.is_positive(au_index("AU26")));
    int positives = 0;
    for (int k = 0; k < kNumAus; ++k) positives += s.labels.is_positive(k) ? 1 : 0;
    CHECK(positives == 3);

    const std::string invalid = label_csv_header() + "\nv1,0,0,0,0,0,0,0,0,-1,0,0,0,0\n";
    CHECK_FALSE(parse_label_file(invalid).samples[0].labels.is_valid(au_index("AU15")));

    // Rows arrive unsorted; the dataset iterates (video, frame) lexicographic.
    const std::string shuffled =
        label_csv_header() + "\nv2,0,0,0,0,0,0,0,0,0,0,0,0,0\nv1,5,0,0,0,0,0,0,0,0,0,0,0,0\n" +
        "v1,2,0,0,0,0,0,0,0,0,0,0,0,0\n";
    const LabelledDataset sorted = parse_label_file(shuffled);
    CHECK(sorted.samples[0].frame_idx == 2);
    CHECK(sorted.samples[1].frame_idx == 5);
    CHECK(sorted.samples[2].video_id == "v2");
}

TEST_CASE("parse_label_file rejects malformed input with typed errors") {
    CHECK_THROWS_AS(parse_label_file(""), FormatError);
    CHECK_THROWS_AS(parse_label_file("video_id,frame,AU1\n"), FormatError);

    std::string bad_col = label_csv_header();
    bad_col.replace(bad_col.find("AU4"), 3, "AU3");
    CHECK_THROWS_WITH_AS(parse_label_file(bad_col + "\n"),
                         doctest::Contains("expected column 'AU4'"), FormatError);

    const std::string bad_cell = label_csv_header() + "\nv1,0,2,0,0,0,0,0,0,0,0,0,0,0\n";
    CHECK_THROWS_WITH_AS(parse_label_file(bad_cell), doctest::Contains("row 1"), ValueError);

    const std::string dup = label_csv_header() + "\nv1,3,0,0,0,0,0,0,0,0,0,0,0,0\n" +
                            "v1,3,1,0,0,0,0,0,0,0,0,0,0,0\n";
    CHECK_THROWS_AS(parse_label_file(dup), DuplicateKeyError);

    const std::string short_row = label_csv_header() + "\nv1,0,1,0\n";
    CHECK_THROWS_AS(parse_label_file(short_row), FormatError);
}

TEST_CASE("label and dataset CSV round-trip exactly") {
    std::vector<Sample> samples;
    samples.push_back(make_sample("v1", 0, {0, 10}, {1.5, -2.25}));
    samples.push_back(make_sample("v1", 1, {}, {0.1, 1e-17}));
    samples.push_back(make_sample("v2", 7, {11}, {-0.3333333333333333, 12345.678901234567}));
    samples[1].labels[3] = AuLabel::Invalid;
    const LabelledDataset ds = LabelledDataset::build(samples);

    const std::string label_text = write_label_csv(ds);
    const LabelledDataset label_rt = parse_label_file(label_text);
    REQUIRE(label_rt.size() == ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        CHECK(label_rt.samples[i].video_id == ds.samples[i].video_id);
        CHECK(label_rt.samples[i].frame_idx == ds.samples[i].frame_idx);
        CHECK(label_rt.samples[i].labels == ds.samples[i].labels);
    }
    CHECK(write_label_csv(label_rt) == label_text);

    const std::string data_text = write_dataset_csv(ds);
    const LabelledDataset data_rt = parse_dataset_file(data_text);
    REQUIRE(data_rt.feature_dim == 2);
    for (std::size_t i = 0; i < ds.size(); ++i)
        for (std::size_t d = 0; d < 2; ++d)
            CHECK(data_rt.samples[i].features[d] == ds.samples[i].features[d]);
    CHECK(write_dataset_csv(data_rt) == data_text);

    // The sniffing loader agrees with both dedicated parsers.
    CHECK(parse_label_or_dataset_file(data_text).feature_dim == 2);
    CHECK(parse_label_or_dataset_file(label_text).feature_dim == 0);
}

TEST_CASE("prediction CSV round-trips logits bit-identically") {
    std::vector<PredictionEntry> entries(3);
    Rng rng(99);
    for (std::size_t i = 0; i < entries.size(); ++i) {
        entries[i].video_id = "v" + std::to_string(i / 2);
        entries[i].frame_idx = static_cast<std::int64_t>(i % 2);
        for (int k = 0; k < kNumAus; ++k)
            entries[i].logits[static_cast<std::size_t>(k)] = rng.uniform(-30.0, 30.0);
    }
    const PredictionRun run = PredictionRun::build(entries);
    const std::string text = write_prediction_csv(run);
    const PredictionRun rt = parse_prediction_file(text);
    REQUIRE(rt.size() == run.size());
    for (std::size_t i = 0; i < run.size(); ++i) CHECK(rt.entries[i].logits == run.entries[i].logits);
    CHECK(write_prediction_csv(rt) == text);
}

TEST_CASE("write_predictions rejects an empty run before touching the filesystem") {
    const std::string path = "/tmp/aupipe_test_should_not_exist.csv";
    std::remove(path.c_str());
    CHECK_THROWS_AS(write_predictions(PredictionRun{}, path), ValueError);
    std::ifstream probe(path);
    CHECK_FALSE(probe.good());
}

TEST_CASE("dataset build enforces key uniqueness and uniform feature dim") {
    std::vector<Sample> dup{make_sample("v1", 3), make_sample("v1", 3)};
    CHECK_THROWS_AS(LabelledDataset::build(dup), DuplicateKeyError);

    std::vector<Sample> ragged{make_sample("v1", 0, {}, {1.0}), make_sample("v1", 1, {}, {1.0, 2.0})};
    CHECK_THROWS_AS(LabelledDataset::build(ragged), ShapeError);
}

TEST_CASE("split_by_video splits at video granularity") {
    std::vector<Sample> samples;
    for (int v = 0; v < 10; ++v)
        for (int f = 0; f < 3; ++f) samples.push_back(make_sample("v" + std::to_string(v), f));
    const LabelledDataset ds = LabelledDataset::build(samples);

    const auto [train, val] = split_by_video(ds, 0.3, 42);
    CHECK(train.video_ids().size() == 7);
    CHECK(val.video_ids().size() == 3);
    CHECK(train.size() + val.size() == ds.size());

    // Partition: union is everything, intersection empty.
    std::set<std::string> train_ids(train.video_ids().begin(), train.video_ids().end());
    for (const auto& id : val.video_ids()) CHECK(train_ids.count(id) == 0);

    const auto [train2, val2] = split_by_video(ds, 0.3, 42);
    CHECK(train2.video_ids() == train.video_ids());

    const auto [train3, val3] = split_by_video(ds, 0.3, 43);
    CHECK(train3.size() + val3.size() == ds.size());

    std::vector<Sample> one_video{make_sample("v0", 0), make_sample("v0", 1)};
    CHECK_THROWS_AS(split_by_video(LabelledDataset::build(one_video), 0.5, 0), SplitError);
    CHECK_THROWS_AS(split_by_video(ds, 0.0, 0), ConfigError);
    CHECK_THROWS_AS(split_by_video(ds, 1.0, 0), ConfigError);
}

TEST_CASE("generate_synthetic is a pure function of its config") {
    SynthConfig cfg;
    cfg.n_videos = 4;
    cfg.frames_per_video = 50;
    cfg.feature_dim = 8;
    cfg.seed = 7;
    const LabelledDataset a = generate_synthetic(cfg);
    const LabelledDataset b = generate_synthetic(cfg);
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() == 200);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.samples[i].video_id == b.samples[i].video_id);
        CHECK(a.samples[i].labels == b.samples[i].labels);
        CHECK(a.samples[i].features == b.samples[i].features);
    }

    SynthConfig other = cfg;
    other.seed = 8;
    const LabelledDataset c = generate_synthetic(other);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.size() && !any_diff; ++i)
        any_diff = a.samples[i].labels != c.samples[i].labels;
    CHECK(any_diff);
}

TEST_CASE("synthetic stationary rates land near the configured rates") {
    SynthConfig cfg;
    cfg.n_videos = 5;
    cfg.frames_per_video = 2000;  // 10k frames per the Monte-Carlo contract
    cfg.feature_dim = 4;
    cfg.positive_rates.fill(0.5);
    cfg.cooccurrence_pairs.clear();
    cfg.seed = 11;
    const LabelledDataset ds = generate_synthetic(cfg);
    for (int k = 0; k < kNumAus; ++k) {
        std::int64_t pos = 0;
        for (const auto& s : ds.samples) pos += s.labels.is_positive(k) ? 1 : 0;
        const double rate = static_cast<double>(pos) / static_cast<double>(ds.size());
        CHECK(rate > 0.4);
        CHECK(rate < 0.6);
    }
}

TEST_CASE("cooccurrence pairs raise joint probability above independence") {
    SynthConfig cfg;
    cfg.n_videos = 5;
    cfg.frames_per_video = 2000;
    cfg.feature_dim = 4;
    cfg.positive_rates.fill(0.3);
    cfg.cooccurrence_pairs = {{10, 11, 0.9}};
    cfg.seed = 13;
    const LabelledDataset ds = generate_synthetic(cfg);
    double p25 = 0, p26 = 0, joint = 0;
    for (const auto& s : ds.samples) {
        p25 += s.labels.is_positive(10) ? 1 : 0;
        p26 += s.labels.is_positive(11) ? 1 : 0;
        joint += (s.labels.is_positive(10) && s.labels.is_positive(11)) ? 1 : 0;
    }
    const auto n = static_cast<double>(ds.size());
    CHECK(joint / n > (p25 / n) * (p26 / n));
}

TEST_CASE("flicker flips exactly one bit per affected frame and keeps a clean channel") {
    SynthConfig cfg;
    cfg.n_videos = 4;
    cfg.frames_per_video = 500;
    cfg.feature_dim = 4;
    cfg.flicker_rate = 0.2;
    cfg.seed = 17;
    const LabelledDataset ds = generate_synthetic(cfg);
    CHECK(ds.has_clean);
    std::size_t flipped_frames = 0;
    for (const auto& s : ds.samples) {
        int diffs = 0;
        for (int k = 0; k < kNumAus; ++k)
            diffs += (s.labels[k] != s.clean_labels[k]) ? 1 : 0;
        CHECK(diffs <= 1);
        flipped_frames += diffs > 0 ? 1 : 0;
    }
    const double observed = static_cast<double>(flipped_frames) / static_cast<double>(ds.size());
    CHECK(observed > 0.1);
    CHECK(observed < 0.3);

    SynthConfig no_flicker = cfg;
    no_flicker.flicker_rate = 0.0;
    CHECK_FALSE(generate_synthetic(no_flicker).has_clean);
}

TEST_CASE("synth config validation rejects out-of-domain values") {
    SynthConfig cfg;
    cfg.positive_rates[3] = 0.0;
    CHECK_THROWS_AS(generate_synthetic(cfg), ConfigError);
    cfg = SynthConfig{};
    cfg.positive_rates[3] = 1.0;
    CHECK_THROWS_AS(generate_synthetic(cfg), ConfigError);
    cfg = SynthConfig{};
    cfg.flicker_rate = 1.0;
    CHECK_THROWS_AS(generate_synthetic(cfg), ConfigError);
    cfg = SynthConfig{};
    cfg.persistence = 1.0;
    CHECK_THROWS_AS(generate_synthetic(cfg), ConfigError);
    cfg = SynthConfig{};
    cfg.cooccurrence_pairs = {{3, 3, 0.5}};
    CHECK_THROWS_AS(generate_synthetic(cfg), ConfigError);
    cfg = SynthConfig{};
    cfg.n_videos = 0;
    CHECK_THROWS_AS(generate_synthetic(cfg), ConfigError);
}

TEST_CASE("rng streams are deterministic, bounded, and restorable") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    Rng r(5);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.uniform_int(7) < 7);
    }

    const auto snapshot = r.state();
    std::vector<double> expected;
    for (int i = 0; i < 10; ++i) expected.push_back(r.normal());
    r.restore(snapshot);
    for (int i = 0; i < 10; ++i) CHECK(r.normal() == expected[static_cast<std::size_t>(i)]);
}

TEST_CASE("derive_seed separates stages and indices") {
    const std::uint64_t base = 42;
    std::set<std::uint64_t> seen;
    seen.insert(derive_seed(base, "synth"));
    seen.insert(derive_seed(base, "split"));
    seen.insert(derive_seed(base, "train"));
    seen.insert(derive_seed(base, "train", 0));
    seen.insert(derive_seed(base, "train", 1));
    seen.insert(derive_seed(base, "train", 0, 1));
    seen.insert(derive_seed(base, "train", 1, 0));
    CHECK(seen.size() == 7);
    CHECK(derive_seed(base, "train", 3) == derive_seed(base, "train", 3));
    CHECK(derive_seed(base, "train") != derive_seed(base + 1, "train"));
}

TEST_CASE("pipeline config dump/parse round-trips and stays canonical") {
    PipelineConfig cfg;
    cfg.seed = 99;
    cfg.synth.flicker_rate = 0.05;
    cfg.resample.method = ResampleMethod::Manual;
    cfg.resample.manual_table = ManualResampleTable{};
    cfg.ensemble.windows = {1, 5};
    cfg.ensemble.n_models = 2;
    cfg.seeds.train = 777;
    const std::string text = dump_pipeline_config(cfg);
    const PipelineConfig rt = parse_pipeline_config(text);
    CHECK(dump_pipeline_config(rt) == text);
    CHECK(rt.seed == 99);
    CHECK(rt.resample.method == ResampleMethod::Manual);
    CHECK(rt.seeds.train == 777);
    CHECK(rt.stage_seed("train") == 777);
    CHECK(rt.stage_seed("synth") == derive_seed(99, "synth"));
}

TEST_CASE("config parsing is strict about unknown keys") {
    CHECK_THROWS_WITH_AS(parse_pipeline_config(R"({"sed": 1})"),
                         doctest::Contains("unknown key"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_pipeline_config(R"({"optim": {"lr": 0.1}})"),
                         doctest::Contains("optim.lr"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_pipeline_config(R"({"synth": {"n_video": 3}})"),
                         doctest::Contains("synth.n_video"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_pipeline_config("{"), doctest::Contains("not valid JSON"),
                         ConfigError);
    CHECK_THROWS_AS(parse_pipeline_config(R"({"seed": "abc"})"), ConfigError);
}

TEST_CASE("shipped default.json is the canonical dump of in-code defaults") {
    const std::string shipped = read_text_file(std::string(AUPIPE_CONFIGS_DIR) + "/default.json");
    CHECK(shipped == dump_pipeline_config(PipelineConfig{}));
}

TEST_CASE("shipped preset configs parse and carry their advertised settings") {
    const PipelineConfig flicker =
        load_pipeline_config(std::string(AUPIPE_CONFIGS_DIR) + "/flicker.json");
    CHECK(flicker.synth.flicker_rate == 0.1);
    CHECK(flicker.postprocess.smooth_window == 5);

    const PipelineConfig imb =
        load_pipeline_config(std::string(AUPIPE_CONFIGS_DIR) + "/imbalanced.json");
    CHECK(imb.synth.n_videos * imb.synth.frames_per_video == 1000);
    double lo = 1.0, hi = 0.0;
    for (double r : imb.synth.positive_rates) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(lo == 0.02);
    CHECK(hi == 0.5);
    CHECK(imb.resample.clone_budget.kind == CloneBudget::Kind::Percent);
    CHECK(imb.resample.clone_budget.value == 25.0);
}

TEST_CASE("default synth preset spans the documented rate skew") {
    const SynthConfig cfg;
    double lo = 1.0, hi = 0.0;
    for (double r : cfg.positive_rates) {
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(lo <= 0.05);
    CHECK(hi >= 0.3);
}
