#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

// End-to-end exercises of the installed binary through std::system. Each
// test gets its own scratch directory; stdout/stderr are captured to files.

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& tag) {
    static int counter = 0;
    const fs::path dir =
        fs::temp_directory_path() / ("aupipe_cli_" + tag + "_" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

struct CliResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out_file = dir / "_stdout.txt";
    const fs::path err_file = dir / "_stderr.txt";
    const std::string cmd = std::string(AUPIPE_BIN) + " " + args + " > " + out_file.string() +
                            " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

// Small end-to-end config: 4 videos of 30 frames, 8 features, shallow model,
// two epochs. Only the repro defaults are pinned; overrides are fair game.
const char* kTinyConfig = R"({
  "seed": 11,
  "synth": {"n_videos": 4, "frames_per_video": 30, "feature_dim": 8},
  "model": {"hidden_dims": [8], "dropout_p": 0.2},
  "optim": {"epochs": 2, "batch_size": 32, "lr_drop_epochs": [1]},
  "ensemble": {"n_models": 2, "windows": [1, 5]}
})";

}  // namespace

TEST_CASE("usage errors exit 1 and print help") {
    const fs::path dir = fresh_dir("usage");

    CHECK(run_cli("", dir).exit_code == 1);

    const CliResult unknown = run_cli("frobnicate", dir);
    CHECK(unknown.exit_code == 1);
    CHECK(unknown.err.find("Usage") != std::string::npos);

    const CliResult missing = run_cli("stats", dir);
    CHECK(missing.exit_code == 1);
    CHECK(missing.err.find("--data") != std::string::npos);

    const CliResult help = run_cli("--help", dir);
    CHECK(help.exit_code == 0);
    CHECK(help.out.find("synth") != std::string::npos);
    CHECK(help.out.find("ensemble") != std::string::npos);
}

TEST_CASE("data and config errors exit 2") {
    const fs::path dir = fresh_dir("errors");

    const CliResult absent = run_cli("stats --data " + (dir / "nope.csv").string(), dir);
    CHECK(absent.exit_code == 2);
    CHECK(absent.err.find("error:") != std::string::npos);

    spit(dir / "bad.json", "{\"sed\": 1}\n");
    const CliResult bad_key =
        run_cli("synth --config " + (dir / "bad.json").string() + " --out " +
                    (dir / "x.csv").string(),
                dir);
    CHECK(bad_key.exit_code == 2);
    CHECK(bad_key.err.find("unknown key") != std::string::npos);

    spit(dir / "labels.csv", "video_id,frame\n");  // truncated header
    const CliResult trunc = run_cli("stats --data " + (dir / "labels.csv").string(), dir);
    CHECK(trunc.exit_code == 2);
}

TEST_CASE("smooth validates the window before writing anything") {
    const fs::path dir = fresh_dir("smooth");
    std::string csv =
        "video_id,frame,AU1_logit,AU2_logit,AU4_logit,AU6_logit,AU7_logit,AU10_logit,"
        "AU12_logit,AU15_logit,AU23_logit,AU24_logit,AU25_logit,AU26_logit\n";
    csv += "va,0,1,-1,0.25,0,0,0,0,0,0,0,0,0\n";
    csv += "va,1,-1,1,0.75,0,0,0,0,0,0,0,0,0\n";
    csv += "va,2,1,-1,0.25,0,0,0,0,0,0,0,0,0\n";
    spit(dir / "p.csv", csv);

    const std::string in_out =
        " --in " + (dir / "p.csv").string() + " --out " + (dir / "s.csv").string();
    const CliResult even = run_cli("smooth --window 4" + in_out, dir);
    CHECK(even.exit_code == 2);
    CHECK(even.err.find("window must be odd") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "s.csv"));

    const CliResult too_wide = run_cli("smooth --window 5" + in_out, dir);
    CHECK(too_wide.exit_code == 2);
    CHECK(too_wide.err.find("exceeds") != std::string::npos);

    // Window 1 is the identity; applying it twice proves serialization is a
    // fixed point.
    REQUIRE(run_cli("smooth --window 1" + in_out, dir).exit_code == 0);
    REQUIRE(run_cli("smooth --window 1 --in " + (dir / "s.csv").string() + " --out " +
                        (dir / "s2.csv").string(),
                    dir)
                .exit_code == 0);
    CHECK(slurp(dir / "s.csv") == slurp(dir / "s2.csv"));
    CHECK(run_cli("smooth --window 3" + in_out, dir).exit_code == 0);
}

TEST_CASE("synth is deterministic and honors --labels-only and --clean-out") {
    const fs::path dir = fresh_dir("synth");
    spit(dir / "cfg.json", kTinyConfig);
    const std::string base = "synth --config " + (dir / "cfg.json").string();

    REQUIRE(run_cli(base + " --out " + (dir / "a.csv").string(), dir).exit_code == 0);
    REQUIRE(run_cli(base + " --out " + (dir / "b.csv").string(), dir).exit_code == 0);
    const std::string a = slurp(dir / "a.csv");
    CHECK(a == slurp(dir / "b.csv"));
    CHECK(a.find("f0") != std::string::npos);  // feature columns present

    REQUIRE(run_cli(base + " --out " + (dir / "l.csv").string() + " --labels-only", dir)
                .exit_code == 0);
    const std::string labels = slurp(dir / "l.csv");
    CHECK(labels.find("f0") == std::string::npos);
    CHECK(labels.substr(0, labels.find('\n')).find("AU26") != std::string::npos);

    // A different seed changes the bytes.
    REQUIRE(run_cli(base + " --seed 77 --out " + (dir / "c.csv").string(), dir).exit_code == 0);
    CHECK(slurp(dir / "c.csv") != a);

    // Flicker: observed and clean channels disagree, clean scores below 1.
    spit(dir / "flick.json",
         R"({"seed": 4, "synth": {"n_videos": 2, "frames_per_video": 60, "feature_dim": 4,
             "flicker_rate": 0.15}})");
    REQUIRE(run_cli("synth --config " + (dir / "flick.json").string() + " --labels-only --out " +
                        (dir / "obs.csv").string() + " --clean-out " + (dir / "clean.csv").string(),
                    dir)
                .exit_code == 0);
    const std::string obs_path = (dir / "obs.csv").string();
    const std::string clean_path = (dir / "clean.csv").string();
    CHECK(slurp(dir / "obs.csv") != slurp(dir / "clean.csv"));

    const CliResult self_eval = run_cli("eval --pred " + obs_path + " --truth " + obs_path +
                                            " --json",
                                        dir);
    REQUIRE(self_eval.exit_code == 0);
    CHECK(json::parse(self_eval.out)["macro_f1"].get<double>() == 1.0);

    const CliResult clean_eval = run_cli("eval --pred " + obs_path + " --truth " + clean_path +
                                             " --json",
                                         dir);
    REQUIRE(clean_eval.exit_code == 0);
    CHECK(json::parse(clean_eval.out)["macro_f1"].get<double>() < 1.0);
}

TEST_CASE("stats and resample report a falling mean IR") {
    const fs::path dir = fresh_dir("resample");
    const std::string preset = std::string(AUPIPE_CONFIGS_DIR) + "/imbalanced.json";
    REQUIRE(run_cli("synth --config " + preset + " --labels-only --out " +
                        (dir / "labels.csv").string(),
                    dir)
                .exit_code == 0);

    const CliResult table = run_cli("stats --data " + (dir / "labels.csv").string(), dir);
    REQUIRE(table.exit_code == 0);
    CHECK(table.out.find("mean_ir") != std::string::npos);

    const CliResult before =
        run_cli("stats --data " + (dir / "labels.csv").string() + " --json", dir);
    REQUIRE(before.exit_code == 0);
    const double ir_before = json::parse(before.out)["mean_ir"].get<double>();
    CHECK(ir_before > 3.0);

    REQUIRE(run_cli("resample --data " + (dir / "labels.csv").string() + " --out " +
                        (dir / "rs.csv").string() + " --method ml_ros --percent 25 --seed 9",
                    dir)
                .exit_code == 0);
    const CliResult after = run_cli("stats --data " + (dir / "rs.csv").string() + " --json", dir);
    REQUIRE(after.exit_code == 0);
    CHECK(json::parse(after.out)["mean_ir"].get<double>() < ir_before);

    const CliResult both = run_cli("resample --data " + (dir / "labels.csv").string() +
                                       " --out x.csv --percent 10 --count 5",
                                   dir);
    CHECK(both.exit_code == 2);
    CHECK(both.err.find("mutually exclusive") != std::string::npos);
}

TEST_CASE("train, predict, eval and ensemble compose end to end") {
    const fs::path dir = fresh_dir("flow");
    spit(dir / "cfg.json", kTinyConfig);
    const std::string cfg = (dir / "cfg.json").string();
    const std::string train_csv = (dir / "train.csv").string();
    const std::string val_csv = (dir / "val.csv").string();

    REQUIRE(run_cli("synth --config " + cfg + " --out " + train_csv, dir).exit_code == 0);
    REQUIRE(run_cli("synth --config " + cfg + " --seed 12 --out " + val_csv, dir).exit_code == 0);

    const CliResult t0 = run_cli("train --config " + cfg + " --data " + train_csv + " --val " +
                                     val_csv + " --out " + (dir / "ck0").string(),
                                 dir);
    REQUIRE(t0.exit_code == 0);
    CHECK(t0.err.find("epoch 1:") != std::string::npos);
    CHECK(t0.err.find("macro val F1") != std::string::npos);
    const std::string ckpt = (dir / "ck0" / "ckpt_epoch_002.bin").string();
    REQUIRE(fs::exists(ckpt));

    REQUIRE(run_cli("train --config " + cfg + " --data " + train_csv + " --val " + val_csv +
                        " --seed 99 --out " + (dir / "ck1").string(),
                    dir)
                .exit_code == 0);

    const std::string p0 = (dir / "p0.csv").string();
    const std::string p1 = (dir / "p1.csv").string();
    REQUIRE(run_cli("predict --ckpt " + ckpt + " --data " + val_csv + " --out " + p0, dir)
                .exit_code == 0);
    REQUIRE(run_cli("predict --ckpt " + (dir / "ck1" / "ckpt_epoch_002.bin").string() +
                        " --data " + val_csv + " --out " + p1,
                    dir)
                .exit_code == 0);
    // Header plus one row per frame.
    const std::string p0_text = slurp(dir / "p0.csv");
    CHECK(std::count(p0_text.begin(), p0_text.end(), '\n') == 121);

    const CliResult ev = run_cli("eval --pred " + p0 + " --truth " + val_csv + " --json", dir);
    REQUIRE(ev.exit_code == 0);
    const json ev_json = json::parse(ev.out);
    const double macro = ev_json["macro_f1"].get<double>();
    CHECK(macro >= 0.0);
    CHECK(macro <= 1.0);
    CHECK(ev_json["per_au_f1"].size() == 12);
    CHECK(run_cli("eval --pred " + p0 + " --truth " + val_csv + " --window 5", dir).exit_code == 0);

    const CliResult ens = run_cli("ensemble --runs " + p0 + "," + p1 + " --truth " + val_csv +
                                      " --out " + (dir / "comb.csv").string() + " --spec-out " +
                                      (dir / "spec.json").string() + " --json",
                                  dir);
    REQUIRE(ens.exit_code == 0);
    const json spec = json::parse(slurp(dir / "spec.json"));
    REQUIRE(spec["chosen_run"].size() == 12);
    for (const auto& [au, name] : spec["chosen_run"].items()) {
        const std::string chosen = name.get<std::string>();
        CHECK((chosen == "p0" || chosen == "p1"));
    }
    REQUIRE(spec["provenance"].contains("p0"));
    REQUIRE(spec["provenance"].contains("p1"));

    // The combined macro equals the mean of the per-AU maxima.
    const json out_json = json::parse(ens.out);
    double expected = 0.0;
    for (const auto& [au, a] : spec["provenance"]["p0"]["per_au_f1"].items())
        expected += std::max(a.get<double>(),
                             spec["provenance"]["p1"]["per_au_f1"][au].get<double>());
    expected /= 12.0;
    CHECK(out_json["macro_f1"].get<double>() == doctest::Approx(expected).epsilon(1e-12));
    CHECK(fs::exists(dir / "comb.csv"));
}

TEST_CASE("repro writes a deterministic artifact set") {
    const fs::path dir = fresh_dir("repro");
    spit(dir / "cfg.json", kTinyConfig);
    const std::string cfg = (dir / "cfg.json").string();

    const CliResult r1 =
        run_cli("repro --config " + cfg + " --out-dir " + (dir / "r1").string(), dir);
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.out.find("macro_f1") != std::string::npos);

    const CliResult r2 =
        run_cli("repro --config " + cfg + " --out-dir " + (dir / "r2").string(), dir);
    REQUIRE(r2.exit_code == 0);
    CHECK(r1.out == r2.out);

    for (const char* name : {"config.json", "dataset.csv", "train.csv", "val.csv",
                             "resampled.csv", "preds_raw_0.csv", "ensemble.csv", "metrics.json"}) {
        CAPTURE(name);
        REQUIRE(fs::exists(dir / "r1" / name));
        CHECK(slurp(dir / "r1" / name) == slurp(dir / "r2" / name));
    }

    const json metrics = json::parse(slurp(dir / "r1" / "metrics.json"));
    CHECK(metrics.contains("ensemble"));
    CHECK(metrics.contains("per_run"));
    CHECK(metrics["mean_ir_before_resample"].get<double>() >=
          metrics["mean_ir_after_resample"].get<double>());
}
