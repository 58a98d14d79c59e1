#include "aupipe/synth.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "aupipe/rng.hpp"

namespace aupipe {

namespace {

constexpr double kSignalScale = 10.0;
constexpr double kNoiseScale = 2.0;

struct ChainGroup {
    int first = -1;
    int second = -1;  // -1 for singletons
    // Joint refresh distribution, cumulative: p11, p10, p01 (pairs only).
    double p11 = 0.0, p10 = 0.0, p01 = 0.0;
};

std::vector<ChainGroup> build_groups(const SynthConfig& cfg) {
    std::array<bool, kNumAus> used{};
    std::vector<ChainGroup> groups;
    for (const auto& pair : cfg.cooccurrence_pairs) {
        if (used[static_cast<std::size_t>(pair.first)] ||
            used[static_cast<std::size_t>(pair.second)])
            throw ConfigError("cooccurrence_pairs: AU index " +
                              std::to_string(used[static_cast<std::size_t>(pair.first)]
                                                 ? pair.first
                                                 : pair.second) +
                              " appears in more than one pair");
        used[static_cast<std::size_t>(pair.first)] = true;
        used[static_cast<std::size_t>(pair.second)] = true;
        const double pi = cfg.positive_rates[static_cast<std::size_t>(pair.first)];
        const double pj = cfg.positive_rates[static_cast<std::size_t>(pair.second)];
        ChainGroup g;
        g.first = pair.first;
        g.second = pair.second;
        g.p11 = pi * pj + pair.corr * (std::min(pi, pj) - pi * pj);
        g.p10 = pi - g.p11;
        g.p01 = pj - g.p11;
        groups.push_back(g);
    }
    for (int k = 0; k < kNumAus; ++k) {
        if (!used[static_cast<std::size_t>(k)]) {
            ChainGroup g;
            g.first = k;
            groups.push_back(g);
        }
    }
    return groups;
}

void fresh_draw(const SynthConfig& cfg, const ChainGroup& g, Rng& rng, AuLabelVector& labels) {
    if (g.second < 0) {
        labels[g.first] = rng.bernoulli(cfg.positive_rates[static_cast<std::size_t>(g.first)])
                              ? AuLabel::Positive
                              : AuLabel::Negative;
        return;
    }
    const double u = rng.uniform();
    bool a, b;
    if (u < g.p11) {
        a = b = true;
    } else if (u < g.p11 + g.p10) {
        a = true;
        b = false;
    } else if (u < g.p11 + g.p10 + g.p01) {
        a = false;
        b = true;
    } else {
        a = b = false;
    }
    labels[g.first] = a ? AuLabel::Positive : AuLabel::Negative;
    labels[g.second] = b ? AuLabel::Positive : AuLabel::Negative;
}

}  // namespace

void validate(const SynthConfig& cfg) {
    if (cfg.n_videos < 1) throw ConfigError("n_videos must be >= 1");
    if (cfg.frames_per_video < 1) throw ConfigError("frames_per_video must be >= 1");
    if (cfg.feature_dim < 1) throw ConfigError("feature_dim must be >= 1");
    for (int k = 0; k < kNumAus; ++k) {
        const double r = cfg.positive_rates[static_cast<std::size_t>(k)];
        if (!(r > 0.0 && r < 1.0))
            throw ConfigError(std::string("positive_rates[") + kAuNames[static_cast<std::size_t>(k)] +
                              "] must lie in (0, 1), got " + std::to_string(r));
    }
    for (const auto& p : cfg.cooccurrence_pairs) {
        if (p.first < 0 || p.first >= kNumAus || p.second < 0 || p.second >= kNumAus ||
            p.first == p.second)
            throw ConfigError("cooccurrence pair indices must be distinct AU indices in [0, 12)");
        if (!(p.corr >= 0.0 && p.corr <= 1.0))
            throw ConfigError("cooccurrence correlation must lie in [0, 1]");
    }
    if (!(cfg.persistence >= 0.0 && cfg.persistence < 1.0))
        throw ConfigError("persistence must lie in [0, 1)");
    if (!(cfg.flicker_rate >= 0.0 && cfg.flicker_rate < 1.0))
        throw ConfigError("flicker_rate must lie in [0, 1)");
}

LabelledDataset generate_synthetic(const SynthConfig& cfg) {
    validate(cfg);
    const auto groups = build_groups(cfg);

    // One prototype direction per AU, shared across videos. With enough
    // feature dimensions the set is orthonormalized so no AU's signal leaks
    // into another's direction; below 12 dimensions that is impossible and
    // plain normalized directions are used as-is.
    Rng proto_rng(derive_seed(cfg.seed, "prototypes"));
    const bool orthogonalize = cfg.feature_dim >= kNumAus;
    std::vector<std::vector<double>> prototypes(kNumAus);
    for (int k = 0; k < kNumAus; ++k) {
        auto& dir = prototypes[static_cast<std::size_t>(k)];
        dir.resize(static_cast<std::size_t>(cfg.feature_dim));
        while (true) {
            for (auto& v : dir) v = proto_rng.normal();
            if (orthogonalize) {
                for (int j = 0; j < k; ++j) {
                    const auto& prev = prototypes[static_cast<std::size_t>(j)];
                    double dot = 0.0;
                    for (std::size_t d = 0; d < dir.size(); ++d) dot += dir[d] * prev[d];
                    dot /= kSignalScale * kSignalScale;  // prev has norm kSignalScale
                    for (std::size_t d = 0; d < dir.size(); ++d) dir[d] -= dot * prev[d];
                }
            }
            double norm_sq = 0.0;
            for (const auto& v : dir) norm_sq += v * v;
            if (norm_sq > 1e-12) {
                const double inv_norm = 1.0 / std::sqrt(norm_sq);
                for (auto& v : dir) v *= inv_norm * kSignalScale;
                break;
            }
            // Degenerate residual after projection; redraw.
        }
    }

    std::vector<Sample> samples;
    samples.reserve(static_cast<std::size_t>(cfg.n_videos * cfg.frames_per_video));
    for (int v = 0; v < cfg.n_videos; ++v) {
        Rng chain_rng(derive_seed(cfg.seed, "chain", static_cast<std::uint64_t>(v)));
        Rng flicker_rng(derive_seed(cfg.seed, "flicker", static_cast<std::uint64_t>(v)));
        Rng noise_rng(derive_seed(cfg.seed, "noise", static_cast<std::uint64_t>(v)));

        char vid[16];
        std::snprintf(vid, sizeof(vid), "v%03d", v);

        AuLabelVector state;
        for (int t = 0; t < cfg.frames_per_video; ++t) {
            for (const auto& g : groups) {
                // Paired chains share the refresh coin so marginal rates stay
                // exact while joint positives rise above independence.
                if (t == 0 || chain_rng.bernoulli(1.0 - cfg.persistence))
                    fresh_draw(cfg, g, chain_rng, state);
            }

            Sample s;
            s.video_id = vid;
            s.frame_idx = t;
            s.clean_labels = state;
            s.labels = state;
            if (cfg.flicker_rate > 0.0 && flicker_rng.bernoulli(cfg.flicker_rate)) {
                const int k = static_cast<int>(flicker_rng.uniform_int(kNumAus));
                s.labels[k] =
                    s.labels[k] == AuLabel::Positive ? AuLabel::Negative : AuLabel::Positive;
            }

            s.features.assign(static_cast<std::size_t>(cfg.feature_dim), 0.0);
            for (int k = 0; k < kNumAus; ++k) {
                const double sign = s.labels[k] == AuLabel::Positive ? 1.0 : -1.0;
                const auto& dir = prototypes[static_cast<std::size_t>(k)];
                for (std::size_t d = 0; d < s.features.size(); ++d)
                    s.features[d] += sign * dir[d];
            }
            for (auto& f : s.features) f += kNoiseScale * noise_rng.normal();

            samples.push_back(std::move(s));
        }
    }
    return LabelledDataset::build(std::move(samples), /*has_clean=*/cfg.flicker_rate > 0.0);
}

}  // namespace aupipe
