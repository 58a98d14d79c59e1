#include "aupipe/checkpoint.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "aupipe/csv.hpp"
#include "aupipe/error.hpp"

namespace aupipe {

namespace {

using nlohmann::json;

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = kFnvOffset;
    for (unsigned char c : s) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

void append_doubles(std::string& out, const double* data, std::size_t n) {
    // Raw host doubles; the on-disk format is little-endian and this code
    // only targets little-endian platforms.
    static_assert(sizeof(double) == 8);
    out.append(reinterpret_cast<const char*>(data), n * sizeof(double));
}

void read_doubles(std::ifstream& in, double* data, std::size_t n, const std::string& path) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw FormatError("checkpoint truncated: " + path);
}

}  // namespace

std::string config_fingerprint(const ModelConfig& model, const OptimConfig& optim,
                               const LossConfig& loss) {
    std::string canon;
    auto add = [&canon](const std::string& key, const std::string& value) {
        canon += key;
        canon += '=';
        canon += value;
        canon += ';';
    };
    auto num = [](double v) { return format_double(v); };
    add("input_dim", std::to_string(model.input_dim));
    std::string hidden;
    for (std::size_t h : model.hidden_dims) hidden += std::to_string(h) + ",";
    add("hidden_dims", hidden);
    add("output_dim", std::to_string(model.output_dim));
    add("dropout_p", num(model.dropout_p));
    add("init_seed", std::to_string(model.init_seed));
    add("lr0", num(optim.lr0));
    add("momentum", num(optim.momentum));
    add("weight_decay", num(optim.weight_decay));
    add("batch_size", std::to_string(optim.batch_size));
    add("epochs", std::to_string(optim.epochs));
    std::string drops;
    for (int e : optim.lr_drop_epochs) drops += std::to_string(e) + ",";
    add("lr_drop_epochs", drops);
    add("lr_drop_factor", num(optim.lr_drop_factor));
    std::string weights;
    for (double w : loss.weights) weights += num(w) + ",";
    add("au_weights", weights);
    add("label_smooth_eps", num(loss.label_smooth_eps));
    add("components", std::to_string(static_cast<int>(loss.components)));
    add("batch_reduction", std::to_string(static_cast<int>(loss.batch_reduction)));
    add("mll_sample_weight", num(loss.mll_sample_weight));

    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon)));
    return buf;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    const Model& m = ckpt.model;
    json header;
    header["epoch_completed"] = ckpt.epoch_completed;
    header["train_seed"] = ckpt.train_seed;
    header["config_fingerprint"] = ckpt.config_fingerprint;
    header["input_dim"] = m.cfg.input_dim;
    header["hidden_dims"] = m.cfg.hidden_dims;
    header["output_dim"] = m.cfg.output_dim;
    header["dropout_p"] = m.cfg.dropout_p;
    header["init_seed"] = m.cfg.init_seed;
    header["has_velocity"] = !ckpt.optim_state.velocity.empty();
    const std::string header_str = header.dump();

    std::string blob;
    blob += kCheckpointMagic;
    std::uint32_t len = static_cast<std::uint32_t>(header_str.size());
    char lenbuf[4];
    std::memcpy(lenbuf, &len, 4);
    blob.append(lenbuf, 4);
    blob += header_str;
    for (const Layer& layer : m.layers) {
        append_doubles(blob, layer.w.data.data(), layer.w.data.size());
        append_doubles(blob, layer.b.data(), layer.b.size());
    }
    for (const Layer& v : ckpt.optim_state.velocity) {
        append_doubles(blob, v.w.data.data(), v.w.data.size());
        append_doubles(blob, v.b.data(), v.b.size());
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    out.flush();
    if (!out) throw IoError("write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);

    constexpr std::size_t magic_len = sizeof(kCheckpointMagic) - 1;
    char magic[magic_len];
    in.read(magic, magic_len);
    if (!in || std::memcmp(magic, kCheckpointMagic, magic_len) != 0)
        throw FormatError("not a checkpoint file: " + path);

    char lenbuf[4];
    in.read(lenbuf, 4);
    if (!in) throw FormatError("checkpoint truncated: " + path);
    std::uint32_t len = 0;
    std::memcpy(&len, lenbuf, 4);
    std::string header_str(len, '\0');
    in.read(header_str.data(), len);
    if (!in) throw FormatError("checkpoint truncated: " + path);

    json header;
    try {
        header = json::parse(header_str);
    } catch (const json::exception& e) {
        throw FormatError("bad checkpoint header in " + path + ": " + e.what());
    }

    Checkpoint ckpt;
    try {
        ckpt.epoch_completed = header.at("epoch_completed").get<int>();
        ckpt.train_seed = header.at("train_seed").get<std::uint64_t>();
        ckpt.config_fingerprint = header.at("config_fingerprint").get<std::string>();
        ModelConfig cfg;
        cfg.input_dim = header.at("input_dim").get<std::size_t>();
        cfg.hidden_dims = header.at("hidden_dims").get<std::vector<std::size_t>>();
        cfg.output_dim = header.at("output_dim").get<std::size_t>();
        cfg.dropout_p = header.at("dropout_p").get<double>();
        cfg.init_seed = header.at("init_seed").get<std::uint64_t>();
        cfg.validate();

        ckpt.model.cfg = cfg;
        std::size_t in_dim = cfg.input_dim;
        std::vector<std::size_t> outs = cfg.hidden_dims;
        outs.push_back(cfg.output_dim);
        for (std::size_t out_dim : outs) {
            Layer layer;
            layer.w = Matrix(out_dim, in_dim);
            layer.b.assign(out_dim, 0.0);
            read_doubles(in, layer.w.data.data(), layer.w.data.size(), path);
            read_doubles(in, layer.b.data(), layer.b.size(), path);
            ckpt.model.layers.push_back(std::move(layer));
            in_dim = out_dim;
        }
        if (header.at("has_velocity").get<bool>()) {
            ckpt.optim_state = init_optim_state(ckpt.model);
            for (Layer& v : ckpt.optim_state.velocity) {
                read_doubles(in, v.w.data.data(), v.w.data.size(), path);
                read_doubles(in, v.b.data(), v.b.size(), path);
            }
        }
    } catch (const json::exception& e) {
        throw FormatError("bad checkpoint header in " + path + ": " + e.what());
    }
    return ckpt;
}

}  // namespace aupipe
