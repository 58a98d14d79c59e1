#include "aupipe/report.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace aupipe {

namespace {

using nlohmann::json;

std::string fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

std::string irlbl_str(double v) {
    return std::isinf(v) ? "inf" : fixed(v, 4);
}

void append_row(std::string& out, const std::string& a, const std::string& b,
                const std::string& c, const std::string& d, const std::string& e) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-6s %8s %8s %10s %10s\n", a.c_str(), b.c_str(), c.c_str(),
                  d.c_str(), e.c_str());
    out += buf;
}

}  // namespace

std::string format_imbalance_table(const ImbalanceReport& report, std::size_t dataset_size) {
    std::string out;
    out += "samples: " + std::to_string(dataset_size) + "\n";
    append_row(out, "au", "pos", "neg", "pos_rate", "irlbl");
    for (int k = 0; k < kNumAus; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const double valid =
            static_cast<double>(report.pos_counts[ks] + report.neg_counts[ks]);
        const double rate =
            valid > 0.0 ? static_cast<double>(report.pos_counts[ks]) / valid : 0.0;
        append_row(out, kAuNames[ks], std::to_string(report.pos_counts[ks]),
                   std::to_string(report.neg_counts[ks]), fixed(rate, 4),
                   irlbl_str(report.irlbl[ks]));
    }
    out += "mean_ir: " + fixed(report.mean_ir, 4);
    if (report.has_infinite_irlbl()) out += "  (some AUs have no positives)";
    out += "\n";
    return out;
}

std::string imbalance_to_json(const ImbalanceReport& report, std::size_t dataset_size) {
    json root;
    root["samples"] = dataset_size;
    json per_au = json::array();
    for (int k = 0; k < kNumAus; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        json row;
        row["au"] = kAuNames[ks];
        row["pos"] = report.pos_counts[ks];
        row["neg"] = report.neg_counts[ks];
        if (std::isinf(report.irlbl[ks]))
            row["irlbl"] = "inf";
        else
            row["irlbl"] = report.irlbl[ks];
        per_au.push_back(row);
    }
    root["per_au"] = per_au;
    root["mean_ir"] = report.mean_ir;
    root["has_infinite_irlbl"] = report.has_infinite_irlbl();
    return root.dump(2) + "\n";
}

std::string format_f1_table(const F1Report& report) {
    std::string out;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%-6s %8s\n", "au", "f1");
    out += buf;
    for (int k = 0; k < kNumAus; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        std::snprintf(buf, sizeof(buf), "%-6s %8s%s\n", kAuNames[ks],
                      fixed(report.per_au_f1[ks], 4).c_str(),
                      report.degenerate[ks] ? "  (no positives on either side)" : "");
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%-6s %8s\n", "macro", fixed(report.macro_f1, 4).c_str());
    out += buf;
    return out;
}

std::string f1_to_json(const F1Report& report) {
    json root;
    json per_au = json::object();
    for (int k = 0; k < kNumAus; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        per_au[kAuNames[ks]] = report.per_au_f1[ks];
    }
    root["per_au_f1"] = per_au;
    root["macro_f1"] = report.macro_f1;
    json degenerate = json::array();
    for (int k = 0; k < kNumAus; ++k)
        if (report.degenerate[static_cast<std::size_t>(k)])
            degenerate.push_back(kAuNames[static_cast<std::size_t>(k)]);
    root["degenerate"] = degenerate;
    return root.dump(2) + "\n";
}

}  // namespace aupipe
