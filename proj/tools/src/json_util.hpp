#pragma once

#include <json.hpp>

#include "aupipe/metrics.hpp"

namespace aupipe::cli {

inline nlohmann::json f1_to_json_obj(const F1Report& rep) {
    nlohmann::json out;
    nlohmann::json per_au = nlohmann::json::object();
    for (int k = 0; k < kNumAus; ++k)
        per_au[kAuNames[static_cast<std::size_t>(k)]] = rep.per_au_f1[static_cast<std::size_t>(k)];
    out["per_au_f1"] = per_au;
    out["macro_f1"] = rep.macro_f1;
    return out;
}

}  // namespace aupipe::cli
