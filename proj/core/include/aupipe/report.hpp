#pragma once

#include <string>

#include "aupipe/imbalance.hpp"
#include "aupipe/metrics.hpp"

namespace aupipe {

// Human-readable aligned tables and machine-readable JSON for the two
// reports the CLI prints. Tables are stable: fixed column order, fixed
// float formatting, one row per AU plus a summary row.
std::string format_imbalance_table(const ImbalanceReport& report, std::size_t dataset_size);
std::string imbalance_to_json(const ImbalanceReport& report, std::size_t dataset_size);

std::string format_f1_table(const F1Report& report);
std::string f1_to_json(const F1Report& report);

}  // namespace aupipe
