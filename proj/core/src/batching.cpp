#include "aupipe/batching.hpp"

#include <string>

#include "aupipe/rng.hpp"

namespace aupipe {

BatchPlan build_batch_plan(const LabelledDataset& ds, int batch_size) {
    if (batch_size < 2 * kNumAus)
        throw ConfigError("batch_size must be >= " + std::to_string(2 * kNumAus) + ", got " +
                          std::to_string(batch_size));
    if (ds.empty()) throw ValueError("build_batch_plan: dataset is empty");

    BatchPlan plan;
    plan.batch_size = batch_size;
    plan.dataset_size = ds.size();
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const auto& labels = ds.samples[i].labels;
        for (int k = 0; k < kNumAus; ++k) {
            if (labels[k] == AuLabel::Positive)
                plan.buckets[static_cast<std::size_t>(2 * k)].push_back(i);
            else if (labels[k] == AuLabel::Negative)
                plan.buckets[static_cast<std::size_t>(2 * k + 1)].push_back(i);
        }
    }
    for (int k = 0; k < kNumAus; ++k) {
        if (plan.bucket(k, true).empty()) plan.infeasible_buckets.emplace_back(k, true);
        if (plan.bucket(k, false).empty()) plan.infeasible_buckets.emplace_back(k, false);
    }
    return plan;
}

std::vector<std::vector<std::size_t>> balanced_batches(const BatchPlan& plan, int n_batches,
                                                       std::uint64_t seed) {
    if (n_batches < 1) throw ConfigError("n_batches must be >= 1");
    Rng rng(seed);
    std::vector<std::vector<std::size_t>> batches;
    batches.reserve(static_cast<std::size_t>(n_batches));
    for (int b = 0; b < n_batches; ++b) {
        std::vector<std::size_t> batch;
        batch.reserve(static_cast<std::size_t>(plan.batch_size));
        for (int k = 0; k < kNumAus; ++k) {
            for (bool positive : {true, false}) {
                const auto& bucket = plan.bucket(k, positive);
                if (!bucket.empty()) batch.push_back(bucket[rng.uniform_int(bucket.size())]);
            }
        }
        while (batch.size() < static_cast<std::size_t>(plan.batch_size))
            batch.push_back(rng.uniform_int(plan.dataset_size));
        batches.push_back(std::move(batch));
    }
    return batches;
}

}  // namespace aupipe
