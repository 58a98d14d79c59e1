#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "aupipe/types.hpp"

namespace aupipe {

// Training data organized by AU label: for every AU one bucket of sample
// indices where it is positive and one where it is negative (Invalid entries
// in neither). Empty buckets are reported as infeasible, not thrown.
struct BatchPlan {
    int batch_size = 0;
    std::array<std::vector<std::size_t>, 2 * kNumAus> buckets;  // [2k]=positive, [2k+1]=negative
    std::vector<std::pair<int, bool>> infeasible_buckets;       // (AU index, is_positive)
    std::size_t dataset_size = 0;

    const std::vector<std::size_t>& bucket(int au, bool positive) const {
        return buckets[static_cast<std::size_t>(2 * au + (positive ? 0 : 1))];
    }
};

// batch_size must be >= 24 so one slot per (AU, polarity) bucket fits.
BatchPlan build_batch_plan(const LabelledDataset& ds, int batch_size);

// Draws n_batches batches of exactly batch_size indices: the first slots take
// one uniform draw from every feasible bucket (so each batch carries at least
// one positive and one negative per coverable AU), the rest are uniform over
// the whole dataset. Within-batch duplicates are permitted; sampling is with
// replacement across batches and deterministic given seed.
std::vector<std::vector<std::size_t>> balanced_batches(const BatchPlan& plan, int n_batches,
                                                       std::uint64_t seed);

}  // namespace aupipe
