#pragma once
// Randomized bucket creation: sizing (lb, n), greedy least-full placement of
// records into their mapped buckets, and stash overflow.

#include <cstdint>
#include <vector>

#include "veil/core.hpp"
#include "veil/mapper.hpp"

namespace veil {

// A bucketized dataset before padding: buckets hold indices into the source
// Dataset's record vector, in placement order; stash holds indices of records
// that fit in none of their mapped buckets.
struct BucketSet {
    Layout layout;
    std::vector<std::vector<uint32_t>> buckets;
    std::vector<uint32_t> stash;
};

// Bucket geometry:
//   lb = ceil(qa * lmax / fanout)
//   n  = ceil(sa * dataset_size / lb)
// Throws EmptyDataset when dataset_size == 0, InvalidSpec on bad params.
Layout compute_layout(const Params& params, uint64_t dataset_size, uint64_t lmax);

// Builds the map configuration used for a given layout (hash identifier is
// fixed to sha256 unless overridden; salt may be empty).
MapConfig make_map_config(const Layout& layout, const Params& params,
                          std::vector<uint8_t> salt = {});

// Shuffles the dataset (Fisher-Yates under xoshiro256++ seeded with
// params.seed) and places each record into the least-full of its fanout
// mapped buckets (ties broken by map order); records whose candidate buckets
// are all full go to the stash. Throws FanoutExceedsBuckets when
// fanout > layout.n.
BucketSet build_buckets(const Dataset& dataset, const Params& params,
                        const Layout& layout, const MapConfig& map_cfg);

}  // namespace veil
