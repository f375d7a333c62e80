#include "veil/bucketizer.hpp"

#include <cmath>
#include <numeric>

#include "veil/errors.hpp"
#include "veil/rng.hpp"

namespace veil {

Layout compute_layout(const Params& params, uint64_t dataset_size, uint64_t lmax) {
    params.validate();
    if (dataset_size == 0) throw EmptyDataset();
    if (lmax == 0 || lmax > dataset_size)
        throw InvalidSpec("lmax must be in [1, dataset size]");

    Layout layout;
    layout.lb = static_cast<uint32_t>(
        std::ceil(params.qa * static_cast<double>(lmax) / params.fanout));
    layout.n = static_cast<uint32_t>(
        std::ceil(params.sa * static_cast<double>(dataset_size) / layout.lb));
    if (params.fanout > layout.n)
        throw FanoutExceedsBuckets("fanout " + std::to_string(params.fanout) +
                                   " exceeds bucket count " +
                                   std::to_string(layout.n));
    return layout;
}

MapConfig make_map_config(const Layout& layout, const Params& params,
                          std::vector<uint8_t> salt) {
    MapConfig cfg;
    cfg.n = layout.n;
    cfg.f = params.fanout;
    cfg.salt = std::move(salt);
    return cfg;
}

BucketSet build_buckets(const Dataset& dataset, const Params& params,
                        const Layout& layout, const MapConfig& map_cfg) {
    if (dataset.empty()) throw EmptyDataset();
    if (map_cfg.n != layout.n || map_cfg.f != params.fanout)
        throw InvalidSpec("map configuration does not match layout");

    BucketSet bs;
    bs.layout = layout;
    bs.buckets.assign(layout.n, {});

    std::vector<uint32_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    Xoshiro256pp rng(params.seed);
    fisher_yates(order, rng);

    for (uint32_t idx : order) {
        const auto candidates = map_key(dataset.records[idx].key, map_cfg);
        int64_t best = -1;
        size_t best_fill = layout.lb;
        for (uint32_t b : candidates) {
            size_t fill = bs.buckets[b].size();
            if (fill < best_fill) {  // strict: earliest candidate wins ties
                best_fill = fill;
                best = b;
            }
        }
        if (best < 0) {
            bs.stash.push_back(idx);
        } else {
            bs.buckets[static_cast<size_t>(best)].push_back(idx);
        }
    }
    return bs;
}

}  // namespace veil
