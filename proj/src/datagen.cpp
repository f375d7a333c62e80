#include "veil/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "veil/errors.hpp"
#include "veil/rng.hpp"

namespace veil {

void SkewSpec::validate() const {
    if (num_keys == 0) throw InvalidSpec("need at least one key");
    if (num_keys > num_records)
        throw InvalidSpec("num_keys exceeds num_records");
    if (z < 0) throw InvalidSpec("skew exponent must be >= 0");
    if (value_width == 0) throw InvalidSpec("value width must be >= 1");
}

std::vector<uint64_t> zipf_counts(double z, uint64_t num_keys,
                                  uint64_t num_records) {
    if (num_keys == 0 || num_records < num_keys)
        throw InvalidSpec("need 1 <= num_keys <= num_records");
    const size_t k = static_cast<size_t>(num_keys);

    std::vector<double> weights(k);
    for (size_t i = 0; i < k; ++i)
        weights[i] = std::pow(static_cast<double>(i + 1), -z);
    const double total_w = std::accumulate(weights.begin(), weights.end(), 0.0);

    const double remaining = static_cast<double>(num_records - num_keys);
    std::vector<double> targets(k);
    std::vector<uint64_t> counts(k);
    uint64_t assigned = 0;
    for (size_t i = 0; i < k; ++i) {
        targets[i] = remaining * weights[i] / total_w;
        counts[i] = static_cast<uint64_t>(targets[i]);
        assigned += counts[i];
    }

    // Largest remainder: leftover units to the biggest fractional parts,
    // ties to the smaller rank.
    uint64_t leftover = (num_records - num_keys) - assigned;
    std::vector<size_t> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        double fa = targets[a] - static_cast<double>(counts[a]);
        double fb = targets[b] - static_cast<double>(counts[b]);
        if (fa != fb) return fa > fb;
        return a < b;
    });
    for (uint64_t u = 0; u < leftover; ++u) counts[order[u]] += 1;

    for (auto& c : counts) c += 1;  // the guaranteed record per key
    std::sort(counts.begin(), counts.end(), std::greater<>());
    return counts;
}

namespace {

std::string rank_key(uint64_t rank, int width) {
    std::string digits = std::to_string(rank);
    std::string out = "key";
    if (static_cast<int>(digits.size()) < width)
        out.append(static_cast<size_t>(width) - digits.size(), '0');
    out += digits;
    return out;
}

}  // namespace

Dataset generate(const SkewSpec& spec) {
    spec.validate();
    const auto counts = zipf_counts(spec.z, spec.num_keys, spec.num_records);
    const int width =
        std::max<int>(6, static_cast<int>(std::to_string(spec.num_keys).size()));

    Xoshiro256pp rng(spec.seed);
    Dataset ds;
    ds.records.reserve(spec.num_records);
    for (uint64_t rank = 1; rank <= spec.num_keys; ++rank) {
        const std::string key = rank_key(rank, width);
        for (uint64_t c = 0; c < counts[rank - 1]; ++c) {
            std::string value(spec.value_width, '\0');
            for (auto& ch : value)
                ch = static_cast<char>('!' + rng.below(94));  // printable, no TAB
            ds.records.push_back({key, std::move(value), RecordKind::Real});
        }
    }
    return ds;
}

}  // namespace veil
