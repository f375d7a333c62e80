#pragma once
// Skewed key-value dataset generation with a deterministic normalized-Zipf
// allocation: stable per-key counts for fixed (z, K, N), seeded random values.

#include <cstdint>
#include <vector>

#include "veil/core.hpp"

namespace veil {

struct SkewSpec {
    uint64_t num_keys = 0;     // K
    uint64_t num_records = 0;  // N, must be >= K
    double z = 0.0;            // skew exponent
    uint64_t seed = 0;
    uint32_t value_width = 8;  // bytes per value

    void validate() const;  // InvalidSpec when K == 0 or K > N
};

// Deterministic allocation of N records over K ranks with weight rank^-z:
// every rank gets 1, the remaining N-K go by largest remainder (leftover
// units to the largest fractional parts, ties to the smaller rank), and the
// result is sorted non-increasing. Sum is exactly N; min is >= 1.
std::vector<uint64_t> zipf_counts(double z, uint64_t num_keys, uint64_t num_records);

// Keys are zero-padded rank identifiers ("key000001" is the heaviest);
// values are seeded random printable bytes (TSV-safe).
Dataset generate(const SkewSpec& spec);

}  // namespace veil
