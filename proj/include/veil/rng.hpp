#pragma once

#include <cstdint>
#include <vector>

namespace veil {

// splitmix64: expands a 64-bit seed into well-mixed words; used only to
// initialize Xoshiro256pp state.
class SplitMix64 {
  public:
    explicit SplitMix64(uint64_t seed) : x_(seed) {}

    uint64_t next() {
        x_ += 0x9e3779b97f4a7c15ull;
        uint64_t z = x_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

  private:
    uint64_t x_;
};

// xoshiro256++: the library's named portable PRNG. Seeds replay across
// platforms because every operation is exact 64-bit integer arithmetic;
// tests pin output vectors against an independent reference implementation.
class Xoshiro256pp {
  public:
    using result_type = uint64_t;

    explicit Xoshiro256pp(uint64_t seed) {
        SplitMix64 sm(seed);
        for (auto& w : s_) w = sm.next();
    }

    static constexpr uint64_t min() { return 0; }
    static constexpr uint64_t max() { return ~0ull; }

    uint64_t operator()() { return next(); }

    uint64_t next() {
        const uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform draw from [0, bound) by plain modulo. The tiny modulo bias is
    // irrelevant for shuffling/placement and keeps the recipe portable.
    uint64_t below(uint64_t bound) { return next() % bound; }

  private:
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
};

// Descending Fisher-Yates with j = next() % (i+1); pinned so that a stored
// seed replays the identical permutation anywhere.
template <typename T>
void fisher_yates(std::vector<T>& items, Xoshiro256pp& rng) {
    for (size_t i = items.size(); i > 1; --i) {
        size_t j = static_cast<size_t>(rng.below(i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace veil
