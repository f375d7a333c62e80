#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "veil/hash.hpp"

namespace veil {

// Configuration of the public key->buckets function. An optional salt is
// prepended to the hash input; it defaults to empty (the plain recipe) and is
// recorded in bundle metadata when set, so any party holding the metadata can
// replay the mapping. Statistical harnesses draw a fresh salt per trial to
// model independently re-randomized setups.
struct MapConfig {
    uint32_t n = 0;
    uint32_t f = 0;
    std::string hash = "sha256";
    std::vector<uint8_t> salt;
};

// Returns the ordered list of f distinct bucket ids for `key`.
//
// id_gamma = first8_be(H(salt || key || 0x00 || be32(gamma))) mod n for
// gamma = 1..f; a duplicate id re-hashes with an appended be32(retry) counter
// (retry = 1, 2, ...) until a fresh id appears. Deterministic for fixed
// (key, config); throws FanoutExceedsBuckets when f > n.
std::vector<uint32_t> map_key(std::string_view key, const MapConfig& cfg);

}  // namespace veil
