#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace veil {

using Digest256 = std::array<uint8_t, 32>;

// One-shot SHA-256 of a byte span (OpenSSL-backed).
Digest256 sha256(std::span<const uint8_t> data);
Digest256 sha256(const std::string& data);

std::string hex_encode(std::span<const uint8_t> data);
std::vector<uint8_t> hex_decode(const std::string& hex);

// The key->bucket mapper is pluggable by hash identifier so that bundle
// metadata fully determines replay. Only "sha256" ships today; the registry
// exists so an unknown identifier fails loudly at load time instead of
// silently remapping keys.
using HashFn = Digest256 (*)(std::span<const uint8_t>);
HashFn lookup_hash(const std::string& identifier);

}  // namespace veil
