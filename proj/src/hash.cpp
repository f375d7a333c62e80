#include "veil/hash.hpp"

#include <openssl/sha.h>

#include <cstring>
#include <stdexcept>

#include "veil/errors.hpp"

namespace veil {

Digest256 sha256(std::span<const uint8_t> data) {
    Digest256 out;
    SHA256(data.data(), data.size(), out.data());
    return out;
}

Digest256 sha256(const std::string& data) {
    return sha256(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

std::string hex_encode(std::span<const uint8_t> data) {
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out.push_back(kHex[b >> 4]);
        out.push_back(kHex[b & 0x0f]);
    }
    return out;
}

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    throw InvalidSpec("invalid hex character");
}

}  // namespace

std::vector<uint8_t> hex_decode(const std::string& hex) {
    if (hex.size() % 2 != 0) throw InvalidSpec("odd-length hex string");
    std::vector<uint8_t> out(hex.size() / 2);
    for (size_t i = 0; i < out.size(); ++i) {
        out[i] = static_cast<uint8_t>((hex_nibble(hex[2 * i]) << 4) |
                                      hex_nibble(hex[2 * i + 1]));
    }
    return out;
}

HashFn lookup_hash(const std::string& identifier) {
    if (identifier == "sha256") {
        return static_cast<HashFn>(
            [](std::span<const uint8_t> d) { return sha256(d); });
    }
    throw InvalidSpec("unknown hash identifier: " + identifier);
}

}  // namespace veil
