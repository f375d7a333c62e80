#pragma once
// Authenticated encryption (AES-128-GCM) and the fixed-width record codec.
// Every stored plaintext is padded to the same width so ciphertext length
// reveals nothing; fakes are indistinguishable from real records.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "veil/core.hpp"
#include "veil/rng.hpp"

namespace veil {

using Bytes = std::vector<uint8_t>;

inline constexpr size_t kKeyBytes = 16;    // AES-128
inline constexpr size_t kNonceBytes = 12;  // GCM standard nonce
inline constexpr size_t kTagBytes = 16;

// Cryptographically random bytes (OS entropy).
Bytes random_bytes(size_t count);
uint64_t random_u64();

// ciphertext = nonce || body || tag; nonce drawn fresh from OS entropy.
Bytes aead_encrypt(std::span<const uint8_t> key, std::span<const uint8_t> plaintext);
// Throws DecryptionFailure on authentication failure or malformed input.
Bytes aead_decrypt(std::span<const uint8_t> key, std::span<const uint8_t> ciphertext);

// Fixed-width record layout (width bytes total):
//   real: [kind=0][klen u16 BE][vlen u16 BE][salt 4B][key][value][zero pad]
//   fake: [kind=1][random padding]
// The 4-byte salt (from `rng`) makes equal (key, value) plaintexts distinct.
// Throws RecordTooWide when 9 + klen + vlen > width.
Bytes encode_record(const Record& rec, uint32_t width, Xoshiro256pp& rng);
Bytes encode_fake(uint32_t width, Xoshiro256pp& rng);
Record decode_record(std::span<const uint8_t> plain);

// Ciphertext length for a given record width (nonce + width + tag).
constexpr size_t ciphertext_length(uint32_t width) {
    return kNonceBytes + width + kTagBytes;
}

}  // namespace veil
