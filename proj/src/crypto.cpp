#include "veil/crypto.hpp"

#include <openssl/evp.h>
#include <openssl/rand.h>

#include <cstring>
#include <memory>

#include "veil/errors.hpp"

namespace veil {

namespace {

struct CtxDeleter {
    void operator()(EVP_CIPHER_CTX* c) const { EVP_CIPHER_CTX_free(c); }
};
using CtxPtr = std::unique_ptr<EVP_CIPHER_CTX, CtxDeleter>;

void put_be16(uint8_t* p, uint16_t v) {
    p[0] = static_cast<uint8_t>(v >> 8);
    p[1] = static_cast<uint8_t>(v);
}

uint16_t get_be16(const uint8_t* p) {
    return static_cast<uint16_t>((p[0] << 8) | p[1]);
}

void fill_random(std::span<uint8_t> out, Xoshiro256pp& rng) {
    size_t i = 0;
    while (i < out.size()) {
        uint64_t w = rng.next();
        for (int b = 0; b < 8 && i < out.size(); ++b, ++i) {
            out[i] = static_cast<uint8_t>(w >> (8 * b));
        }
    }
}

}  // namespace

Bytes random_bytes(size_t count) {
    Bytes out(count);
    if (count > 0 && RAND_bytes(out.data(), static_cast<int>(count)) != 1)
        throw Error("system entropy source failed");
    return out;
}

uint64_t random_u64() {
    Bytes b = random_bytes(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | b[static_cast<size_t>(i)];
    return v;
}

Bytes aead_encrypt(std::span<const uint8_t> key, std::span<const uint8_t> plaintext) {
    if (key.size() != kKeyBytes) throw InvalidSpec("AES-128 key must be 16 bytes");
    Bytes out(kNonceBytes + plaintext.size() + kTagBytes);
    if (RAND_bytes(out.data(), kNonceBytes) != 1)
        throw Error("system entropy source failed");

    CtxPtr ctx(EVP_CIPHER_CTX_new());
    if (!ctx) throw Error("cipher context allocation failed");
    if (EVP_EncryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(),
                           out.data()) != 1)
        throw Error("cipher init failed");

    int len = 0;
    if (EVP_EncryptUpdate(ctx.get(), out.data() + kNonceBytes, &len,
                          plaintext.data(),
                          static_cast<int>(plaintext.size())) != 1)
        throw Error("encryption failed");
    int total = len;
    if (EVP_EncryptFinal_ex(ctx.get(), out.data() + kNonceBytes + total, &len) != 1)
        throw Error("encryption finalization failed");
    total += len;
    if (static_cast<size_t>(total) != plaintext.size())
        throw Error("unexpected ciphertext length");
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_GET_TAG, kTagBytes,
                            out.data() + kNonceBytes + plaintext.size()) != 1)
        throw Error("tag extraction failed");
    return out;
}

Bytes aead_decrypt(std::span<const uint8_t> key, std::span<const uint8_t> ciphertext) {
    if (key.size() != kKeyBytes) throw InvalidSpec("AES-128 key must be 16 bytes");
    if (ciphertext.size() < kNonceBytes + kTagBytes)
        throw DecryptionFailure("ciphertext shorter than nonce plus tag");
    const size_t body = ciphertext.size() - kNonceBytes - kTagBytes;

    CtxPtr ctx(EVP_CIPHER_CTX_new());
    if (!ctx) throw Error("cipher context allocation failed");
    if (EVP_DecryptInit_ex(ctx.get(), EVP_aes_128_gcm(), nullptr, key.data(),
                           ciphertext.data()) != 1)
        throw Error("cipher init failed");

    Bytes out(body);
    int len = 0;
    if (body > 0 &&
        EVP_DecryptUpdate(ctx.get(), out.data(), &len,
                          ciphertext.data() + kNonceBytes,
                          static_cast<int>(body)) != 1)
        throw DecryptionFailure("decryption failed");

    Bytes tag(ciphertext.end() - kTagBytes, ciphertext.end());
    if (EVP_CIPHER_CTX_ctrl(ctx.get(), EVP_CTRL_GCM_SET_TAG, kTagBytes,
                            tag.data()) != 1)
        throw Error("tag injection failed");
    int fin = 0;
    if (EVP_DecryptFinal_ex(ctx.get(), out.data() + len, &fin) != 1)
        throw DecryptionFailure("authentication tag mismatch");
    return out;
}

Bytes encode_record(const Record& rec, uint32_t width, Xoshiro256pp& rng) {
    if (rec.kind == RecordKind::Fake) return encode_fake(width, rng);
    const size_t need = 1 + 2 + 2 + 4 + rec.key.size() + rec.value.size();
    if (need > width)
        throw RecordTooWide("record needs " + std::to_string(need) +
                            " bytes, width is " + std::to_string(width));
    if (rec.key.size() > 0xffff || rec.value.size() > 0xffff)
        throw RecordTooWide("key or value exceeds 65535 bytes");

    Bytes out(width, 0);
    out[0] = static_cast<uint8_t>(RecordKind::Real);
    put_be16(&out[1], static_cast<uint16_t>(rec.key.size()));
    put_be16(&out[3], static_cast<uint16_t>(rec.value.size()));
    fill_random(std::span<uint8_t>(&out[5], 4), rng);
    std::memcpy(&out[9], rec.key.data(), rec.key.size());
    std::memcpy(&out[9 + rec.key.size()], rec.value.data(), rec.value.size());
    return out;
}

Bytes encode_fake(uint32_t width, Xoshiro256pp& rng) {
    Bytes out(width);
    fill_random(out, rng);
    out[0] = static_cast<uint8_t>(RecordKind::Fake);
    return out;
}

Record decode_record(std::span<const uint8_t> plain) {
    if (plain.empty()) throw Error("empty record plaintext");
    if (plain[0] == static_cast<uint8_t>(RecordKind::Fake))
        return Record{.key = {}, .value = {}, .kind = RecordKind::Fake};
    if (plain[0] != static_cast<uint8_t>(RecordKind::Real))
        throw Error("unknown record kind byte");
    if (plain.size() < 9) throw Error("record plaintext too short");
    const uint16_t klen = get_be16(&plain[1]);
    const uint16_t vlen = get_be16(&plain[3]);
    if (9u + klen + vlen > plain.size())
        throw Error("record lengths exceed plaintext width");
    Record rec;
    rec.kind = RecordKind::Real;
    rec.key.assign(reinterpret_cast<const char*>(&plain[9]), klen);
    rec.value.assign(reinterpret_cast<const char*>(&plain[9 + klen]), vlen);
    return rec;
}

}  // namespace veil
