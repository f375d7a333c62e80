#include "veil/mapper.hpp"

#include <algorithm>

#include "veil/errors.hpp"

namespace veil {

namespace {

void append_be32(std::vector<uint8_t>& buf, uint32_t v) {
    buf.push_back(static_cast<uint8_t>(v >> 24));
    buf.push_back(static_cast<uint8_t>(v >> 16));
    buf.push_back(static_cast<uint8_t>(v >> 8));
    buf.push_back(static_cast<uint8_t>(v));
}

uint64_t first8_be(const Digest256& d) {
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | d[i];
    return v;
}

}  // namespace

std::vector<uint32_t> map_key(std::string_view key, const MapConfig& cfg) {
    if (cfg.n == 0) throw InvalidSpec("mapper needs at least one bucket");
    if (cfg.f > cfg.n)
        throw FanoutExceedsBuckets("fanout " + std::to_string(cfg.f) +
                                   " exceeds bucket count " +
                                   std::to_string(cfg.n));
    HashFn hash = lookup_hash(cfg.hash);

    std::vector<uint8_t> base;
    base.reserve(cfg.salt.size() + key.size() + 5);
    base.insert(base.end(), cfg.salt.begin(), cfg.salt.end());
    base.insert(base.end(), key.begin(), key.end());
    base.push_back(0x00);

    std::vector<uint32_t> ids;
    ids.reserve(cfg.f);
    for (uint32_t gamma = 1; gamma <= cfg.f; ++gamma) {
        for (uint32_t retry = 0;; ++retry) {
            std::vector<uint8_t> msg = base;
            append_be32(msg, gamma);
            if (retry > 0) append_be32(msg, retry);
            uint32_t id = static_cast<uint32_t>(first8_be(hash(msg)) % cfg.n);
            if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
                ids.push_back(id);
                break;
            }
        }
    }
    return ids;
}

}  // namespace veil
