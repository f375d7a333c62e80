#include "veil/engine.hpp"

#include <algorithm>
#include <mutex>
#include <unordered_set>

#include "veil/mapper.hpp"

namespace veil {

std::vector<std::pair<RID, Bytes>> fetch_buckets(
    const OutsourcedBundle& bundle, std::span<const uint32_t> bucket_ids) {
    std::vector<std::pair<RID, Bytes>> out;
    out.reserve(bucket_ids.size() * bundle.meta.lb);
    for (uint32_t id : bucket_ids) {
        if (id >= bundle.index.size())
            throw BucketIdOutOfRange("bucket id " + std::to_string(id) +
                                     " out of range [0, " +
                                     std::to_string(bundle.index.size()) + ")");
        for (RID rid : bundle.index[id]) {
            out.emplace_back(rid, bundle.records.at(rid));
        }
    }
    return out;
}

Engine::Engine(OutsourcedBundle bundle, ClientState client)
    : bundle_(std::move(bundle)), client_(std::move(client)) {
    for (const auto& bucket : bundle_.index) {
        for (RID rid : bucket) rid_buckets_[rid] += 1;
    }
}

std::vector<uint32_t> Engine::buckets_for(std::string_view key) const {
    return map_key(key, client_.map_config());
}

QueryResult Engine::query(std::string_view key) const {
    std::shared_lock lock(mu_);
    QueryResult result;
    result.touched_buckets = buckets_for(key);
    auto fetched = fetch_buckets(bundle_, result.touched_buckets);
    result.fetched_count = fetched.size();

    std::unordered_set<RID> seen;
    for (const auto& [rid, ct] : fetched) {
        if (!seen.insert(rid).second) continue;  // shared slot, count once
        Record rec = decode_record(aead_decrypt(client_.key, ct));
        if (rec.kind == RecordKind::Real && rec.key == key)
            result.records.push_back(std::move(rec));
    }
    for (const auto& rec : client_.stash.entries) {
        if (rec.key == key) result.records.push_back(rec);
    }
    return result;
}

void Engine::reencrypt_bucket(uint32_t bucket_id) {
    std::unordered_set<RID> done;
    for (RID rid : bundle_.index[bucket_id]) {
        if (!done.insert(rid).second) continue;
        Bytes plain = aead_decrypt(client_.key, bundle_.records.at(rid));
        bundle_.records[rid] = aead_encrypt(client_.key, plain);
    }
}

InsertOutcome Engine::insert(const std::string& key, const std::string& value) {
    std::unique_lock lock(mu_);
    const auto ids = buckets_for(key);

    // Current volume of the key (bucket hits deduplicated by RID + stash).
    uint64_t volume = 0;
    std::unordered_set<RID> seen;
    for (uint32_t id : ids) {
        for (RID rid : bundle_.index[id]) {
            if (!seen.insert(rid).second) continue;
            Record rec = decode_record(aead_decrypt(client_.key, bundle_.records.at(rid)));
            if (rec.kind == RecordKind::Real && rec.key == key) ++volume;
        }
    }
    for (const auto& rec : client_.stash.entries)
        if (rec.key == key) ++volume;

    Record fresh{key, value, RecordKind::Real};
    if (static_cast<double>(volume + 1) > client_.qa * static_cast<double>(client_.lmax)) {
        client_.stash.entries.push_back(std::move(fresh));
        return {InsertLocation::Stash, true};
    }

    Xoshiro256pp pad_rng(random_u64());
    for (uint32_t id : ids) {
        for (RID rid : bundle_.index[id]) {
            if (rid_buckets_.at(rid) != 1) continue;  // shared slot: not ours alone
            Record rec = decode_record(aead_decrypt(client_.key, bundle_.records.at(rid)));
            if (rec.kind != RecordKind::Fake) continue;
            bundle_.records[rid] = aead_encrypt(
                client_.key, encode_record(fresh, client_.record_width, pad_rng));
            reencrypt_bucket(id);
            return {InsertLocation::Bucket, false};
        }
    }
    client_.stash.entries.push_back(std::move(fresh));
    return {InsertLocation::Stash, false};
}

void Engine::remove(const std::string& key, const std::string& value) {
    std::unique_lock lock(mu_);
    const auto ids = buckets_for(key);

    std::unordered_set<RID> seen;
    for (uint32_t id : ids) {
        for (RID rid : bundle_.index[id]) {
            if (!seen.insert(rid).second) continue;
            Record rec = decode_record(aead_decrypt(client_.key, bundle_.records.at(rid)));
            if (rec.kind == RecordKind::Real && rec.key == key && rec.value == value) {
                Xoshiro256pp pad_rng(random_u64());
                bundle_.records[rid] =
                    aead_encrypt(client_.key, encode_fake(client_.record_width, pad_rng));
                // Re-encrypt every bucket holding this slot so the position
                // of the converted record is not revealed.
                for (uint32_t b = 0; b < bundle_.index.size(); ++b) {
                    if (std::find(bundle_.index[b].begin(), bundle_.index[b].end(),
                                  rid) != bundle_.index[b].end()) {
                        reencrypt_bucket(b);
                    }
                }
                return;
            }
        }
    }
    auto& stash = client_.stash.entries;
    auto it = std::find_if(stash.begin(), stash.end(), [&](const Record& r) {
        return r.key == key && r.value == value;
    });
    if (it != stash.end()) {
        stash.erase(it);
        return;
    }
    throw NotFound("no record (" + key + ", " + value + ") in buckets or stash");
}

}  // namespace veil
