#pragma once
// Query evaluation and dynamic updates over an outsourced bundle. Reads take
// a shared lock; insert/delete take an exclusive lock (single writer, many
// readers). Every query fetches exactly f buckets = f*lb ciphertexts,
// independent of the key.

#include <cstdint>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "veil/core.hpp"
#include "veil/outsource.hpp"

namespace veil {

struct QueryResult {
    std::vector<Record> records;       // Real records of the queried key
    uint64_t fetched_count = 0;        // always f*lb
    std::vector<uint32_t> touched_buckets;  // the f bucket ids, map order
};

enum class InsertLocation { Bucket, Stash };

struct InsertOutcome {
    InsertLocation location = InsertLocation::Bucket;
    bool capacity_warning = false;  // key volume now exceeds qa*lmax
};

// Server-side primitive: the ciphertexts referenced by each requested
// bucket, in index order (duplicate RIDs appear once per slot). Throws
// BucketIdOutOfRange.
std::vector<std::pair<RID, Bytes>> fetch_buckets(
    const OutsourcedBundle& bundle, std::span<const uint32_t> bucket_ids);

class Engine {
  public:
    Engine(OutsourcedBundle bundle, ClientState client);

    // map -> fetch f buckets -> decrypt -> drop fakes and other keys ->
    // dedup shared records by RID -> append stash matches.
    QueryResult query(std::string_view key) const;

    // Replaces the first fake slot owned by one of the key's f buckets
    // (a slot whose RID appears in exactly one bucket list), re-encrypting
    // the whole modified bucket under fresh nonces; falls back to the stash
    // when no fake is available or the key's volume limit is exceeded.
    InsertOutcome insert(const std::string& key, const std::string& value);

    // Converts the record's slot into a fresh fake (re-encrypting every
    // bucket that contains the slot), or removes it from the stash.
    // Throws NotFound.
    void remove(const std::string& key, const std::string& value);

    const OutsourcedBundle& bundle() const { return bundle_; }
    const ClientState& client() const { return client_; }

  private:
    std::vector<uint32_t> buckets_for(std::string_view key) const;
    void reencrypt_bucket(uint32_t bucket_id);

    mutable std::shared_mutex mu_;
    OutsourcedBundle bundle_;
    ClientState client_;
    std::unordered_map<RID, uint32_t> rid_buckets_;  // containment count per RID
};

}  // namespace veil
