#pragma once
// Encrypted record store + per-bucket RID index, with versioned checksummed
// serialization (meta.json / records.bin / index.bin) and the client-side
// state (client.json / stash.tsv).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "veil/core.hpp"
#include "veil/crypto.hpp"
#include "veil/mapper.hpp"
#include "veil/overlap.hpp"

namespace veil {

using RID = uint64_t;

struct BundleMeta {
    uint32_t format_version = 1;
    std::string scheme;  // "disjoint" | "overlap" | "fixed-overlap"
    uint32_t n = 0;      // physical buckets in the index
    uint32_t map_n = 0;  // bucket count the mapper uses (n or n-1 after parity repair)
    uint32_t f = 0;
    uint32_t lb = 0;
    uint32_t d = 0;
    uint32_t delta = 0;  // achieved overlap (or the fixed desired overlap)
    std::optional<uint32_t> desired_overlap;
    double qa = 0.0;
    double sa = 0.0;
    uint64_t lmax = 0;
    uint64_t dataset_size = 0;
    uint32_t record_width = 0;
    std::string hash = "sha256";
    std::string map_salt_hex;
};

struct OutsourcedBundle {
    BundleMeta meta;
    std::unordered_map<RID, Bytes> records;  // RID -> ciphertext
    std::vector<std::vector<RID>> index;     // n buckets, lb RIDs each

    uint64_t index_entries() const;
    uint64_t duplicated_rid_entries() const;  // index entries - distinct RIDs
};

struct ClientState {
    Bytes key;  // AES-128 key
    uint32_t f = 0;
    uint32_t n = 0;  // mapper bucket count (meta.map_n)
    uint32_t lb = 0;
    uint64_t lmax = 0;
    double qa = 0.0;
    std::string hash = "sha256";
    std::vector<uint8_t> map_salt;
    uint32_t record_width = 0;
    Stash stash;

    MapConfig map_config() const;
};

// Encrypts a finalized plan: every distinct slot (home, fake, borrowed-once)
// becomes one ciphertext under a shuffled RID; borrowed slots reuse the
// lender's RID so shared records are stored once but indexed twice.
std::pair<OutsourcedBundle, ClientState> encrypt_and_bundle(
    const BundlePlan& plan, const Dataset& dataset, const Params& params,
    const MapConfig& map_cfg, const Bytes& key);

// One-call pipeline: layout, bucketize, pad (disjoint / overlap /
// fixed-overlap per params), encrypt. A fresh random key is drawn when
// `key` is empty.
std::pair<OutsourcedBundle, ClientState> setup(const Dataset& dataset,
                                               const Params& params,
                                               std::vector<uint8_t> map_salt = {},
                                               Bytes key = {});

// Serialization. store_bundle writes meta.json, records.bin, index.bin under
// dir; load_bundle verifies the format version, the meta digest, and both
// file checksums. Throws VersionMismatch / ChecksumFailure / TruncatedFile.
void store_bundle(const OutsourcedBundle& bundle, const std::filesystem::path& dir);
OutsourcedBundle load_bundle(const std::filesystem::path& dir);

// Client persistence: client.json (key material + query parameters) and
// stash.tsv (plaintext overflow records).
void store_client(const ClientState& client, const std::filesystem::path& dir);
ClientState load_client(const std::filesystem::path& dir);

// Exact serialized byte sizes (what store_bundle/store_client would write).
uint64_t serialized_server_bytes(const OutsourcedBundle& bundle);
uint64_t serialized_client_bytes(const ClientState& client);

}  // namespace veil
