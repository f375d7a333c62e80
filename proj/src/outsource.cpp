#include "veil/outsource.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "veil/bucketizer.hpp"
#include "veil/rng.hpp"

namespace veil {

namespace {

using nlohmann::json;

// Independent deterministic RNG streams from one seed: stream 0 is the
// bucket-shuffle stream (used directly by build_buckets), higher streams
// seed the RID shuffle and fake-record padding.
uint64_t derive_seed(uint64_t seed, uint64_t stream) {
    SplitMix64 sm(seed);
    uint64_t out = 0;
    for (uint64_t i = 0; i <= stream; ++i) out = sm.next();
    return out;
}

void append_be32(Bytes& out, uint32_t v) {
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

void append_be64(Bytes& out, uint64_t v) {
    for (int i = 7; i >= 0; --i) out.push_back(static_cast<uint8_t>(v >> (8 * i)));
}

uint32_t read_be32(const Bytes& in, size_t& pos) {
    if (pos + 4 > in.size()) throw TruncatedFile("unexpected end of file");
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | in[pos++];
    return v;
}

uint64_t read_be64(const Bytes& in, size_t& pos) {
    if (pos + 8 > in.size()) throw TruncatedFile("unexpected end of file");
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | in[pos++];
    return v;
}

Bytes serialize_records(const OutsourcedBundle& bundle) {
    std::vector<RID> rids;
    rids.reserve(bundle.records.size());
    for (const auto& [rid, _] : bundle.records) rids.push_back(rid);
    std::sort(rids.begin(), rids.end());

    Bytes out;
    for (RID rid : rids) {
        const Bytes& ct = bundle.records.at(rid);
        append_be64(out, rid);
        append_be32(out, static_cast<uint32_t>(ct.size()));
        out.insert(out.end(), ct.begin(), ct.end());
    }
    return out;
}

Bytes serialize_index(const OutsourcedBundle& bundle) {
    Bytes out;
    for (uint32_t p = 0; p < bundle.index.size(); ++p) {
        append_be32(out, p);
        append_be32(out, static_cast<uint32_t>(bundle.index[p].size()));
        for (RID rid : bundle.index[p]) append_be64(out, rid);
    }
    return out;
}

json meta_to_json_without_digest(const BundleMeta& meta,
                                 const std::string& records_sha,
                                 const std::string& index_sha) {
    json j;
    j["format_version"] = meta.format_version;
    j["scheme"] = meta.scheme;
    j["n"] = meta.n;
    j["map_n"] = meta.map_n;
    j["f"] = meta.f;
    j["lb"] = meta.lb;
    j["d"] = meta.d;
    j["delta"] = meta.delta;
    if (meta.desired_overlap)
        j["desired_overlap"] = *meta.desired_overlap;
    else
        j["desired_overlap"] = nullptr;
    j["qa"] = meta.qa;
    j["sa"] = meta.sa;
    j["lmax"] = meta.lmax;
    j["dataset_size"] = meta.dataset_size;
    j["record_width"] = meta.record_width;
    j["hash"] = meta.hash;
    j["map_salt_hex"] = meta.map_salt_hex;
    j["records_sha256"] = records_sha;
    j["index_sha256"] = index_sha;
    return j;
}

std::string sha_hex(const Bytes& data) {
    auto d = sha256(std::span<const uint8_t>(data.data(), data.size()));
    return hex_encode(d);
}

Bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path.string());
    Bytes data((std::istreambuf_iterator<char>(in)),
               std::istreambuf_iterator<char>());
    return data;
}

void write_file(const std::filesystem::path& path, std::span<const uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write file: " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

void write_file(const std::filesystem::path& path, const std::string& data) {
    write_file(path, std::span<const uint8_t>(
                         reinterpret_cast<const uint8_t*>(data.data()),
                         data.size()));
}

}  // namespace

uint64_t OutsourcedBundle::index_entries() const {
    uint64_t total = 0;
    for (const auto& b : index) total += b.size();
    return total;
}

uint64_t OutsourcedBundle::duplicated_rid_entries() const {
    return index_entries() - records.size();
}

MapConfig ClientState::map_config() const {
    MapConfig cfg;
    cfg.n = n;
    cfg.f = f;
    cfg.hash = hash;
    cfg.salt = map_salt;
    return cfg;
}

std::pair<OutsourcedBundle, ClientState> encrypt_and_bundle(
    const BundlePlan& plan, const Dataset& dataset, const Params& params,
    const MapConfig& map_cfg, const Bytes& key) {
    if (key.size() != kKeyBytes) throw InvalidSpec("AES-128 key must be 16 bytes");
    if (map_cfg.n != plan.map_n)
        throw InvalidSpec("map configuration does not match plan");

    const uint32_t n = plan.layout.n;
    const uint32_t lb = plan.layout.lb;
    const uint64_t lmax = dataset.max_key_volume();

    // Shuffled RID sequence over the distinct slots.
    const uint64_t m = plan.distinct_slots();
    std::vector<RID> rid_seq(m);
    std::iota(rid_seq.begin(), rid_seq.end(), 0);
    Xoshiro256pp rid_rng(derive_seed(params.seed, 1));
    fisher_yates(rid_seq, rid_rng);

    Xoshiro256pp pad_rng(derive_seed(params.seed, 2));

    OutsourcedBundle bundle;
    bundle.index.resize(n);
    bundle.records.reserve(m);

    // Own slots (home then fakes) take the next RIDs; borrowed slots are
    // resolved afterwards against the lender's own-RID table.
    std::vector<std::vector<RID>> own_rids(n);
    uint64_t cursor = 0;
    for (uint32_t p = 0; p < n; ++p) {
        const auto& bucket = plan.buckets[p];
        own_rids[p].reserve(bucket.own_size());
        for (uint32_t idx : bucket.home) {
            RID rid = rid_seq[cursor++];
            own_rids[p].push_back(rid);
            bundle.records[rid] = aead_encrypt(
                key, encode_record(dataset.records[idx], params.record_width,
                                   pad_rng));
        }
        for (uint32_t fk = 0; fk < bucket.fakes; ++fk) {
            RID rid = rid_seq[cursor++];
            own_rids[p].push_back(rid);
            bundle.records[rid] =
                aead_encrypt(key, encode_fake(params.record_width, pad_rng));
        }
        bundle.index[p] = own_rids[p];
    }
    for (uint32_t p = 0; p < n; ++p) {
        for (const SlotRef& ref : plan.buckets[p].borrowed) {
            bundle.index[p].push_back(own_rids[ref.bucket].at(ref.slot));
        }
        if (bundle.index[p].size() != lb)
            throw Error("bucket " + std::to_string(p) +
                        " does not have lb slots after assembly");
    }

    BundleMeta& meta = bundle.meta;
    meta.scheme = plan.degree == 0 ? "disjoint"
                  : params.desired_overlap ? "fixed-overlap"
                                           : "overlap";
    meta.n = n;
    meta.map_n = plan.map_n;
    meta.f = params.fanout;
    meta.lb = lb;
    meta.d = plan.degree;
    meta.delta = plan.overlap;
    meta.desired_overlap = params.desired_overlap;
    meta.qa = params.qa;
    meta.sa = params.sa;
    meta.lmax = lmax;
    meta.dataset_size = dataset.size();
    meta.record_width = params.record_width;
    meta.hash = map_cfg.hash;
    meta.map_salt_hex = hex_encode(map_cfg.salt);

    ClientState client;
    client.key = key;
    client.f = params.fanout;
    client.n = plan.map_n;
    client.lb = lb;
    client.lmax = lmax;
    client.qa = params.qa;
    client.hash = map_cfg.hash;
    client.map_salt = map_cfg.salt;
    client.record_width = params.record_width;
    for (uint32_t idx : plan.stash)
        client.stash.entries.push_back(dataset.records[idx]);

    return {std::move(bundle), std::move(client)};
}

std::pair<OutsourcedBundle, ClientState> setup(const Dataset& dataset,
                                               const Params& params,
                                               std::vector<uint8_t> map_salt,
                                               Bytes key) {
    params.validate();
    if (dataset.empty()) throw EmptyDataset();
    const uint64_t lmax = dataset.max_key_volume();
    Layout layout = compute_layout(params, dataset.size(), lmax);
    MapConfig map_cfg = make_map_config(layout, params, std::move(map_salt));
    BucketSet bs = build_buckets(dataset, params, layout, map_cfg);
    BundlePlan plan = params.degree > 0 ? finalize_overlap(bs, params.degree)
                                        : pad_disjoint(bs);
    if (params.desired_overlap) apply_desired_overlap(plan, *params.desired_overlap);
    if (key.empty()) key = random_bytes(kKeyBytes);
    return encrypt_and_bundle(plan, dataset, params, map_cfg, key);
}

void store_bundle(const OutsourcedBundle& bundle, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    Bytes records = serialize_records(bundle);
    Bytes index = serialize_index(bundle);

    json j = meta_to_json_without_digest(bundle.meta, sha_hex(records),
                                         sha_hex(index));
    j["meta_digest"] = hex_encode(sha256(j.dump()));

    write_file(dir / "records.bin", records);
    write_file(dir / "index.bin", index);
    write_file(dir / "meta.json", j.dump(2) + "\n");
}

OutsourcedBundle load_bundle(const std::filesystem::path& dir) {
    Bytes meta_raw = read_file(dir / "meta.json");
    json j;
    try {
        j = json::parse(meta_raw.begin(), meta_raw.end());
    } catch (const json::exception& e) {
        throw ChecksumFailure(std::string("meta.json unparseable: ") + e.what());
    }

    OutsourcedBundle bundle;
    BundleMeta& meta = bundle.meta;
    std::string records_sha, index_sha, meta_digest;
    try {
        meta.format_version = j.at("format_version").get<uint32_t>();
        if (meta.format_version != 1)
            throw VersionMismatch("unsupported bundle format version " +
                                  std::to_string(meta.format_version));
        meta.scheme = j.at("scheme").get<std::string>();
        meta.n = j.at("n").get<uint32_t>();
        meta.map_n = j.at("map_n").get<uint32_t>();
        meta.f = j.at("f").get<uint32_t>();
        meta.lb = j.at("lb").get<uint32_t>();
        meta.d = j.at("d").get<uint32_t>();
        meta.delta = j.at("delta").get<uint32_t>();
        if (!j.at("desired_overlap").is_null())
            meta.desired_overlap = j.at("desired_overlap").get<uint32_t>();
        meta.qa = j.at("qa").get<double>();
        meta.sa = j.at("sa").get<double>();
        meta.lmax = j.at("lmax").get<uint64_t>();
        meta.dataset_size = j.at("dataset_size").get<uint64_t>();
        meta.record_width = j.at("record_width").get<uint32_t>();
        meta.hash = j.at("hash").get<std::string>();
        meta.map_salt_hex = j.at("map_salt_hex").get<std::string>();
        records_sha = j.at("records_sha256").get<std::string>();
        index_sha = j.at("index_sha256").get<std::string>();
        meta_digest = j.at("meta_digest").get<std::string>();
    } catch (const json::exception& e) {
        throw ChecksumFailure(std::string("meta.json malformed: ") + e.what());
    }

    json without = meta_to_json_without_digest(meta, records_sha, index_sha);
    if (hex_encode(sha256(without.dump())) != meta_digest)
        throw ChecksumFailure("meta.json digest mismatch");

    Bytes records_raw = read_file(dir / "records.bin");
    if (sha_hex(records_raw) != records_sha)
        throw ChecksumFailure("records.bin checksum mismatch");
    Bytes index_raw = read_file(dir / "index.bin");
    if (sha_hex(index_raw) != index_sha)
        throw ChecksumFailure("index.bin checksum mismatch");

    size_t pos = 0;
    while (pos < records_raw.size()) {
        RID rid = read_be64(records_raw, pos);
        uint32_t len = read_be32(records_raw, pos);
        if (pos + len > records_raw.size())
            throw TruncatedFile("records.bin ends mid-record");
        bundle.records[rid] =
            Bytes(records_raw.begin() + static_cast<long>(pos),
                  records_raw.begin() + static_cast<long>(pos + len));
        pos += len;
    }

    bundle.index.resize(meta.n);
    pos = 0;
    for (uint32_t expect = 0; expect < meta.n; ++expect) {
        uint32_t id = read_be32(index_raw, pos);
        uint32_t count = read_be32(index_raw, pos);
        if (id != expect || count != meta.lb)
            throw ChecksumFailure("index.bin bucket shape mismatch");
        bundle.index[id].reserve(count);
        for (uint32_t i = 0; i < count; ++i)
            bundle.index[id].push_back(read_be64(index_raw, pos));
    }
    if (pos != index_raw.size())
        throw ChecksumFailure("index.bin has trailing bytes");
    return bundle;
}

void store_client(const ClientState& client, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    json j;
    j["key_hex"] = hex_encode(client.key);
    j["f"] = client.f;
    j["n"] = client.n;
    j["lb"] = client.lb;
    j["lmax"] = client.lmax;
    j["qa"] = client.qa;
    j["hash"] = client.hash;
    j["map_salt_hex"] = hex_encode(client.map_salt);
    j["record_width"] = client.record_width;
    write_file(dir / "client.json", j.dump(2) + "\n");

    Dataset stash_ds;
    stash_ds.records = client.stash.entries;
    write_dataset_tsv(stash_ds, dir / "stash.tsv");
}

ClientState load_client(const std::filesystem::path& dir) {
    Bytes raw = read_file(dir / "client.json");
    json j;
    try {
        j = json::parse(raw.begin(), raw.end());
    } catch (const json::exception& e) {
        throw ChecksumFailure(std::string("client.json unparseable: ") + e.what());
    }
    ClientState client;
    try {
        client.key = hex_decode(j.at("key_hex").get<std::string>());
        client.f = j.at("f").get<uint32_t>();
        client.n = j.at("n").get<uint32_t>();
        client.lb = j.at("lb").get<uint32_t>();
        client.lmax = j.at("lmax").get<uint64_t>();
        client.qa = j.at("qa").get<double>();
        client.hash = j.at("hash").get<std::string>();
        client.map_salt = hex_decode(j.at("map_salt_hex").get<std::string>());
        client.record_width = j.at("record_width").get<uint32_t>();
    } catch (const json::exception& e) {
        throw ChecksumFailure(std::string("client.json malformed: ") + e.what());
    }
    client.stash.entries = read_dataset_tsv(dir / "stash.tsv").records;
    return client;
}

uint64_t serialized_server_bytes(const OutsourcedBundle& bundle) {
    Bytes records = serialize_records(bundle);
    Bytes index = serialize_index(bundle);
    json j = meta_to_json_without_digest(bundle.meta, sha_hex(records),
                                         sha_hex(index));
    j["meta_digest"] = hex_encode(sha256(j.dump()));
    return records.size() + index.size() + j.dump(2).size() + 1;
}

uint64_t serialized_client_bytes(const ClientState& client) {
    json j;
    j["key_hex"] = hex_encode(client.key);
    j["f"] = client.f;
    j["n"] = client.n;
    j["lb"] = client.lb;
    j["lmax"] = client.lmax;
    j["qa"] = client.qa;
    j["hash"] = client.hash;
    j["map_salt_hex"] = hex_encode(client.map_salt);
    j["record_width"] = client.record_width;
    uint64_t stash_bytes = 0;
    for (const auto& r : client.stash.entries)
        stash_bytes += r.key.size() + r.value.size() + 2;
    return j.dump(2).size() + 1 + stash_bytes;
}

}  // namespace veil
