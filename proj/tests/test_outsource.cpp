// Record codec, AEAD, RID assignment, bundle assembly, and the versioned
// checksummed on-disk format. The six-bucket scenario pins the headline
// storage numbers: 120 index entries backed by 102 distinct ciphertexts.
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>

#include "veil/crypto.hpp"
#include "veil/errors.hpp"
#include "veil/outsource.hpp"

using namespace veil;
namespace fs = std::filesystem;

namespace {

Dataset distinct_records(uint32_t count) {
    Dataset d;
    for (uint32_t i = 0; i < count; ++i)
        d.records.push_back({"k" + std::to_string(i), "v" + std::to_string(i)});
    return d;
}

BucketSet synthetic(const std::vector<uint32_t>& sizes, uint32_t lb) {
    BucketSet bs;
    bs.layout.lb = lb;
    bs.layout.n = static_cast<uint32_t>(sizes.size());
    uint32_t next = 0;
    for (uint32_t s : sizes) {
        std::vector<uint32_t> b(s);
        std::iota(b.begin(), b.end(), next);
        next += s;
        bs.buckets.push_back(std::move(b));
    }
    return bs;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() / ("veil_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

void flip_byte(const fs::path& file, size_t offset) {
    std::fstream f(file, std::ios::in | std::ios::out | std::ios::binary);
    REQUIRE(f.good());
    f.seekg(static_cast<std::streamoff>(offset));
    char c = 0;
    f.get(c);
    f.seekp(static_cast<std::streamoff>(offset));
    f.put(static_cast<char>(c ^ 0x01));
}

}  // namespace

TEST_CASE("record codec round trip and width guard") {
    Xoshiro256pp rng(1);
    Record r{"hello", "world", RecordKind::Real};
    Bytes plain = encode_record(r, 64, rng);
    CHECK(plain.size() == 64);
    Record back = decode_record(plain);
    CHECK(back == r);

    // the 4-byte salt separates identical (key, value) pairs
    CHECK(encode_record(r, 64, rng) != encode_record(r, 64, rng));

    // empty value, exact fit: 9 + klen + vlen == width
    Record tight{std::string(27, 'K'), std::string(28, 'V'), RecordKind::Real};
    CHECK(decode_record(encode_record(tight, 64, rng)) == tight);
    Record wide{std::string(27, 'K'), std::string(29, 'V'), RecordKind::Real};
    CHECK_THROWS_AS(encode_record(wide, 64, rng), RecordTooWide);

    Bytes fake = encode_fake(64, rng);
    CHECK(fake.size() == 64);
    CHECK(decode_record(fake).kind == RecordKind::Fake);
}

TEST_CASE("AEAD: round trip, tamper detection, wrong key") {
    Bytes key = random_bytes(kKeyBytes);
    Bytes plain{1, 2, 3, 4, 5};
    Bytes ct = aead_encrypt(key, plain);
    CHECK(ct.size() == kNonceBytes + plain.size() + kTagBytes);
    CHECK(aead_decrypt(key, ct) == plain);

    Bytes tampered = ct;
    tampered[kNonceBytes] ^= 0x01;
    CHECK_THROWS_AS(aead_decrypt(key, tampered), DecryptionFailure);

    Bytes wrong_key = key;
    wrong_key[0] ^= 0x01;
    CHECK_THROWS_AS(aead_decrypt(wrong_key, ct), DecryptionFailure);

    Bytes short_ct(kNonceBytes + kTagBytes - 1, 0);
    CHECK_THROWS_AS(aead_decrypt(key, short_ct), DecryptionFailure);

    // same plaintext, fresh nonce: ciphertexts differ
    CHECK(aead_encrypt(key, plain) != ct);
}

TEST_CASE("six-bucket scenario: 120 index entries, 102 distinct ciphertexts") {
    Dataset d = distinct_records(88);
    BundlePlan plan = finalize_overlap(synthetic({20, 12, 20, 12, 12, 12}, 20), 3);
    Params p;
    p.fanout = 2;
    p.degree = 3;
    p.seed = 11;
    MapConfig cfg{6, 2, "sha256", {}};
    auto [bundle, client] = encrypt_and_bundle(plan, d, p, cfg, random_bytes(16));

    CHECK(bundle.index_entries() == 120);
    CHECK(bundle.records.size() == 102);
    CHECK(bundle.duplicated_rid_entries() == 18);
    CHECK(bundle.meta.scheme == "overlap");
    CHECK(bundle.meta.delta == 2);
    CHECK(bundle.meta.n == 6);
    CHECK(bundle.meta.map_n == 6);

    // RIDs are exactly the shuffled range 0..101
    std::set<RID> rids;
    for (const auto& [rid, ct] : bundle.records) {
        rids.insert(rid);
        CHECK(ct.size() == ciphertext_length(p.record_width));
    }
    CHECK(*rids.begin() == 0);
    CHECK(*rids.rbegin() == 101);
    CHECK(rids.size() == 102);

    // every bucket lists exactly lb RIDs, each resolvable
    for (const auto& bucket : bundle.index) {
        CHECK(bucket.size() == 20);
        for (RID rid : bucket) CHECK(bundle.records.contains(rid));
    }
}

TEST_CASE("disjoint setup: every slot is a distinct ciphertext") {
    Dataset d = distinct_records(40);
    Params p;
    p.qa = 1.0; p.sa = 1.2; p.fanout = 2; p.seed = 5;
    auto [bundle, client] = setup(d, p);
    CHECK(bundle.meta.scheme == "disjoint");
    CHECK(bundle.meta.delta == 0);
    CHECK(bundle.index_entries() ==
          static_cast<uint64_t>(bundle.meta.n) * bundle.meta.lb);
    CHECK(bundle.duplicated_rid_entries() == 0);
    CHECK(client.n == bundle.meta.map_n);
    CHECK(client.key.size() == kKeyBytes);
}

TEST_CASE("fixed-overlap setup records the desired overlap") {
    Dataset d;  // 12 keys with volume 5 each: lmax = 5, lb = 5
    for (uint32_t i = 0; i < 60; ++i)
        d.records.push_back({"k" + std::to_string(i % 12), "v" + std::to_string(i)});
    Params p;
    p.qa = 2.0; p.sa = 1.5; p.fanout = 2; p.degree = 2; p.seed = 5;
    p.desired_overlap = 1;
    auto [bundle, client] = setup(d, p);
    CHECK(bundle.meta.scheme == "fixed-overlap");
    CHECK(bundle.meta.d == 2);
    CHECK(bundle.meta.delta == 1);
    REQUIRE(bundle.meta.desired_overlap.has_value());
    CHECK(*bundle.meta.desired_overlap == 1);
}

TEST_CASE("setup is deterministic in (seed, salt, key)") {
    Dataset d = distinct_records(50);
    Params p;
    p.qa = 1.0; p.sa = 1.3; p.fanout = 3; p.degree = 2; p.seed = 9;
    Bytes key = hex_decode("000102030405060708090a0b0c0d0e0f");
    std::vector<uint8_t> salt = hex_decode("aabbcc");
    auto [b1, c1] = setup(d, p, salt, key);
    auto [b2, c2] = setup(d, p, salt, key);
    CHECK(b1.index == b2.index);
    CHECK(b1.meta.map_salt_hex == "aabbcc");
    // ciphertexts differ (fresh nonces) but decrypt to the same plaintexts
    for (const auto& [rid, ct] : b1.records) {
        REQUIRE(b2.records.contains(rid));
        CHECK(aead_decrypt(key, ct) == aead_decrypt(key, b2.records.at(rid)));
    }
}

TEST_CASE("bundle store/load round trip is byte identical") {
    Dataset d = distinct_records(30);
    Params p;
    p.qa = 1.0; p.sa = 1.2; p.fanout = 2; p.degree = 2; p.seed = 3;
    auto [bundle, client] = setup(d, p);

    TempDir dir("roundtrip");
    store_bundle(bundle, dir.path / "a");
    OutsourcedBundle loaded = load_bundle(dir.path / "a");
    CHECK(loaded.index == bundle.index);
    CHECK(loaded.records.size() == bundle.records.size());
    for (const auto& [rid, ct] : bundle.records)
        CHECK(loaded.records.at(rid) == ct);
    CHECK(loaded.meta.scheme == bundle.meta.scheme);
    CHECK(loaded.meta.delta == bundle.meta.delta);
    CHECK(loaded.meta.map_salt_hex == bundle.meta.map_salt_hex);

    store_bundle(loaded, dir.path / "b");
    for (const char* name : {"meta.json", "records.bin", "index.bin"}) {
        std::ifstream fa(dir.path / "a" / name, std::ios::binary);
        std::ifstream fb(dir.path / "b" / name, std::ios::binary);
        std::string sa((std::istreambuf_iterator<char>(fa)), {});
        std::string sb((std::istreambuf_iterator<char>(fb)), {});
        CHECK(sa == sb);
    }

    // serialized sizes match what was actually written
    uint64_t on_disk = 0;
    for (const char* name : {"meta.json", "records.bin", "index.bin"})
        on_disk += fs::file_size(dir.path / "a" / name);
    CHECK(serialized_server_bytes(bundle) == on_disk);
}

TEST_CASE("client store/load round trip, including the stash") {
    ClientState client;
    client.key = random_bytes(16);
    client.f = 3;
    client.n = 17;
    client.lb = 9;
    client.lmax = 5;
    client.qa = 1.5;
    client.map_salt = hex_decode("0badf00d");
    client.record_width = 64;
    client.stash.entries = {{"spill-a", "v1"}, {"spill-b", "v2"}};

    TempDir dir("client");
    store_client(client, dir.path);
    ClientState back = load_client(dir.path);
    CHECK(back.key == client.key);
    CHECK(back.f == client.f);
    CHECK(back.n == client.n);
    CHECK(back.lb == client.lb);
    CHECK(back.lmax == client.lmax);
    CHECK(back.qa == client.qa);
    CHECK(back.map_salt == client.map_salt);
    CHECK(back.record_width == client.record_width);
    CHECK(back.stash.entries == client.stash.entries);

    uint64_t on_disk =
        fs::file_size(dir.path / "client.json") + fs::file_size(dir.path / "stash.tsv");
    CHECK(serialized_client_bytes(client) == on_disk);
}

TEST_CASE("single-byte corruption is detected in every file") {
    Dataset d = distinct_records(25);
    Params p;
    p.qa = 1.0; p.sa = 1.2; p.fanout = 2; p.seed = 4;
    auto [bundle, client] = setup(d, p);

    TempDir dir("corrupt");
    for (const char* victim : {"records.bin", "index.bin"}) {
        fs::path bd = dir.path / victim;
        store_bundle(bundle, bd);
        flip_byte(bd / victim, fs::file_size(bd / victim) / 2);
        CHECK_THROWS_AS(load_bundle(bd), ChecksumFailure);
    }

    // tampering with a metadata field breaks the meta digest
    fs::path md = dir.path / "meta";
    store_bundle(bundle, md);
    {
        std::ifstream in(md / "meta.json");
        std::string text((std::istreambuf_iterator<char>(in)), {});
        auto pos = text.find("\"disjoint\"");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 10, "\"disjoinX\"");
        std::ofstream out(md / "meta.json", std::ios::trunc);
        out << text;
    }
    CHECK_THROWS_AS(load_bundle(md), ChecksumFailure);

    // unknown format version is its own failure mode
    fs::path vd = dir.path / "version";
    store_bundle(bundle, vd);
    {
        std::ifstream in(vd / "meta.json");
        std::string text((std::istreambuf_iterator<char>(in)), {});
        auto pos = text.find("\"format_version\": 1");
        REQUIRE(pos != std::string::npos);
        text.replace(pos, 19, "\"format_version\": 9");
        std::ofstream out(vd / "meta.json", std::ios::trunc);
        out << text;
    }
    CHECK_THROWS_AS(load_bundle(vd), VersionMismatch);

    // missing directory surfaces as an I/O error
    CHECK_THROWS_AS(load_bundle(dir.path / "nowhere"), IoError);
}

TEST_CASE("encrypt_and_bundle validates its inputs") {
    Dataset d = distinct_records(10);
    BucketSet bs = synthetic({5, 5}, 5);
    BundlePlan plan = pad_disjoint(bs);
    Params p;
    p.fanout = 1;
    MapConfig cfg{2, 1, "sha256", {}};
    CHECK_THROWS_AS(encrypt_and_bundle(plan, d, p, cfg, Bytes(8, 0)), InvalidSpec);
    MapConfig wrong{3, 1, "sha256", {}};
    CHECK_THROWS_AS(encrypt_and_bundle(plan, d, p, wrong, Bytes(16, 0)), InvalidSpec);
}

TEST_CASE("dataset TSV io") {
    TempDir dir("tsv");
    Dataset d;
    d.records = {{"alpha", "1"}, {"beta", ""}, {"alpha", "2"}};
    write_dataset_tsv(d, dir.path / "x.tsv");
    Dataset back = read_dataset_tsv(dir.path / "x.tsv");
    CHECK(back.records == d.records);
    CHECK(back.max_key_volume() == 2);
    CHECK_THROWS_AS(read_dataset_tsv(dir.path / "missing.tsv"), IoError);
}
