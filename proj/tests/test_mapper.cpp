// The key->buckets map is a public, replayable recipe; these vectors were
// frozen from an independent reference implementation before the C++ port
// was written. The chi-square checks guard the statistical property the
// whole scheme rests on: bucket choice is indistinguishable from uniform.
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "veil/errors.hpp"
#include "veil/hash.hpp"
#include "veil/mapper.hpp"

using namespace veil;

namespace {
MapConfig cfg(uint32_t n, uint32_t f, std::vector<uint8_t> salt = {}) {
    return MapConfig{n, f, "sha256", std::move(salt)};
}
}  // namespace

TEST_CASE("reference vectors, unsalted") {
    CHECK(map_key("apple", cfg(10, 3)) == std::vector<uint32_t>{8, 5, 9});
    CHECK(map_key("banana", cfg(10, 3)) == std::vector<uint32_t>{7, 2, 9});
    // f == n exercises the duplicate-retry path until all buckets appear.
    CHECK(map_key("apple", cfg(4, 4)) == std::vector<uint32_t>{2, 1, 0, 3});
}

TEST_CASE("reference vector, salted") {
    auto salt = hex_decode("00112233445566778899aabbccddeeff");
    CHECK(map_key("apple", cfg(10, 3, salt)) == std::vector<uint32_t>{4, 7, 6});
    // A salt changes the mapping entirely.
    CHECK(map_key("apple", cfg(10, 3, salt)) != map_key("apple", cfg(10, 3)));
}

TEST_CASE("ids are distinct, in range, and deterministic") {
    for (std::string key : {"a", "zz", "key000001", "\x01\xff binary \t ok"}) {
        auto ids = map_key(key, cfg(37, 5));
        CHECK(ids.size() == 5);
        CHECK(std::set<uint32_t>(ids.begin(), ids.end()).size() == 5);
        for (auto id : ids) CHECK(id < 37);
        CHECK(ids == map_key(key, cfg(37, 5)));
    }
}

TEST_CASE("fanout larger than bucket count is rejected") {
    CHECK_THROWS_AS(map_key("apple", cfg(3, 4)), FanoutExceedsBuckets);
    CHECK_NOTHROW(map_key("apple", cfg(4, 4)));
}

TEST_CASE("unknown hash identifier fails loudly") {
    CHECK_THROWS_AS(lookup_hash("md5"), InvalidSpec);
    CHECK(lookup_hash("sha256") != nullptr);
}

// First-position bucket counts against a uniform null hypothesis. The
// statistics are deterministic for the fixed key sets; critical values are
// chi-square upper alpha=0.001 quantiles.
TEST_CASE("first mapped id is uniform across buckets") {
    auto chi2 = [](uint32_t n, int keys, const std::string& prefix) {
        std::vector<uint64_t> counts(n, 0);
        for (int i = 0; i < keys; ++i) {
            counts[map_key(prefix + std::to_string(i), cfg(n, 3))[0]]++;
        }
        double e = static_cast<double>(keys) / n;
        double stat = 0;
        for (auto c : counts) stat += (c - e) * (c - e) / e;
        return stat;
    };
    CHECK(chi2(64, 6400, "k") < 103.44237731987324);  // df=63
    CHECK(chi2(10, 10000, "q") < 27.877164871256568);  // df=9
}

TEST_CASE("sha256 and hex helpers") {
    // NIST vector: sha256("abc")
    CHECK(hex_encode(sha256(std::string("abc"))) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(hex_decode("00ff10") == std::vector<uint8_t>{0x00, 0xff, 0x10});
    CHECK(hex_encode(hex_decode("deadbeef")) == "deadbeef");
    CHECK_THROWS_AS(hex_decode("abc"), InvalidSpec);   // odd length
    CHECK_THROWS_AS(hex_decode("zz"), InvalidSpec);    // bad digit
}
