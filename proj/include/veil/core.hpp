#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "veil/errors.hpp"

namespace veil {

enum class RecordKind : uint8_t { Real = 0, Fake = 1 };

// A key-value pair. Keys and values are opaque byte strings (stored as
// std::string for convenience); they must not contain TAB or newline so the
// TSV dataset format stays unambiguous.
struct Record {
    std::string key;
    std::string value;
    RecordKind kind = RecordKind::Real;

    bool operator==(const Record&) const = default;
};

struct Dataset {
    std::vector<Record> records;

    size_t size() const { return records.size(); }
    bool empty() const { return records.empty(); }

    // Size of the largest key group (L_max).
    uint64_t max_key_volume() const;
};

// Scheme-level tuning parameters.
//   qa ≥ 1: query amplification target; fetched volume per query ≈ qa·L_max.
//   sa ≥ 1: storage amplification target; server slots ≈ sa·|D|.
//   fanout: number of buckets each key spreads over (and each query fetches).
//   degree: neighbors per bucket in the overlap graph; 0 = disjoint padding.
//   desired_overlap: if set, fix the pairwise overlap to this value
//     (otherwise the data-dependent maximum is used).
//   seed: drives the shuffle, RID assignment, and fake padding bytes.
struct Params {
    double qa = 1.0;
    double sa = 1.0;
    uint32_t fanout = 1;
    uint32_t degree = 0;
    std::optional<uint32_t> desired_overlap;
    uint64_t seed = 0;
    uint32_t record_width = 64;

    void validate() const;
};

// Derived shape of the bucket store: n buckets of lb slots each.
struct Layout {
    uint32_t lb = 0;
    uint32_t n = 0;
};

// Client-side plaintext overflow store.
struct Stash {
    std::vector<Record> entries;

    size_t size() const { return entries.size(); }
};

struct Metrics {
    double qa_actual = 0;
    double sa_actual = 0;
    double sr = 0;
    double csa = 0;
    double ssa = 0;
    uint64_t dataset_records = 0;
    uint64_t stored_records = 0;
    uint64_t index_entries = 0;
    uint64_t stash_records = 0;
    uint32_t lb = 0;
    uint32_t n = 0;
    uint64_t lmax = 0;
};

// TSV dataset I/O: one record per line, `key<TAB>value`.
Dataset read_dataset_tsv(const std::filesystem::path& path);
void write_dataset_tsv(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace veil
