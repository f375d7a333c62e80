#pragma once
// Metrics, leakage profile, the first-fit-decreasing inference-attack
// demonstration, and the permutation test for volume-hiding of the mapper.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "veil/core.hpp"
#include "veil/outsource.hpp"

namespace veil {

struct LeakageProfile {
    std::vector<std::vector<uint8_t>> qeq;  // t x t, 1 iff same key
    std::vector<uint64_t> rlen;             // per-query true response length
    uint64_t mrlen = 0;                     // max key volume in the dataset
    uint64_t dsize = 0;                     // total records
};

Metrics compute_metrics(const Dataset& dataset, const OutsourcedBundle& bundle,
                        const ClientState& client);

LeakageProfile leakage(const Dataset& dataset,
                       const std::vector<std::string>& query_keys);

// First-fit-decreasing packing of a key histogram into buckets of the given
// capacity: keys sorted by volume descending (ties lexicographic), each
// placed in the first bucket with room. Returns the keys per bucket.
std::vector<std::vector<std::string>> ffd_pack(const Dataset& dataset,
                                               uint64_t capacity);

struct AttackReport {
    std::vector<uint64_t> per_query_candidates;  // FFD candidate-set sizes
    double ffd_accuracy = 0.0;   // expected identification rate vs FFD buckets
    double veil_accuracy = 0.0;  // Monte Carlo rate vs randomized buckets
    double chance = 0.0;         // 1 / number of keys
    uint32_t veil_seeds = 0;
};

// Deterministic FFD layouts let an adversary who knows the histogram map an
// observed bucket fetch back to its resident keys; per-query accuracy is
// 1/|candidate set|. Against the randomized mapper the same adversary (who
// does not know the secret salt) gains nothing: each of `veil_seeds` fresh
// setups is queried once per key and the adversary's uniform guess is scored.
AttackReport ffd_attack_demo(const Dataset& dataset,
                             const std::vector<std::string>& queries,
                             uint32_t veil_seeds = 100,
                             uint64_t master_seed = 2026);

// Per-trial bucket assignment for a key: trial index -> the f bucket ids.
using AssignFn =
    std::function<std::vector<uint32_t>(uint64_t trial, std::string_view key)>;

// The randomized mapper with a fresh salt per trial.
AssignFn veil_assign(uint32_t n, uint32_t f, uint64_t seed);

// Two-sample permutation test: across `trials` independent assignments,
// compares the mean-bucket-id statistic of k1 and k2 against `permutations`
// random relabelings; returns p = (1 + #{|diff_perm| >= |diff_obs|}) /
// (permutations + 1). Large p (>= 0.01) means the observations do not
// distinguish the keys.
double vsr_permutation_test(const AssignFn& assign, std::string_view k1,
                            std::string_view k2, uint32_t trials,
                            uint64_t seed, uint32_t permutations = 999);

// Full JSON report ({metrics, leakage, attack, vsr}) as a serialized string;
// the attack section is included only when the dataset has at most 20 keys.
std::string analysis_report(const Dataset& dataset,
                            const OutsourcedBundle& bundle,
                            const ClientState& client,
                            const std::vector<std::string>& query_keys,
                            uint32_t vsr_trials = 1000, uint64_t seed = 2026);

}  // namespace veil
