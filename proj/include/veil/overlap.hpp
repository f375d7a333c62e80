#pragma once
// Overlapping-bucket padding: circulant d-regular neighbor structure, maximum
// feasible overlap, edge direction assignment, fake-count computation, shared
// slot labels, and the fixed-overlap variant.

#include <cstdint>
#include <optional>
#include <vector>

#include "veil/bucketizer.hpp"
#include "veil/core.hpp"

namespace veil {

// Circulant d-regular graph over n vertices. The d neighbor functions are
// ordered F_1..F_d as the interleaved offset family
//   <+1, -1, +2, -2, ..., +floor(d/2), -floor(d/2)[, +n/2 when d is odd]>,
// so neighbor index k of a vertex is well defined and adjacency is symmetric.
struct NeighborFunctions {
    uint32_t n = 0;
    uint32_t d = 0;
    std::vector<int64_t> offsets;  // size d, signed (the +n/2 rule stored as n/2)

    uint32_t neighbor(uint32_t p, uint32_t k) const;  // F_k(p), k in [1, d]
    std::vector<uint32_t> neighbors(uint32_t p) const;
    // k such that F_k(lender) == borrower; throws InvalidSpec if not adjacent.
    uint32_t neighbor_index(uint32_t lender, uint32_t borrower) const;
    bool adjacent(uint32_t p, uint32_t q) const;
};

// Builds the circulant graph. Requires 1 <= d < n; throws ParityError when n
// and d are both odd (no d-regular graph exists), InvalidSpec otherwise.
NeighborFunctions graph_create(uint32_t n, uint32_t d);

// The three bounds whose minimum is the maximum feasible overlap:
//   full_bucket:     min over full buckets p of (lb - largest neighbor size),
//                    UINT64_MAX when no bucket is full
//   degree:          floor(lb / d)
//   smallest_bucket: floor((lb - min size) / d)
struct OverlapBounds {
    uint64_t full_bucket = 0;
    uint64_t degree = 0;
    uint64_t smallest_bucket = 0;
};

uint32_t max_overlap(const std::vector<uint32_t>& sizes, uint32_t lb,
                     const NeighborFunctions& graph,
                     OverlapBounds* bounds = nullptr);

// One direction per undirected edge: borrower takes delta slots from lender.
struct DirectedEdge {
    uint32_t lender = 0;
    uint32_t borrower = 0;
};

struct EdgeDirections {
    std::vector<DirectedEdge> edges;  // exactly d*n/2 entries
    std::vector<uint32_t> in_degree;  // borrow count per bucket
    uint32_t delta = 0;               // final overlap after any reductions
};

// Directs every edge. Buckets are processed in increasing home-size order
// (ties by id); each bucket borrows from its yet-undirected neighbors in
// decreasing neighbor-size order (ties by id) while projected size + delta
// stays <= lb; otherwise it lends. If a lend would overflow the receiver,
// delta is decremented by 1 and the assignment restarts from scratch.
// delta == 0 yields a valid all-lend degenerate assignment.
EdgeDirections edge_directions(const std::vector<uint32_t>& sizes, uint32_t lb,
                               const NeighborFunctions& graph,
                               uint32_t delta_max);

// fakes_p = lb - home_p - delta * in_degree_p; throws NegativeFakeCount when
// the direction assignment violated its contract.
std::vector<uint32_t> add_fakes(const std::vector<uint32_t>& sizes, uint32_t lb,
                                uint32_t delta,
                                const std::vector<uint32_t>& in_degree);

// A label: the lender's slot range shared with one borrower. Slots index the
// lender's own ordered list (home records in placement order, then fakes),
// 0-based here; the borrower's bucket is completed by referencing them.
struct Label {
    uint32_t lender = 0;
    uint32_t borrower = 0;
    std::vector<uint32_t> slots;
};

// For each directed edge with borrower = F_k(lender), the label is the
// lender's slots [(k-1)*delta, k*delta) of its own list. Labels from one
// lender are pairwise disjoint. own_sizes are home+fake counts; throws
// LenderTooSmall when a range exceeds the lender's own list.
std::vector<Label> create_labels(const NeighborFunctions& graph,
                                 const EdgeDirections& dirs, uint32_t delta,
                                 const std::vector<uint32_t>& own_sizes);

// A fully padded plan ready for encryption. Every bucket's effective content
// is home records + fakes + borrowed slot references and has exactly lb slots.
struct SlotRef {
    uint32_t bucket = 0;  // lender
    uint32_t slot = 0;    // index into the lender's own list (home then fakes)
};

struct BucketPlan {
    std::vector<uint32_t> home;  // dataset record indices, placement order
    uint32_t fakes = 0;          // count of fake records appended after home
    std::vector<SlotRef> borrowed;

    uint32_t own_size() const {
        return static_cast<uint32_t>(home.size()) + fakes;
    }
};

struct BundlePlan {
    Layout layout;        // physical bucket count (may be map_n + 1, see below)
    uint32_t map_n = 0;   // bucket count the mapper uses
    uint32_t degree = 0;
    uint32_t overlap = 0;  // records shared by each pair of neighbors
    std::vector<BucketPlan> buckets;
    std::vector<uint32_t> stash;  // dataset record indices

    uint64_t total_fakes() const;
    uint64_t total_borrowed() const;
    uint64_t distinct_slots() const;  // n*lb - total_borrowed()
};

// Disjoint padding: every bucket filled to lb with fakes, no sharing.
BundlePlan pad_disjoint(const BucketSet& bs);

// Full overlap pipeline: parity repair (append one empty bucket when n and d
// are both odd), graph creation, max_overlap, edge_directions, add_fakes,
// create_labels, final assembly. d == 0 falls back to pad_disjoint.
BundlePlan finalize_overlap(const BucketSet& bs, uint32_t d);

// Fixed-overlap variant: rewrites the plan so every pair of neighbors shares
// exactly `desired` records, independent of the data. Borrowers first convert
// fakes into extra borrowed references; if still short, real records move
// from the tail of the borrower's home list to the stash. All labels are
// rebuilt with a compact per-lender allocation: the lender's borrowers in
// neighbor-index order get consecutive slot ranges of width `desired`.
// Throws OverlapInfeasible when desired * d > lb. No-op when desired equals
// the plan's achieved overlap.
void apply_desired_overlap(BundlePlan& plan, uint32_t desired);

}  // namespace veil
