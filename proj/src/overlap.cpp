#include "veil/overlap.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>

#include "veil/errors.hpp"

namespace veil {

uint32_t NeighborFunctions::neighbor(uint32_t p, uint32_t k) const {
    if (k == 0 || k > d) throw InvalidSpec("neighbor index out of range");
    int64_t v = (static_cast<int64_t>(p) + offsets[k - 1]) % static_cast<int64_t>(n);
    if (v < 0) v += n;
    return static_cast<uint32_t>(v);
}

std::vector<uint32_t> NeighborFunctions::neighbors(uint32_t p) const {
    std::vector<uint32_t> out(d);
    for (uint32_t k = 1; k <= d; ++k) out[k - 1] = neighbor(p, k);
    return out;
}

uint32_t NeighborFunctions::neighbor_index(uint32_t lender, uint32_t borrower) const {
    for (uint32_t k = 1; k <= d; ++k) {
        if (neighbor(lender, k) == borrower) return k;
    }
    throw InvalidSpec("buckets are not adjacent");
}

bool NeighborFunctions::adjacent(uint32_t p, uint32_t q) const {
    for (uint32_t k = 1; k <= d; ++k) {
        if (neighbor(p, k) == q) return true;
    }
    return false;
}

NeighborFunctions graph_create(uint32_t n, uint32_t d) {
    if (d == 0) throw InvalidSpec("graph degree must be >= 1");
    if (d >= n) throw InvalidSpec("graph degree must be < bucket count");
    if ((n % 2 != 0) && (d % 2 != 0))
        throw ParityError("no d-regular graph exists when n and d are both odd");

    NeighborFunctions g;
    g.n = n;
    g.d = d;
    g.offsets.reserve(d);
    for (uint32_t j = 1; j <= d / 2; ++j) {
        g.offsets.push_back(static_cast<int64_t>(j));
        g.offsets.push_back(-static_cast<int64_t>(j));
    }
    if (d % 2 != 0) g.offsets.push_back(static_cast<int64_t>(n / 2));
    return g;
}

uint32_t max_overlap(const std::vector<uint32_t>& sizes, uint32_t lb,
                     const NeighborFunctions& graph, OverlapBounds* bounds) {
    if (sizes.size() != graph.n) throw InvalidSpec("size list does not match graph");

    uint64_t full_bound = std::numeric_limits<uint64_t>::max();
    for (uint32_t p = 0; p < graph.n; ++p) {
        if (sizes[p] != lb) continue;
        uint32_t largest = 0;
        for (uint32_t q : graph.neighbors(p)) largest = std::max(largest, sizes[q]);
        full_bound = std::min<uint64_t>(full_bound, lb - largest);
    }

    uint64_t degree_bound = lb / graph.d;
    uint32_t smallest = *std::min_element(sizes.begin(), sizes.end());
    uint64_t smallest_bound = static_cast<uint64_t>(lb - smallest) / graph.d;

    if (bounds) *bounds = {full_bound, degree_bound, smallest_bound};
    return static_cast<uint32_t>(
        std::min({full_bound, degree_bound, smallest_bound}));
}

namespace {

// One deterministic direction-assignment attempt at a fixed delta. Returns
// false when some lend would overflow its receiver.
bool try_directions(const std::vector<uint32_t>& sizes, uint32_t lb,
                    const NeighborFunctions& g, uint32_t delta,
                    EdgeDirections& out) {
    const uint32_t n = g.n;
    out.edges.clear();
    out.in_degree.assign(n, 0);
    out.delta = delta;

    std::vector<uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](uint32_t a, uint32_t b) { return sizes[a] < sizes[b]; });

    std::vector<uint64_t> effective(sizes.begin(), sizes.end());
    std::map<std::pair<uint32_t, uint32_t>, bool> directed;  // undirected edge done

    for (uint32_t p : order) {
        auto nbs = g.neighbors(p);
        // Decreasing current effective size, ties by id.
        std::stable_sort(nbs.begin(), nbs.end(), [&](uint32_t a, uint32_t b) {
            if (effective[a] != effective[b]) return effective[a] > effective[b];
            return a < b;
        });
        for (uint32_t q : nbs) {
            auto key = std::minmax(p, q);
            if (directed[key]) continue;
            directed[key] = true;
            if (effective[p] + delta <= lb) {
                out.edges.push_back({q, p});  // p borrows from q
                effective[p] += delta;
                out.in_degree[p] += 1;
            } else {
                out.edges.push_back({p, q});  // p lends to q
                effective[q] += delta;
                out.in_degree[q] += 1;
                if (effective[q] > lb) return false;
            }
        }
    }
    return true;
}

}  // namespace

EdgeDirections edge_directions(const std::vector<uint32_t>& sizes, uint32_t lb,
                               const NeighborFunctions& graph,
                               uint32_t delta_max) {
    if (sizes.size() != graph.n) throw InvalidSpec("size list does not match graph");
    EdgeDirections dirs;
    for (uint32_t delta = delta_max;; --delta) {
        if (try_directions(sizes, lb, graph, delta, dirs)) return dirs;
        if (delta == 0) break;
    }
    // delta == 0 adds nothing anywhere, so the attempt above cannot fail.
    throw Error("direction assignment failed at delta 0");
}

std::vector<uint32_t> add_fakes(const std::vector<uint32_t>& sizes, uint32_t lb,
                                uint32_t delta,
                                const std::vector<uint32_t>& in_degree) {
    if (sizes.size() != in_degree.size())
        throw InvalidSpec("size and in-degree lists differ in length");
    std::vector<uint32_t> fakes(sizes.size());
    for (size_t p = 0; p < sizes.size(); ++p) {
        uint64_t used = sizes[p] + static_cast<uint64_t>(delta) * in_degree[p];
        if (used > lb)
            throw NegativeFakeCount("bucket " + std::to_string(p) +
                                    " exceeds capacity after borrowing");
        fakes[p] = static_cast<uint32_t>(lb - used);
    }
    return fakes;
}

std::vector<Label> create_labels(const NeighborFunctions& graph,
                                 const EdgeDirections& dirs, uint32_t delta,
                                 const std::vector<uint32_t>& own_sizes) {
    std::vector<Label> labels;
    if (delta == 0) return labels;
    labels.reserve(dirs.edges.size());
    for (const auto& e : dirs.edges) {
        uint32_t k = graph.neighbor_index(e.lender, e.borrower);
        uint64_t first = static_cast<uint64_t>(k - 1) * delta;  // 0-based
        if (first + delta > own_sizes[e.lender])
            throw LenderTooSmall("bucket " + std::to_string(e.lender) +
                                 " has " + std::to_string(own_sizes[e.lender]) +
                                 " own slots, label needs up to " +
                                 std::to_string(first + delta));
        Label lab;
        lab.lender = e.lender;
        lab.borrower = e.borrower;
        lab.slots.resize(delta);
        std::iota(lab.slots.begin(), lab.slots.end(), static_cast<uint32_t>(first));
        labels.push_back(std::move(lab));
    }
    return labels;
}

uint64_t BundlePlan::total_fakes() const {
    uint64_t total = 0;
    for (const auto& b : buckets) total += b.fakes;
    return total;
}

uint64_t BundlePlan::total_borrowed() const {
    uint64_t total = 0;
    for (const auto& b : buckets) total += b.borrowed.size();
    return total;
}

uint64_t BundlePlan::distinct_slots() const {
    return static_cast<uint64_t>(layout.n) * layout.lb - total_borrowed();
}

BundlePlan pad_disjoint(const BucketSet& bs) {
    BundlePlan plan;
    plan.layout = bs.layout;
    plan.map_n = bs.layout.n;
    plan.degree = 0;
    plan.overlap = 0;
    plan.buckets.resize(bs.buckets.size());
    for (size_t p = 0; p < bs.buckets.size(); ++p) {
        plan.buckets[p].home = bs.buckets[p];
        plan.buckets[p].fakes =
            bs.layout.lb - static_cast<uint32_t>(bs.buckets[p].size());
    }
    plan.stash = bs.stash;
    return plan;
}

// Label precondition: every range [(k-1)*delta, k*delta) must fit in the
// lender's own (home + fake) list of lb - delta*in_degree entries. A bucket
// that borrows heavily while lending at a high neighbor index can violate
// this even though the direction assignment itself is valid.
static bool labels_fit(const NeighborFunctions& graph,
                       const EdgeDirections& dirs, uint32_t delta,
                       const std::vector<uint32_t>& own_sizes) {
    if (delta == 0) return true;
    for (const auto& e : dirs.edges) {
        uint32_t k = graph.neighbor_index(e.lender, e.borrower);
        if (static_cast<uint64_t>(k) * delta > own_sizes[e.lender]) return false;
    }
    return true;
}

BundlePlan finalize_overlap(const BucketSet& bs, uint32_t d) {
    if (d == 0) return pad_disjoint(bs);

    const uint32_t lb = bs.layout.lb;
    std::vector<std::vector<uint32_t>> home = bs.buckets;
    uint32_t map_n = bs.layout.n;
    uint32_t n = map_n;
    if ((n % 2 != 0) && (d % 2 != 0)) {
        home.emplace_back();  // parity repair: one extra all-fake bucket
        n += 1;
    }

    std::vector<uint32_t> sizes(n);
    for (uint32_t p = 0; p < n; ++p) sizes[p] = static_cast<uint32_t>(home[p].size());

    auto graph = graph_create(n, d);
    uint32_t delta_try = max_overlap(sizes, lb, graph);
    EdgeDirections dirs;
    std::vector<uint32_t> fakes;
    std::vector<uint32_t> own_sizes(n);
    // Same reduction policy as the overflow restart inside edge_directions:
    // when the labels cannot fit, lower the overlap and redirect. delta = 0
    // always fits, so the loop terminates.
    for (;;) {
        dirs = edge_directions(sizes, lb, graph, delta_try);
        fakes = add_fakes(sizes, lb, dirs.delta, dirs.in_degree);
        for (uint32_t p = 0; p < n; ++p) own_sizes[p] = sizes[p] + fakes[p];
        if (labels_fit(graph, dirs, dirs.delta, own_sizes)) break;
        delta_try = dirs.delta - 1;
    }
    std::vector<Label> labels = create_labels(graph, dirs, dirs.delta, own_sizes);

    BundlePlan plan;
    plan.layout = {lb, n};
    plan.map_n = map_n;
    plan.degree = d;
    plan.overlap = dirs.delta;
    plan.stash = bs.stash;
    plan.buckets.resize(n);
    for (uint32_t p = 0; p < n; ++p) {
        plan.buckets[p].home = std::move(home[p]);
        plan.buckets[p].fakes = fakes[p];
    }
    for (const auto& lab : labels) {
        auto& borrowed = plan.buckets[lab.borrower].borrowed;
        for (uint32_t slot : lab.slots) borrowed.push_back({lab.lender, slot});
    }
    return plan;
}

void apply_desired_overlap(BundlePlan& plan, uint32_t desired) {
    if (plan.degree == 0)
        throw InvalidSpec("fixed overlap requires an overlap plan (degree >= 1)");
    const uint32_t lb = plan.layout.lb;
    const uint32_t d = plan.degree;
    if (static_cast<uint64_t>(desired) * d > lb)
        throw OverlapInfeasible("desired overlap " + std::to_string(desired) +
                                " needs " + std::to_string(uint64_t{desired} * d) +
                                " borrowed slots per bucket, capacity is " +
                                std::to_string(lb));
    if (desired == plan.overlap) return;

    auto graph = graph_create(plan.layout.n, d);

    // The direction assignment is a deterministic function of (home sizes,
    // lb, graph, delta), so re-running it at the achieved overlap recovers
    // exactly the directions the plan was built with.
    std::vector<uint32_t> sizes(plan.layout.n);
    for (uint32_t p = 0; p < plan.layout.n; ++p)
        sizes[p] = static_cast<uint32_t>(plan.buckets[p].home.size());
    EdgeDirections dirs = edge_directions(sizes, lb, graph, plan.overlap);
    if (dirs.delta != plan.overlap)
        throw Error("direction recovery disagrees with plan overlap");

    // Resize every bucket's own region to lb - desired * in_degree: convert
    // fakes into borrowed slots first, then spill home records to the stash.
    for (uint32_t p = 0; p < plan.layout.n; ++p) {
        auto& bucket = plan.buckets[p];
        uint64_t own_target =
            lb - static_cast<uint64_t>(desired) * dirs.in_degree[p];
        if (bucket.home.size() > own_target) {
            while (bucket.home.size() > own_target) {
                plan.stash.push_back(bucket.home.back());
                bucket.home.pop_back();
            }
            bucket.fakes = 0;
        } else {
            bucket.fakes = static_cast<uint32_t>(own_target - bucket.home.size());
        }
        bucket.borrowed.clear();
    }

    // Rebuild labels with the compact per-lender allocation: a lender's
    // borrowers, in neighbor-index order, take consecutive ranges of width
    // `desired` from the front of its own list.
    std::vector<std::vector<uint32_t>> borrowers(plan.layout.n);
    for (const auto& e : dirs.edges) borrowers[e.lender].push_back(e.borrower);
    for (uint32_t q = 0; q < plan.layout.n; ++q) {
        std::sort(borrowers[q].begin(), borrowers[q].end(),
                  [&](uint32_t a, uint32_t b) {
                      return graph.neighbor_index(q, a) < graph.neighbor_index(q, b);
                  });
        uint32_t cursor = 0;
        for (uint32_t p : borrowers[q]) {
            if (cursor + desired > plan.buckets[q].own_size())
                throw LenderTooSmall("bucket " + std::to_string(q) +
                                     " cannot lend " + std::to_string(desired) +
                                     " slots to each of its borrowers");
            for (uint32_t s = 0; s < desired; ++s)
                plan.buckets[p].borrowed.push_back({q, cursor + s});
            cursor += desired;
        }
    }
    plan.overlap = desired;
}

}  // namespace veil
