#include "kdc/kbcc.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <numeric>

namespace kdc {

std::uint32_t min_matches_above(double tau, std::uint32_t t) {
    if (tau < 0.0) return 0;
    if (tau >= 1.0) return t + 1;  // nothing qualifies
    auto above = [&](std::uint32_t m) {
        return static_cast<double>(m) / static_cast<double>(t) > tau;
    };
    // start from the obvious candidate and nudge across rounding slop
    std::uint32_t m = static_cast<std::uint32_t>(tau * t) ;
    while (m <= t && !above(m)) ++m;
    while (m > 0 && above(m - 1)) --m;
    return m;
}

namespace {

// Count equal 8-bit lanes between two packed rows using the zero-byte
// trick; both rows carry the same 0xFF padding so padding matches cancel.
inline std::uint32_t count_equal_bytes(const std::uint64_t* a, const std::uint64_t* b,
                                       std::size_t words) {
    std::uint32_t eq = 0;
    for (std::size_t w = 0; w < words; ++w) {
        const std::uint64_t x = a[w] ^ b[w];
        const std::uint64_t y = (x & 0x7F7F7F7F7F7F7F7FULL) + 0x7F7F7F7F7F7F7F7FULL;
        const std::uint64_t zero_mask = ~(y | x | 0x7F7F7F7F7F7F7F7FULL);
        eq += static_cast<std::uint32_t>(std::popcount(zero_mask));
    }
    return eq;
}

struct DisjointSet {
    std::vector<std::size_t> parent;
    std::vector<std::size_t> size;

    explicit DisjointSet(std::size_t n) : parent(n), size(n, 1) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size[a] < size[b]) std::swap(a, b);
        parent[b] = a;
        size[a] += size[b];
    }
};

}  // namespace

PairMatchCounts pairwise_match_counts(std::span<const std::uint16_t> cells, std::size_t n,
                                      std::uint32_t t) {
    PairMatchCounts pm;
    pm.n = n;
    pm.t = t;
    if (n < 2) return pm;
    pm.counts.resize(n * (n - 1) / 2);

    const bool byte_packable = [&] {
        for (const std::uint16_t c : cells)
            if (c > 0xFE) return false;
        return true;
    }();

    if (byte_packable) {
        // Pack each row into bytes padded with 0xFF to a word boundary;
        // every pair then sees the same number of spurious pad matches.
        const std::size_t words = (t + 7) / 8;
        const std::uint32_t pad = static_cast<std::uint32_t>(words * 8 - t);
        std::vector<std::uint64_t> packed(n * words, ~0ULL);
        for (std::size_t i = 0; i < n; ++i) {
            auto* bytes = reinterpret_cast<std::uint8_t*>(packed.data() + i * words);
            for (std::uint32_t p = 0; p < t; ++p)
                bytes[p] = static_cast<std::uint8_t>(cells[i * t + p]);
        }
        std::size_t out = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const std::uint64_t* ri = packed.data() + i * words;
            for (std::size_t j = i + 1; j < n; ++j) {
                const std::uint32_t eq = count_equal_bytes(ri, packed.data() + j * words, words);
                pm.counts[out++] = static_cast<std::uint16_t>(eq - pad);
            }
        }
    } else {
        std::size_t out = 0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const std::uint16_t* ri = cells.data() + i * t;
            for (std::size_t j = i + 1; j < n; ++j)
                pm.counts[out++] = static_cast<std::uint16_t>(match_count(ri, cells.data() + j * t, t));
        }
    }
    return pm;
}

std::vector<std::size_t> threshold_components(const PairMatchCounts& counts,
                                              std::uint32_t min_matches,
                                              std::size_t* component_count) {
    const std::size_t n = counts.n;
    DisjointSet dsu(n);
    if (min_matches == 0) {
        for (std::size_t i = 1; i < n; ++i) dsu.unite(0, i);
    } else {
        std::size_t at = 0;
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j, ++at)
                if (counts.counts[at] >= min_matches) dsu.unite(i, j);
    }
    std::vector<std::size_t> component(n);
    std::vector<std::size_t> remap(n, static_cast<std::size_t>(-1));
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = dsu.find(i);
        if (remap[root] == static_cast<std::size_t>(-1)) remap[root] = next++;
        component[i] = remap[root];
    }
    if (component_count) *component_count = next;
    return component;
}

namespace {

ClusterCores cores_from_components(const IsolationKernelModel& model,
                                   std::span<const std::uint16_t> cells, std::size_t n,
                                   const std::vector<std::size_t>& component,
                                   std::size_t component_count, std::size_t k, double tau) {
    if (component_count < k) throw InsufficientComponentsError(component_count, k);

    std::vector<std::vector<std::size_t>> groups(component_count);
    for (std::size_t i = 0; i < n; ++i) groups[component[i]].push_back(i);

    // order: size descending, then lowest member index (members are
    // already ascending because points are visited in index order)
    std::vector<std::size_t> order(component_count);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (groups[a].size() != groups[b].size()) return groups[a].size() > groups[b].size();
        return groups[a].front() < groups[b].front();
    });

    ClusterCores out;
    out.tau = tau;
    out.cores.reserve(k);
    out.mean_maps.reserve(k);
    for (std::size_t rank = 0; rank < k; ++rank) {
        out.cores.push_back(std::move(groups[order[rank]]));
        out.mean_maps.push_back(mean_map_from_cells(model, cells, n, out.cores.back()));
    }
    return out;
}

}  // namespace

ClusterCores kbcc_cluster_from_counts(const IsolationKernelModel& model,
                                      std::span<const std::uint16_t> cells,
                                      const PairMatchCounts& counts, std::size_t k, double tau) {
    if (counts.n < k) throw std::invalid_argument("kbcc: subset smaller than k");
    if (tau < 0.0 || tau >= 1.0) throw std::invalid_argument("kbcc: tau must lie in [0,1)");
    std::size_t component_count = 0;
    const auto component =
        threshold_components(counts, min_matches_above(tau, model.t), &component_count);
    return cores_from_components(model, cells, counts.n, component, component_count, k, tau);
}

ClusterCores kbcc_cluster(const IsolationKernelModel& model, const PointMatrix& subset,
                          std::size_t k, double tau) {
    const auto cells = embed_matrix(model, subset);
    const auto counts = pairwise_match_counts(cells, subset.rows, model.t);
    return kbcc_cluster_from_counts(model, cells, counts, k, tau);
}

std::vector<TauSweepEntry> tau_sweep(const IsolationKernelModel& model, const PointMatrix& subset,
                                     std::size_t k, const std::vector<double>& grid) {
    if (grid.empty()) throw std::invalid_argument("tau_sweep: empty grid");
    const auto cells = embed_matrix(model, subset);
    const auto counts = pairwise_match_counts(cells, subset.rows, model.t);

    std::vector<TauSweepEntry> out;
    out.reserve(grid.size());
    for (const double tau : grid) {
        TauSweepEntry entry;
        entry.tau = tau;
        std::size_t component_count = 0;
        const auto component =
            threshold_components(counts, min_matches_above(tau, model.t), &component_count);
        entry.component_count = component_count;
        if (component_count >= k && subset.rows >= k)
            entry.cores =
                cores_from_components(model, cells, subset.rows, component, component_count, k, tau);
        out.push_back(std::move(entry));
    }
    return out;
}

std::vector<double> default_tau_grid(std::uint32_t t) {
    std::vector<double> grid;
    grid.reserve(t > 0 ? t - 1 : 0);
    for (std::uint32_t j = 1; j < t; ++j)
        grid.push_back(static_cast<double>(j) / static_cast<double>(t));
    return grid;
}

double select_tau(const IsolationKernelModel& model, const PointMatrix& subset, std::size_t k) {
    if (subset.rows < k) throw std::invalid_argument("select_tau: subset smaller than k");
    const auto cells = embed_matrix(model, subset);
    const auto counts = pairwise_match_counts(cells, subset.rows, model.t);
    return select_tau_from_counts(counts, k, model.t);
}

double select_tau_from_counts(const PairMatchCounts& counts, std::size_t k, std::uint32_t t) {
    const std::size_t n = counts.n;
    if (n < k) throw std::invalid_argument("select_tau: subset smaller than k");

    // Bucket pair ids by match count, then sweep thresholds from tight to
    // loose with one growing disjoint-set. Components at min_matches=m are
    // a graph property, so this matches the per-tau recomputation exactly.
    std::vector<std::uint64_t> bucket_start(t + 2, 0);
    for (const std::uint16_t c : counts.counts)
        if (c > 0) ++bucket_start[c + 1];
    for (std::uint32_t m = 1; m <= t; ++m) bucket_start[m + 1] += bucket_start[m];
    std::vector<std::uint64_t> pairs_by_count(bucket_start[t + 1]);
    {
        std::vector<std::uint64_t> cursor(bucket_start.begin(), bucket_start.end());
        std::uint64_t at = 0;
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j, ++at) {
                const std::uint16_t c = counts.counts[at];
                if (c > 0) pairs_by_count[cursor[c]++] = (static_cast<std::uint64_t>(i) << 32) | j;
            }
    }

    DisjointSet dsu(n);
    std::size_t component_count = n;
    double best_tau = -1.0;
    std::size_t best_covered = 0;
    std::vector<std::size_t> root_sizes;
    // m = j+1 corresponds to tau = j/t in the default grid
    for (std::uint32_t m = t; m >= 2; --m) {
        for (std::uint64_t e = bucket_start[m]; e < bucket_start[m + 1]; ++e) {
            const std::size_t i = static_cast<std::size_t>(pairs_by_count[e] >> 32);
            const std::size_t j = static_cast<std::size_t>(pairs_by_count[e] & 0xFFFFFFFFULL);
            if (dsu.find(i) != dsu.find(j)) {
                dsu.unite(i, j);
                --component_count;
            }
        }
        if (component_count < k) continue;
        root_sizes.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (dsu.find(i) == i) root_sizes.push_back(dsu.size[i]);
        const std::size_t top = std::min(k, root_sizes.size());
        std::partial_sort(root_sizes.begin(), root_sizes.begin() + static_cast<std::ptrdiff_t>(top),
                          root_sizes.end(), std::greater<>());
        std::size_t covered = 0;
        for (std::size_t r = 0; r < top; ++r) covered += root_sizes[r];
        // >= so the loosest (smallest) tau achieving the best coverage wins
        if (covered >= best_covered) {
            best_covered = covered;
            best_tau = static_cast<double>(m - 1) / static_cast<double>(t);
        }
    }
    if (best_tau < 0.0) throw InsufficientComponentsError(component_count, k);
    return best_tau;
}

}  // namespace kdc
