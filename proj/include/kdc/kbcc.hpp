#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "kdc/isolation_kernel.hpp"

namespace kdc {

/// The k largest kernel-bounded cluster cores of a subset: disjoint index
/// groups whose members are chained by pairwise kernel values above tau,
/// ordered by descending size, each with the mean map of its members.
struct ClusterCores {
    double tau = -1.0;  // -1 marks "not applicable" (plugin-converted cores)
    std::vector<std::vector<std::size_t>> cores;
    std::vector<MeanMap> mean_maps;

    std::size_t core_count() const { return cores.size(); }
};

/// Raised when the threshold graph has fewer connected components than
/// requested; carries the actual count so sweeps can react.
class InsufficientComponentsError : public std::runtime_error {
public:
    InsufficientComponentsError(std::size_t found, std::size_t requested)
        : std::runtime_error("kbcc: only " + std::to_string(found) +
                             " components at this tau, need k=" + std::to_string(requested)),
          component_count(found),
          requested_k(requested) {}

    std::size_t component_count;
    std::size_t requested_k;
};

/// Smallest integer m such that m/t > tau; kappa(x,y) > tau iff
/// match_count(x,y) >= this. Computed against the same double division
/// that kernel_value performs, so threshold semantics are exact.
std::uint32_t min_matches_above(double tau, std::uint32_t t);

/// Pairwise match counts over n embedded points, stored as the strict
/// upper triangle in row-major order (pair (i,j), i<j).
struct PairMatchCounts {
    std::size_t n = 0;
    std::uint32_t t = 0;
    std::vector<std::uint16_t> counts;

    std::uint16_t at(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        return counts[i * n - i * (i + 1) / 2 + (j - i - 1)];
    }
    std::uint64_t pair_count() const { return static_cast<std::uint64_t>(n) * (n - 1) / 2; }
};

/// All-pairs match counts from flattened cell rows (n x t).
PairMatchCounts pairwise_match_counts(std::span<const std::uint16_t> cells, std::size_t n,
                                      std::uint32_t t);

/// Connected components of the graph with an edge wherever the match count
/// reaches min_matches; returns per-point component ids in [0, count).
std::vector<std::size_t> threshold_components(const PairMatchCounts& counts,
                                              std::uint32_t min_matches,
                                              std::size_t* component_count);

/// k largest cores of B at threshold tau. Ties between equal-size
/// components go to the one with the lowest member index. Throws
/// InsufficientComponentsError when fewer than k components exist.
ClusterCores kbcc_cluster(const IsolationKernelModel& model, const PointMatrix& subset,
                          std::size_t k, double tau);

/// Same, from precomputed embeddings and pair counts (sweep fast path).
ClusterCores kbcc_cluster_from_counts(const IsolationKernelModel& model,
                                      std::span<const std::uint16_t> cells,
                                      const PairMatchCounts& counts, std::size_t k, double tau);

struct TauSweepEntry {
    double tau = 0.0;
    std::size_t component_count = 0;
    std::optional<ClusterCores> cores;  // empty when fewer than k components
};

/// kbcc_cluster at every grid value; per-tau failures are recorded, never
/// thrown. Pair counts are computed once and shared.
std::vector<TauSweepEntry> tau_sweep(const IsolationKernelModel& model, const PointMatrix& subset,
                                     std::size_t k, const std::vector<double>& grid);

/// The natural grid {j/t : j=1..t-1}; kappa is quantized at 1/t so finer
/// grids cannot change the outcome.
std::vector<double> default_tau_grid(std::uint32_t t);

/// Unsupervised default: the smallest tau whose component count reaches k
/// and whose k largest cores cover the largest fraction of B.
double select_tau(const IsolationKernelModel& model, const PointMatrix& subset, std::size_t k);

/// Same rule evaluated over precomputed pair counts.
double select_tau_from_counts(const PairMatchCounts& counts, std::size_t k, std::uint32_t t);

}  // namespace kdc
