#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kdc/isolation_kernel.hpp"
#include "kdc/kbcc.hpp"

namespace kdc {

/// Output of a step-2 clustering algorithm over the subset: cluster ids in
/// 1..k per subset position, 0 where a point was left unassigned (kernel
/// bounded cores do that; the centroid-style algorithms assign everything).
struct InitialClustering {
    std::vector<std::int32_t> assignment;
    std::int32_t k = 0;
};

/// Lloyd's algorithm with k-means++ seeding; runs until assignments stop
/// changing or max_iters passes. Empty clusters are re-seeded from the
/// point farthest from its current center. objective_trace, when given,
/// receives the within-cluster sum of squares after every pass.
InitialClustering kmeans(const PointMatrix& subset, std::int32_t k, std::int32_t max_iters,
                         const RngStream& rng, std::vector<double>* objective_trace = nullptr);

/// Kernel k-means under the isolation kernel, run as plain Lloyd's on the
/// explicit (finite, sparse) feature vectors Phi(x).
InitialClustering kernel_kmeans(const IsolationKernelModel& model, const PointMatrix& subset,
                                std::int32_t k, std::int32_t max_iters, const RngStream& rng,
                                std::vector<double>* objective_trace = nullptr);

/// Feature-space within-cluster sum of squares of an assignment; the
/// kernel k-means objective the Gram-matrix formulation also computes.
double kernel_kmeans_objective(const IsolationKernelModel& model, const PointMatrix& subset,
                               const InitialClustering& ic);

/// Density-peak clustering: Gaussian density rho with cutoff d_c at the
/// given percentile of pairwise distances, delta = distance to the nearest
/// higher-density point, centers = top-k by rho*delta, remaining points
/// inherit the label of their nearest higher-density neighbor in
/// descending-density order. Ties break on the lower point index.
InitialClustering density_peak(const PointMatrix& subset, std::int32_t k,
                               double d_c_percentile = 0.02);

/// Group subset points by cluster id and compute one mean map per group
/// (tau recorded as not-applicable). Throws when an id in 1..k is empty.
ClusterCores to_cluster_cores(const IsolationKernelModel& model, const PointMatrix& subset,
                              const InitialClustering& ic);

/// The reverse view of kernel-bounded cores as an InitialClustering over a
/// subset of the given size (non-core points stay unassigned).
InitialClustering cores_to_initial(const ClusterCores& cores, std::size_t subset_size);

}  // namespace kdc
