#pragma once

#include <cstdint>
#include <vector>

#include "kdc/isolation_kernel.hpp"
#include "kdc/kbcc.hpp"

namespace kdc {

struct AssignmentResult {
    std::vector<std::int32_t> labels;        // values in 1..k
    std::size_t zero_similarity_count = 0;   // points sharing no cell with any core
    std::uint64_t op_count = 0;              // point-to-distribution evaluations
};

/// Distribution-based point assignment: each point gets the label of the
/// mean map it is most similar to. Ties, including the all-zero case, go
/// to the lowest label; all-zero points are counted for diagnostics.
AssignmentResult assign_distribution(const IsolationKernelModel& model,
                                     const std::vector<MeanMap>& mean_maps,
                                     const PointMatrix& points);

/// Center-based baseline: nearest Euclidean centroid of each core's
/// points; ties to the lowest label.
AssignmentResult assign_center(const std::vector<std::vector<double>>& centroids,
                               std::size_t dim, const PointMatrix& points);

/// Centroids of the listed groups of subset rows.
std::vector<std::vector<double>> group_centroids(const PointMatrix& subset,
                                                 const std::vector<std::vector<std::size_t>>& groups);

}  // namespace kdc
