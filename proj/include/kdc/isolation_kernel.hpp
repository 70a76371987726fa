#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kdc/dataset.hpp"
#include "kdc/rng.hpp"

namespace kdc {

/// Isolation kernel model: t independent Voronoi partitionings, each made
/// of psi anchor points drawn from the fitting data. Two points are
/// similar in partitioning i when they share the nearest anchor; the
/// kernel value is the fraction of partitionings in which they do.
/// Immutable after fit; all queries are read-only.
struct IsolationKernelModel {
    std::uint32_t psi = 0;
    std::uint32_t t = 0;
    std::size_t dim = 0;
    std::vector<double> anchors;  // partitioning-major: t blocks of psi*dim

    const double* anchor(std::uint32_t partitioning, std::uint32_t cell) const {
        return anchors.data() + (static_cast<std::size_t>(partitioning) * psi + cell) * dim;
    }
    /// Feature-space dimensionality psi*t (the broadcast cost of the map).
    std::size_t feature_dim() const { return static_cast<std::size_t>(psi) * t; }
};

/// One point's sparse feature map: the index of the occupied cell in each
/// partitioning. The dense equivalent is a psi*t binary vector with
/// exactly t ones.
struct FeatureMap {
    std::vector<std::uint16_t> active_cells;  // length t, values in [0, psi)
};

/// Kernel mean embedding of a point set: the average of the dense feature
/// vectors of its members. Each psi-sized block sums to 1.
struct MeanMap {
    std::uint32_t psi = 0;
    std::uint32_t t = 0;
    std::vector<double> weights;  // length psi*t
    std::size_t support_size = 0;
};

/// Sample psi distinct points per partitioning, without replacement, t
/// times. Throws when the data holds fewer than psi distinct points.
IsolationKernelModel fit_isolation_kernel(const PointMatrix& points, std::uint32_t psi,
                                          std::uint32_t t, const RngStream& rng);

/// Nearest-anchor cell per partitioning; ties go to the lowest anchor index.
FeatureMap embed_point(const IsolationKernelModel& model, std::span<const double> x);

/// embed_point into a caller-provided row of t cells.
void embed_point_into(const IsolationKernelModel& model, const double* x, std::uint16_t* out);

/// Feature maps of every row, flattened n x t. Safe to call concurrently.
std::vector<std::uint16_t> embed_matrix(const IsolationKernelModel& model,
                                        const PointMatrix& points);

/// Number of partitionings in which the two cell rows agree.
std::uint32_t match_count(const std::uint16_t* a, const std::uint16_t* b, std::uint32_t t);

/// kappa(x,y): fraction of partitionings sharing a cell; in [0,1].
double kernel_value(const IsolationKernelModel& model, std::span<const double> x,
                    std::span<const double> y);

/// Mean map of a nonempty point set.
MeanMap mean_map(const IsolationKernelModel& model, const PointMatrix& points);
/// Mean map from pre-computed cell rows (n x t) restricted to `members`.
MeanMap mean_map_from_cells(const IsolationKernelModel& model,
                            std::span<const std::uint16_t> cells, std::size_t n,
                            std::span<const std::size_t> members);

/// <Phi(x), mean map>/t: similarity between a point and a set's
/// distribution; equals the average kernel value against the set.
/// Accumulates one weight per partitioning, then divides by t.
double point_set_similarity(const IsolationKernelModel& model, std::span<const double> x,
                            const MeanMap& mm);
double similarity_from_cells(const MeanMap& mm, const std::uint16_t* cells);

}  // namespace kdc
