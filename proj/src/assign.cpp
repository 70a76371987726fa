#include "kdc/assign.hpp"

#include <limits>
#include <stdexcept>

namespace kdc {

AssignmentResult assign_distribution(const IsolationKernelModel& model,
                                     const std::vector<MeanMap>& mean_maps,
                                     const PointMatrix& points) {
    if (mean_maps.empty()) throw std::invalid_argument("assign_distribution: no mean maps");
    if (points.cols != model.dim)
        throw std::invalid_argument("assign_distribution: dimension mismatch");

    const std::size_t k = mean_maps.size();
    AssignmentResult out;
    out.labels.resize(points.rows);

    std::vector<std::uint16_t> cells(model.t);
    for (std::size_t i = 0; i < points.rows; ++i) {
        embed_point_into(model, points.row(i), cells.data());
        std::size_t best = 0;
        double best_sim = -1.0;
        for (std::size_t c = 0; c < k; ++c) {
            const double sim = similarity_from_cells(mean_maps[c], cells.data());
            if (sim > best_sim) {  // strict: ties keep the lowest label
                best_sim = sim;
                best = c;
            }
        }
        if (best_sim <= 0.0) ++out.zero_similarity_count;
        out.labels[i] = static_cast<std::int32_t>(best + 1);
    }
    out.op_count = static_cast<std::uint64_t>(points.rows) * k;
    return out;
}

AssignmentResult assign_center(const std::vector<std::vector<double>>& centroids,
                               std::size_t dim, const PointMatrix& points) {
    if (centroids.empty()) throw std::invalid_argument("assign_center: no centroids");
    if (points.cols != dim) throw std::invalid_argument("assign_center: dimension mismatch");

    AssignmentResult out;
    out.labels.resize(points.rows);
    for (std::size_t i = 0; i < points.rows; ++i) {
        const double* p = points.row(i);
        std::size_t best = 0;
        double best_sq = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            double sq = 0.0;
            for (std::size_t j = 0; j < dim; ++j) {
                const double diff = p[j] - centroids[c][j];
                sq += diff * diff;
            }
            if (sq < best_sq) {
                best_sq = sq;
                best = c;
            }
        }
        out.labels[i] = static_cast<std::int32_t>(best + 1);
    }
    out.op_count = static_cast<std::uint64_t>(points.rows) * centroids.size();
    return out;
}

std::vector<std::vector<double>> group_centroids(
    const PointMatrix& subset, const std::vector<std::vector<std::size_t>>& groups) {
    std::vector<std::vector<double>> centroids;
    centroids.reserve(groups.size());
    for (const auto& group : groups) {
        if (group.empty()) throw std::invalid_argument("group_centroids: empty group");
        std::vector<double> c(subset.cols, 0.0);
        for (const std::size_t idx : group) {
            const double* p = subset.row(idx);
            for (std::size_t j = 0; j < subset.cols; ++j) c[j] += p[j];
        }
        const double inv = 1.0 / static_cast<double>(group.size());
        for (double& v : c) v *= inv;
        centroids.push_back(std::move(c));
    }
    return centroids;
}

}  // namespace kdc
