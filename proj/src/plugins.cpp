#include "kdc/plugins.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace kdc {

namespace {

void check_subset_size(std::size_t n, std::int32_t k, const char* who) {
    if (k < 1) throw std::invalid_argument(std::string(who) + ": k must be >= 1");
    if (n < static_cast<std::size_t>(k))
        throw std::invalid_argument(std::string(who) + ": subset of " + std::to_string(n) +
                                    " points cannot form k=" + std::to_string(k) + " clusters");
}

double squared_distance(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        const double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc;
}

}  // namespace

InitialClustering kmeans(const PointMatrix& subset, std::int32_t k, std::int32_t max_iters,
                         const RngStream& rng, std::vector<double>* objective_trace) {
    const std::size_t n = subset.rows, d = subset.cols;
    check_subset_size(n, k, "kmeans");
    auto eng = rng.engine();

    // k-means++ seeding
    std::vector<double> centers(static_cast<std::size_t>(k) * d);
    std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());
    {
        const std::size_t first = static_cast<std::size_t>(uniform_below(eng, n));
        std::copy(subset.row(first), subset.row(first) + d, centers.begin());
        for (std::int32_t c = 1; c < k; ++c) {
            const double* prev = centers.data() + static_cast<std::size_t>(c - 1) * d;
            for (std::size_t i = 0; i < n; ++i)
                min_sq[i] = std::min(min_sq[i], squared_distance(subset.row(i), prev, d));
            const std::size_t pick = weighted_pick(eng, min_sq);
            std::copy(subset.row(pick), subset.row(pick) + d,
                      centers.begin() + static_cast<std::size_t>(c) * d);
        }
    }

    std::vector<std::int32_t> assign(n, -1);
    std::vector<double> sums(static_cast<std::size_t>(k) * d);
    std::vector<std::size_t> sizes(k);

    for (std::int32_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::int32_t best = 0;
            double best_sq = std::numeric_limits<double>::infinity();
            for (std::int32_t c = 0; c < k; ++c) {
                const double sq =
                    squared_distance(subset.row(i), centers.data() + static_cast<std::size_t>(c) * d, d);
                if (sq < best_sq) {
                    best_sq = sq;
                    best = c;
                }
            }
            objective += best_sq;
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (objective_trace) objective_trace->push_back(objective);
        if (!changed) break;

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            double* s = sums.data() + static_cast<std::size_t>(assign[i]) * d;
            const double* p = subset.row(i);
            for (std::size_t j = 0; j < d; ++j) s[j] += p[j];
            ++sizes[assign[i]];
        }
        std::vector<bool> reseeded(n, false);
        for (std::int32_t c = 0; c < k; ++c) {
            double* center = centers.data() + static_cast<std::size_t>(c) * d;
            if (sizes[c] > 0) {
                const double inv = 1.0 / static_cast<double>(sizes[c]);
                const double* s = sums.data() + static_cast<std::size_t>(c) * d;
                for (std::size_t j = 0; j < d; ++j) center[j] = s[j] * inv;
            } else {
                // re-seed from the point farthest from its own center
                std::size_t far = 0;
                double far_sq = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    if (reseeded[i]) continue;
                    const double sq = squared_distance(
                        subset.row(i), centers.data() + static_cast<std::size_t>(assign[i]) * d, d);
                    if (sq > far_sq) {
                        far_sq = sq;
                        far = i;
                    }
                }
                reseeded[far] = true;
                std::copy(subset.row(far), subset.row(far) + d, center);
            }
        }
    }

    InitialClustering ic;
    ic.k = k;
    ic.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) ic.assignment[i] = assign[i] + 1;
    return ic;
}

namespace {

// Dense centroid in IK feature space plus its squared norm.
struct FeatureCentroid {
    std::vector<double> weights;
    double sq_norm = 0.0;
};

double feature_dot(const FeatureCentroid& c, const std::uint16_t* cells, std::uint32_t t,
                   std::uint32_t psi) {
    double acc = 0.0;
    for (std::uint32_t p = 0; p < t; ++p)
        acc += c.weights[static_cast<std::size_t>(p) * psi + cells[p]];
    return acc;
}

void refresh_norm(FeatureCentroid& c) {
    double acc = 0.0;
    for (const double w : c.weights) acc += w * w;
    c.sq_norm = acc;
}

}  // namespace

InitialClustering kernel_kmeans(const IsolationKernelModel& model, const PointMatrix& subset,
                                std::int32_t k, std::int32_t max_iters, const RngStream& rng,
                                std::vector<double>* objective_trace) {
    const std::size_t n = subset.rows;
    check_subset_size(n, k, "kernel_kmeans");
    const std::uint32_t t = model.t, psi = model.psi;
    const double dt = static_cast<double>(t);
    const auto cells = embed_matrix(model, subset);
    auto row = [&](std::size_t i) { return cells.data() + i * t; };
    auto eng = rng.engine();

    // k-means++ in feature space; ||Phi(x)-Phi(y)||^2 = 2(t - matches)
    std::vector<std::size_t> seed_ids;
    {
        std::vector<double> min_sq(n, std::numeric_limits<double>::infinity());
        seed_ids.push_back(static_cast<std::size_t>(uniform_below(eng, n)));
        for (std::int32_t c = 1; c < k; ++c) {
            const std::uint16_t* prev = row(seed_ids.back());
            for (std::size_t i = 0; i < n; ++i) {
                const double sq = 2.0 * (dt - match_count(row(i), prev, t));
                min_sq[i] = std::min(min_sq[i], sq);
            }
            seed_ids.push_back(weighted_pick(eng, min_sq));
        }
    }

    std::vector<FeatureCentroid> centers(k);
    for (std::int32_t c = 0; c < k; ++c) {
        centers[c].weights.assign(model.feature_dim(), 0.0);
        const std::uint16_t* src = row(seed_ids[c]);
        for (std::uint32_t p = 0; p < t; ++p)
            centers[c].weights[static_cast<std::size_t>(p) * psi + src[p]] = 1.0;
        centers[c].sq_norm = dt;
    }

    std::vector<std::int32_t> assign(n, -1);
    std::vector<std::size_t> sizes(k);

    for (std::int32_t iter = 0; iter < max_iters; ++iter) {
        bool changed = false;
        double objective = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            std::int32_t best = 0;
            double best_sq = std::numeric_limits<double>::infinity();
            for (std::int32_t c = 0; c < k; ++c) {
                const double sq = dt - 2.0 * feature_dot(centers[c], row(i), t, psi) + centers[c].sq_norm;
                if (sq < best_sq) {
                    best_sq = sq;
                    best = c;
                }
            }
            objective += best_sq;
            if (assign[i] != best) {
                assign[i] = best;
                changed = true;
            }
        }
        if (objective_trace) objective_trace->push_back(objective);
        if (!changed) break;

        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::int32_t c = 0; c < k; ++c)
            std::fill(centers[c].weights.begin(), centers[c].weights.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            auto& c = centers[assign[i]];
            const std::uint16_t* src = row(i);
            for (std::uint32_t p = 0; p < t; ++p)
                c.weights[static_cast<std::size_t>(p) * psi + src[p]] += 1.0;
            ++sizes[assign[i]];
        }
        std::vector<bool> reseeded(n, false);
        for (std::int32_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) {
                const double inv = 1.0 / static_cast<double>(sizes[c]);
                for (double& w : centers[c].weights) w *= inv;
                refresh_norm(centers[c]);
            }
        }
        for (std::int32_t c = 0; c < k; ++c) {
            if (sizes[c] > 0) continue;
            std::size_t far = 0;
            double far_sq = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (reseeded[i]) continue;
                const auto& own = centers[assign[i]];
                const double sq = dt - 2.0 * feature_dot(own, row(i), t, psi) + own.sq_norm;
                if (sq > far_sq) {
                    far_sq = sq;
                    far = i;
                }
            }
            reseeded[far] = true;
            std::fill(centers[c].weights.begin(), centers[c].weights.end(), 0.0);
            const std::uint16_t* src = row(far);
            for (std::uint32_t p = 0; p < t; ++p)
                centers[c].weights[static_cast<std::size_t>(p) * psi + src[p]] = 1.0;
            centers[c].sq_norm = dt;
        }
    }

    InitialClustering ic;
    ic.k = k;
    ic.assignment.resize(n);
    for (std::size_t i = 0; i < n; ++i) ic.assignment[i] = assign[i] + 1;
    return ic;
}

double kernel_kmeans_objective(const IsolationKernelModel& model, const PointMatrix& subset,
                               const InitialClustering& ic) {
    const std::uint32_t t = model.t, psi = model.psi;
    const auto cells = embed_matrix(model, subset);
    std::vector<FeatureCentroid> centroids(ic.k);
    std::vector<std::size_t> sizes(ic.k, 0);
    for (auto& c : centroids) c.weights.assign(model.feature_dim(), 0.0);
    for (std::size_t i = 0; i < subset.rows; ++i) {
        const std::int32_t id = ic.assignment[i];
        if (id == 0) continue;
        auto& c = centroids[id - 1];
        const std::uint16_t* src = cells.data() + i * t;
        for (std::uint32_t p = 0; p < t; ++p)
            c.weights[static_cast<std::size_t>(p) * psi + src[p]] += 1.0;
        ++sizes[id - 1];
    }
    for (std::int32_t c = 0; c < ic.k; ++c) {
        if (sizes[c] == 0) continue;
        const double inv = 1.0 / static_cast<double>(sizes[c]);
        for (double& w : centroids[c].weights) w *= inv;
        refresh_norm(centroids[c]);
    }
    double objective = 0.0;
    for (std::size_t i = 0; i < subset.rows; ++i) {
        const std::int32_t id = ic.assignment[i];
        if (id == 0) continue;
        const auto& c = centroids[id - 1];
        objective += static_cast<double>(t) -
                     2.0 * feature_dot(c, cells.data() + i * t, t, psi) + c.sq_norm;
    }
    return objective;
}

InitialClustering density_peak(const PointMatrix& subset, std::int32_t k, double d_c_percentile) {
    const std::size_t n = subset.rows, d = subset.cols;
    check_subset_size(n, k, "density_peak");
    if (d_c_percentile <= 0.0 || d_c_percentile >= 1.0)
        throw std::invalid_argument("density_peak: percentile must lie in (0,1)");

    if (n == 1) {
        InitialClustering ic;
        ic.k = 1;
        ic.assignment = {1};
        return ic;
    }

    // cutoff distance: percentile of all pairwise distances
    double d_c = 0.0;
    {
        std::vector<float> dists;
        dists.reserve(n * (n - 1) / 2);
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                dists.push_back(static_cast<float>(
                    std::sqrt(squared_distance(subset.row(i), subset.row(j), d))));
        const std::size_t idx = std::min(
            dists.size() - 1,
            static_cast<std::size_t>(d_c_percentile * static_cast<double>(dists.size())));
        std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(idx), dists.end());
        d_c = dists[idx];
    }

    std::vector<double> rho(n, 0.0);
    if (d_c > 0.0) {
        const double inv_dc2 = 1.0 / (d_c * d_c);
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double sq = squared_distance(subset.row(i), subset.row(j), d);
                const double w = std::exp(-sq * inv_dc2);
                rho[i] += w;
                rho[j] += w;
            }
    } else {
        // degenerate spread: count exact duplicates
        for (std::size_t i = 0; i + 1 < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (squared_distance(subset.row(i), subset.row(j), d) == 0.0) {
                    rho[i] += 1.0;
                    rho[j] += 1.0;
                }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (rho[a] != rho[b]) return rho[a] > rho[b];
        return a < b;
    });

    std::vector<double> delta(n, 0.0);
    std::vector<std::size_t> parent(n);
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t i = order[p];
        parent[i] = i;
        if (p == 0) {
            double far = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                far = std::max(far, squared_distance(subset.row(i), subset.row(j), d));
            delta[i] = std::sqrt(far);
            continue;
        }
        double best_sq = std::numeric_limits<double>::infinity();
        std::size_t best = i;
        for (std::size_t q = 0; q < p; ++q) {
            const std::size_t j = order[q];
            const double sq = squared_distance(subset.row(i), subset.row(j), d);
            if (sq < best_sq || (sq == best_sq && j < best)) {
                best_sq = sq;
                best = j;
            }
        }
        delta[i] = std::sqrt(best_sq);
        parent[i] = best;
    }

    // centers: largest gamma = rho * delta, ties to the lower index
    std::vector<std::size_t> by_gamma(n);
    std::iota(by_gamma.begin(), by_gamma.end(), std::size_t{0});
    std::sort(by_gamma.begin(), by_gamma.end(), [&](std::size_t a, std::size_t b) {
        const double ga = rho[a] * delta[a], gb = rho[b] * delta[b];
        if (ga != gb) return ga > gb;
        return a < b;
    });

    InitialClustering ic;
    ic.k = k;
    ic.assignment.assign(n, 0);
    std::int32_t next_id = 1;
    std::vector<bool> is_center(n, false);
    for (std::int32_t c = 0; c < k; ++c) is_center[by_gamma[c]] = true;
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t i = order[p];
        if (is_center[i])
            ic.assignment[i] = next_id++;
        else
            ic.assignment[i] = ic.assignment[parent[i]];
    }
    return ic;
}

ClusterCores to_cluster_cores(const IsolationKernelModel& model, const PointMatrix& subset,
                              const InitialClustering& ic) {
    if (ic.assignment.size() != subset.rows)
        throw std::invalid_argument("to_cluster_cores: assignment length mismatch");
    if (ic.k < 1) throw std::invalid_argument("to_cluster_cores: empty clustering");

    std::vector<std::vector<std::size_t>> groups(ic.k);
    for (std::size_t i = 0; i < ic.assignment.size(); ++i) {
        const std::int32_t id = ic.assignment[i];
        if (id == 0) continue;
        if (id < 1 || id > ic.k)
            throw std::invalid_argument("to_cluster_cores: cluster id out of range");
        groups[id - 1].push_back(i);
    }
    for (std::int32_t c = 0; c < ic.k; ++c)
        if (groups[c].empty())
            throw std::invalid_argument("to_cluster_cores: cluster id " + std::to_string(c + 1) +
                                        " has no members");

    std::vector<std::size_t> by_size(groups.size());
    std::iota(by_size.begin(), by_size.end(), std::size_t{0});
    std::sort(by_size.begin(), by_size.end(), [&](std::size_t a, std::size_t b) {
        if (groups[a].size() != groups[b].size()) return groups[a].size() > groups[b].size();
        return groups[a].front() < groups[b].front();
    });

    const auto cells = embed_matrix(model, subset);
    ClusterCores cores;
    cores.tau = -1.0;
    for (const std::size_t g : by_size) {
        cores.cores.push_back(std::move(groups[g]));
        cores.mean_maps.push_back(mean_map_from_cells(model, cells, subset.rows, cores.cores.back()));
    }
    return cores;
}

InitialClustering cores_to_initial(const ClusterCores& cores, std::size_t subset_size) {
    InitialClustering ic;
    ic.k = static_cast<std::int32_t>(cores.core_count());
    ic.assignment.assign(subset_size, 0);
    for (std::size_t c = 0; c < cores.cores.size(); ++c)
        for (const std::size_t idx : cores.cores[c])
            ic.assignment[idx] = static_cast<std::int32_t>(c + 1);
    return ic;
}

}  // namespace kdc
