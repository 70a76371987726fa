#include <doctest.h>

#include <algorithm>

#include "kdc/assign.hpp"
#include "kdc/metrics.hpp"
#include "kdc/pipeline.hpp"
#include "kdc/synth.hpp"

using namespace kdc;

namespace {

// cores drawn from ground-truth clusters: a fixed fraction of each class
std::vector<std::vector<std::size_t>> truth_sampled_groups(const Dataset& ds, double fraction,
                                                           std::uint64_t seed) {
    std::int32_t k = 0;
    for (const auto l : *ds.labels) k = std::max(k, l + 1);
    std::vector<std::vector<std::size_t>> by_class(k);
    for (std::size_t i = 0; i < ds.size(); ++i) by_class[(*ds.labels)[i]].push_back(i);
    std::vector<std::vector<std::size_t>> groups;
    for (std::int32_t c = 0; c < k; ++c) {
        const std::size_t take = std::max<std::size_t>(1, fraction * by_class[c].size());
        groups.push_back(
            sample_subset(by_class[c], take, RngStream(seed, "core-" + std::to_string(c))));
    }
    return groups;
}

}  // namespace

TEST_CASE("assign_distribution with one core labels everything 1") {
    const auto ds = make_blobs(40, 2, 2, 0.05, 1, "b");
    const auto model = fit_isolation_kernel(ds.points, 4, 16, RngStream(1, "kernel-fit"));
    const auto result = assign_distribution(model, {mean_map(model, ds.points)}, ds.points);
    for (const auto l : result.labels) CHECK(l == 1);
    CHECK(result.op_count == 40);
}

TEST_CASE("assign_distribution recovers blob membership and matches brute force") {
    const auto ds = make_blobs(40, 2, 2, 0.03, 2, "b");
    const auto model = fit_isolation_kernel(ds.points, 8, 32, RngStream(2, "kernel-fit"));

    // cores = ground-truth halves
    std::vector<std::vector<std::size_t>> groups(2);
    for (std::size_t i = 0; i < ds.size(); ++i) groups[(*ds.labels)[i]].push_back(i);
    const auto cells = embed_matrix(model, ds.points);
    std::vector<MeanMap> maps;
    for (const auto& g : groups) maps.push_back(mean_map_from_cells(model, cells, ds.size(), g));

    const auto result = assign_distribution(model, maps, ds.points);
    CHECK(result.op_count == 80);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        // brute force: argmax over average pairwise kernel values
        double best_sim = -1.0;
        std::int32_t best = 0;
        for (std::size_t c = 0; c < groups.size(); ++c) {
            double total = 0.0;
            for (const std::size_t j : groups[c])
                total += kernel_value(model, ds.points.row_span(i), ds.points.row_span(j));
            const double sim = total / static_cast<double>(groups[c].size());
            if (sim > best_sim) {
                best_sim = sim;
                best = static_cast<std::int32_t>(c + 1);
            }
        }
        CHECK(result.labels[i] == best);
        CHECK(result.labels[i] == (*ds.labels)[i] + 1);
    }
}

TEST_CASE("points with no shared cell fall back to label 1 and are counted") {
    IsolationKernelModel model;
    model.psi = 2;
    model.t = 2;
    model.dim = 1;
    model.anchors = {0.0, 2.0, 0.0, 2.0};
    PointMatrix right(2, 1);
    right.row(0)[0] = 2.0;
    right.row(1)[0] = 2.2;
    const auto mm = mean_map(model, right);

    PointMatrix probes(3, 1);
    probes.row(0)[0] = 0.0;  // lands in cell 0, set occupies cell 1
    probes.row(1)[0] = 2.1;
    probes.row(2)[0] = 0.3;
    const auto result = assign_distribution(model, {mm, mm}, probes);
    CHECK(result.zero_similarity_count == 2);
    for (const auto l : result.labels) CHECK(l == 1);  // ties and zeros go low
}

TEST_CASE("assign_center picks the nearest centroid with low-index ties") {
    const std::vector<std::vector<double>> centroids{{0.0, 0.0}, {1.0, 1.0}, {3.0, 3.0}};
    PointMatrix pts(3, 2);
    pts.row(0)[0] = 1.0;
    pts.row(0)[1] = 1.0;  // exactly centroid 2 -> label 2
    pts.row(1)[0] = 0.1;
    pts.row(1)[1] = 0.0;
    pts.row(2)[0] = 0.5;
    pts.row(2)[1] = 0.5;  // tie between centroids 1 and 2 -> label 1
    const auto result = assign_center(centroids, 2, pts);
    CHECK(result.labels[0] == 2);
    CHECK(result.labels[1] == 1);
    CHECK(result.labels[2] == 1);
    CHECK(result.op_count == 9);
}

TEST_CASE("assignment depends only on the point, so permutations commute") {
    const auto ds = make_blobs(50, 3, 3, 0.04, 3, "b");
    const auto model = fit_isolation_kernel(ds.points, 4, 16, RngStream(3, "kernel-fit"));
    std::vector<std::vector<std::size_t>> groups(3);
    for (std::size_t i = 0; i < ds.size(); ++i) groups[(*ds.labels)[i]].push_back(i);
    const auto cells = embed_matrix(model, ds.points);
    std::vector<MeanMap> maps;
    for (const auto& g : groups) maps.push_back(mean_map_from_cells(model, cells, ds.size(), g));

    const auto forward = assign_distribution(model, maps, ds.points);
    PointMatrix reversed(ds.size(), 3);
    for (std::size_t i = 0; i < ds.size(); ++i)
        std::copy(ds.points.row(ds.size() - 1 - i), ds.points.row(ds.size() - 1 - i) + 3,
                  reversed.row(i));
    const auto backward = assign_distribution(model, maps, reversed);
    for (std::size_t i = 0; i < ds.size(); ++i)
        CHECK(forward.labels[i] == backward.labels[ds.size() - 1 - i]);
}

TEST_CASE("distribution assignment beats center assignment on interlocking moons") {
    const auto raw = make_two_moons(240, 110, 0.06, 0.09, 17, "moons");
    const auto ds = normalize_unit_range(raw);
    const auto model = fit_isolation_kernel(ds.points, 32, 100, RngStream(17, "kernel-fit"));

    const auto groups = truth_sampled_groups(ds, 0.3, 17);
    const auto cells = embed_matrix(model, ds.points);
    std::vector<MeanMap> maps;
    for (const auto& g : groups) maps.push_back(mean_map_from_cells(model, cells, ds.size(), g));

    const auto dist = assign_distribution(model, maps, ds.points);
    const auto cent = assign_center(group_centroids(ds.points, groups), 2, ds.points);

    const double nmi_dist = nmi(*ds.labels, dist.labels);
    const double nmi_cent = nmi(*ds.labels, cent.labels);
    CHECK(nmi_dist >= nmi_cent + 0.2);
    CHECK(nmi_dist >= 0.95);
}
