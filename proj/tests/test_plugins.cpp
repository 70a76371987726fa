#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "kdc/metrics.hpp"
#include "kdc/plugins.hpp"
#include "kdc/synth.hpp"

using namespace kdc;

namespace {

double wcss(const PointMatrix& pts, const std::vector<std::int32_t>& assignment, std::int32_t k) {
    const std::size_t d = pts.cols;
    std::vector<std::vector<double>> sums(k, std::vector<double>(d, 0.0));
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t i = 0; i < pts.rows; ++i) {
        const std::int32_t c = assignment[i] - 1;
        for (std::size_t j = 0; j < d; ++j) sums[c][j] += pts.row(i)[j];
        ++sizes[c];
    }
    double total = 0.0;
    for (std::size_t i = 0; i < pts.rows; ++i) {
        const std::int32_t c = assignment[i] - 1;
        for (std::size_t j = 0; j < d; ++j) {
            const double diff = pts.row(i)[j] - sums[c][j] / static_cast<double>(sizes[c]);
            total += diff * diff;
        }
    }
    return total;
}

// exhaustive minimum WCSS over every assignment of n points to <= k groups
double exhaustive_optimum(const PointMatrix& pts, std::int32_t k) {
    const std::size_t n = pts.rows;
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::int32_t> digits(n, 0);
    while (true) {
        // compact used ids so wcss sees contiguous clusters
        std::vector<std::int32_t> compact(n);
        std::vector<std::int32_t> remap(k, -1);
        std::int32_t next = 1;
        for (std::size_t i = 0; i < n; ++i) {
            if (remap[digits[i]] == -1) remap[digits[i]] = next++;
            compact[i] = remap[digits[i]];
        }
        best = std::min(best, wcss(pts, compact, next - 1));

        std::size_t pos = 0;
        while (pos < n && digits[pos] == k - 1) digits[pos++] = 0;
        if (pos == n) break;
        ++digits[pos];
    }
    return best;
}

PointMatrix three_tight_blobs_12() {
    return PointMatrix::from_rows({
        {0.00, 0.00}, {0.05, 0.02}, {0.02, 0.06}, {0.06, 0.05},
        {1.00, 1.00}, {1.04, 0.98}, {0.97, 1.03}, {1.02, 1.05},
        {2.00, 0.00}, {2.03, 0.04}, {1.98, 0.02}, {2.05, 0.06},
    });
}

// naive reference density-peak, written independently of the library path
std::vector<std::int32_t> ref_density_peak(const PointMatrix& pts, std::int32_t k,
                                           double percentile) {
    const std::size_t n = pts.rows;
    std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
    std::vector<double> flat;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            double sq = 0.0;
            for (std::size_t c = 0; c < pts.cols; ++c) {
                const double diff = pts.row(i)[c] - pts.row(j)[c];
                sq += diff * diff;
            }
            dist[i][j] = std::sqrt(sq);
            if (j > i) flat.push_back(dist[i][j]);
        }
    std::sort(flat.begin(), flat.end());
    const double dc =
        flat[std::min(flat.size() - 1, static_cast<std::size_t>(percentile * flat.size()))];

    std::vector<double> rho(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) rho[i] += std::exp(-(dist[i][j] / dc) * (dist[i][j] / dc));

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return rho[a] != rho[b] ? rho[a] > rho[b] : a < b;
    });

    std::vector<double> delta(n);
    std::vector<std::size_t> parent(n);
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t i = order[p];
        if (p == 0) {
            delta[i] = *std::max_element(dist[i].begin(), dist[i].end());
            parent[i] = i;
            continue;
        }
        double best = std::numeric_limits<double>::infinity();
        std::size_t who = i;
        for (std::size_t q = 0; q < p; ++q) {
            const std::size_t j = order[q];
            if (dist[i][j] < best || (dist[i][j] == best && j < who)) {
                best = dist[i][j];
                who = j;
            }
        }
        delta[i] = best;
        parent[i] = who;
    }

    std::vector<std::size_t> by_gamma(n);
    for (std::size_t i = 0; i < n; ++i) by_gamma[i] = i;
    std::sort(by_gamma.begin(), by_gamma.end(), [&](std::size_t a, std::size_t b) {
        const double ga = rho[a] * delta[a], gb = rho[b] * delta[b];
        return ga != gb ? ga > gb : a < b;
    });

    std::vector<std::int32_t> labels(n, 0);
    std::vector<bool> center(n, false);
    for (std::int32_t c = 0; c < k; ++c) center[by_gamma[c]] = true;
    std::int32_t next = 1;
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t i = order[p];
        labels[i] = center[i] ? next++ : labels[parent[i]];
    }
    return labels;
}

}  // namespace

TEST_CASE("kmeans with k=1 gathers everything around the mean") {
    const auto ds = make_blobs(30, 3, 2, 0.05, 3, "b");
    std::vector<double> trace;
    const auto ic = kmeans(ds.points, 1, 100, RngStream(1, "plugin"), &trace);
    CHECK(ic.k == 1);
    for (const auto a : ic.assignment) CHECK(a == 1);
    // objective equals total variance around the global mean
    CHECK(trace.back() == doctest::Approx(wcss(ds.points, ic.assignment, 1)));
}

TEST_CASE("kmeans separates two distant singletons") {
    const auto pts = PointMatrix::from_rows({{0.0, 0.0}, {10.0, 10.0}});
    const auto ic = kmeans(pts, 2, 100, RngStream(2, "plugin"));
    CHECK(ic.assignment[0] != ic.assignment[1]);
}

TEST_CASE("kmeans reaches the exhaustive optimum on a 12-point instance") {
    const auto pts = three_tight_blobs_12();
    const double optimum = exhaustive_optimum(pts, 3);
    const auto ic = kmeans(pts, 3, 100, RngStream(3, "plugin"));
    CHECK(wcss(pts, ic.assignment, 3) == doctest::Approx(optimum).epsilon(1e-9));
}

TEST_CASE("kmeans objective never increases across iterations") {
    auto eng = RngStream(4, "meta").engine();
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 20 + uniform_below(eng, 60);
        PointMatrix pts(n, 2);
        for (double& v : pts.values) v = uniform_unit(eng);
        std::vector<double> trace;
        (void)kmeans(pts, 4, 100, RngStream(trial, "plugin"), &trace);
        for (std::size_t i = 1; i < trace.size(); ++i)
            CHECK(trace[i] <= trace[i - 1] + 1e-9);
    }
}

TEST_CASE("kmeans rejects k larger than the subset") {
    const auto pts = PointMatrix::from_rows({{0.0}, {1.0}});
    CHECK_THROWS_AS((void)kmeans(pts, 3, 100, RngStream(0, "p")), std::invalid_argument);
}

TEST_CASE("kernel kmeans on identical points uses a single nonempty cluster") {
    PointMatrix pts(6, 2);
    for (std::size_t i = 0; i < 6; ++i) {
        pts.row(i)[0] = 0.5;
        pts.row(i)[1] = 0.5;
    }
    // add one distinct point so the kernel can be fit (psi=2 needs 2)
    pts.row(5)[0] = 0.6;
    const auto model = fit_isolation_kernel(pts, 2, 8, RngStream(5, "kernel-fit"));
    PointMatrix dup(5, 2);
    for (std::size_t i = 0; i < 5; ++i) {
        dup.row(i)[0] = 0.5;
        dup.row(i)[1] = 0.5;
    }
    const auto ic = kernel_kmeans(model, dup, 3, 100, RngStream(5, "plugin"));
    for (const auto a : ic.assignment) CHECK(a == ic.assignment[0]);
}

TEST_CASE("kernel kmeans k=1 is one cluster") {
    const auto ds = make_blobs(25, 2, 2, 0.05, 6, "b");
    const auto model = fit_isolation_kernel(ds.points, 4, 16, RngStream(6, "kernel-fit"));
    const auto ic = kernel_kmeans(model, ds.points, 1, 100, RngStream(6, "plugin"));
    for (const auto a : ic.assignment) CHECK(a == 1);
}

TEST_CASE("kernel kmeans objective matches the Gram-matrix formulation") {
    const auto ds = make_blobs(10, 2, 2, 0.08, 7, "b");
    const auto model = fit_isolation_kernel(ds.points, 3, 12, RngStream(7, "kernel-fit"));
    const auto ic = kernel_kmeans(model, ds.points, 2, 100, RngStream(7, "plugin"));

    // Gram matrix G = t * kappa; objective = sum_c [sum_{x in c} G_xx
    //   - (1/|c|) sum_{x,y in c} G_xy]
    const std::size_t n = ds.size();
    std::vector<std::vector<double>> gram(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            gram[i][j] = model.t * kernel_value(model, ds.points.row_span(i), ds.points.row_span(j));
    double oracle = 0.0;
    for (std::int32_t c = 1; c <= 2; ++c) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (ic.assignment[i] == c) members.push_back(i);
        if (members.empty()) continue;
        double self = 0.0, cross = 0.0;
        for (const auto i : members) {
            self += gram[i][i];
            for (const auto j : members) cross += gram[i][j];
        }
        oracle += self - cross / static_cast<double>(members.size());
    }
    CHECK(kernel_kmeans_objective(model, ds.points, ic) == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("kernel kmeans objective never increases") {
    const auto ds = make_blobs(50, 2, 3, 0.05, 8, "b");
    const auto model = fit_isolation_kernel(ds.points, 4, 16, RngStream(8, "kernel-fit"));
    std::vector<double> trace;
    (void)kernel_kmeans(model, ds.points, 3, 100, RngStream(8, "plugin"), &trace);
    for (std::size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-9);
}

TEST_CASE("density peak labels two separated blobs like the reference") {
    const auto ds = make_blobs(60, 2, 2, 0.02, 9, "b");
    const auto ic = density_peak(ds.points, 2);
    const auto ref = ref_density_peak(ds.points, 2, 0.02);
    CHECK(ic.assignment == ref);
    // and each cluster is pure against ground truth
    CHECK(nmi(*ds.labels, ic.assignment) == doctest::Approx(1.0));
}

TEST_CASE("density peak with k = |B| makes every point its own center") {
    const auto ds = make_blobs(8, 2, 2, 0.05, 10, "b");
    const auto ic = density_peak(ds.points, 8);
    std::vector<bool> seen(9, false);
    for (const auto a : ic.assignment) {
        CHECK(a >= 1);
        CHECK(a <= 8);
        CHECK_FALSE(seen[a]);
        seen[a] = true;
    }
}

TEST_CASE("density peak handles duplicate points deterministically") {
    PointMatrix pts(6, 2);
    for (std::size_t i = 0; i < 6; ++i) {
        pts.row(i)[0] = 0.25;
        pts.row(i)[1] = 0.75;
    }
    const auto a = density_peak(pts, 2);
    const auto b = density_peak(pts, 2);
    CHECK(a.assignment == b.assignment);
}

TEST_CASE("density peak output is permutation invariant in distribution") {
    const auto ds = make_blobs(40, 2, 3, 0.03, 11, "b");
    const auto base = density_peak(ds.points, 3);

    // reverse the point order and compare as partitions
    PointMatrix reversed(ds.size(), 2);
    for (std::size_t i = 0; i < ds.size(); ++i)
        std::copy(ds.points.row(ds.size() - 1 - i), ds.points.row(ds.size() - 1 - i) + 2,
                  reversed.row(i));
    const auto flipped = density_peak(reversed, 3);
    std::vector<std::int32_t> unflipped(flipped.assignment.rbegin(), flipped.assignment.rend());
    CHECK(ari(base.assignment, unflipped) == doctest::Approx(1.0));
}

TEST_CASE("to_cluster_cores groups by id and computes per-group mean maps") {
    const auto ds = make_blobs(30, 2, 2, 0.04, 12, "b");
    const auto model = fit_isolation_kernel(ds.points, 4, 16, RngStream(12, "kernel-fit"));

    InitialClustering ic;
    ic.k = 1;
    ic.assignment.assign(30, 1);
    const auto single = to_cluster_cores(model, ds.points, ic);
    REQUIRE(single.core_count() == 1);
    CHECK(single.mean_maps[0].weights == mean_map(model, ds.points).weights);
    CHECK(single.tau == -1.0);

    // hand 2-cluster instance: per-group maps match direct calls
    InitialClustering two;
    two.k = 2;
    two.assignment.assign(30, 1);
    for (std::size_t i = 15; i < 30; ++i) two.assignment[i] = 2;
    const auto cores = to_cluster_cores(model, ds.points, two);
    REQUIRE(cores.core_count() == 2);
    PointMatrix first(15, 2), second(15, 2);
    for (std::size_t i = 0; i < 15; ++i) {
        std::copy(ds.points.row(i), ds.points.row(i) + 2, first.row(i));
        std::copy(ds.points.row(15 + i), ds.points.row(15 + i) + 2, second.row(i));
    }
    CHECK(cores.mean_maps[0].weights == mean_map(model, first).weights);
    CHECK(cores.mean_maps[1].weights == mean_map(model, second).weights);
}

TEST_CASE("kernel bounded cores round-trip through InitialClustering unchanged") {
    const auto ds = make_blobs(60, 2, 3, 0.02, 13, "b");
    const auto model = fit_isolation_kernel(ds.points, 8, 24, RngStream(13, "kernel-fit"));
    const auto cores = kbcc_cluster(model, ds.points, 3, 0.25);
    const auto ic = cores_to_initial(cores, ds.size());
    const auto back = to_cluster_cores(model, ds.points, ic);
    CHECK(back.cores == cores.cores);
    REQUIRE(back.mean_maps.size() == cores.mean_maps.size());
    for (std::size_t c = 0; c < cores.mean_maps.size(); ++c)
        CHECK(back.mean_maps[c].weights == cores.mean_maps[c].weights);
}

TEST_CASE("to_cluster_cores rejects an empty cluster id") {
    const auto ds = make_blobs(10, 2, 2, 0.04, 14, "b");
    const auto model = fit_isolation_kernel(ds.points, 2, 8, RngStream(14, "kernel-fit"));
    InitialClustering ic;
    ic.k = 3;
    ic.assignment.assign(10, 1);
    for (std::size_t i = 5; i < 10; ++i) ic.assignment[i] = 3;  // id 2 unused
    CHECK_THROWS_AS((void)to_cluster_cores(model, ds.points, ic), std::invalid_argument);
}
