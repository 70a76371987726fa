#include <doctest.h>

#include <algorithm>
#include <deque>

#include "kdc/kbcc.hpp"
#include "kdc/synth.hpp"

#include "support/oracles.hpp"

using namespace kdc;

namespace {

PointMatrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
    auto eng = RngStream(seed, "pts").engine();
    PointMatrix m(n, d);
    for (double& v : m.values) v = uniform_unit(eng);
    return m;
}

}  // namespace

TEST_CASE("min_matches_above respects the strict comparison and 1/t quantization") {
    CHECK(min_matches_above(0.0, 4) == 1);
    CHECK(min_matches_above(0.75, 4) == 4);    // 3/4 is not > 3/4
    CHECK(min_matches_above(0.7499, 4) == 3);  // 3/4 > 0.7499
    for (std::uint32_t t : {4u, 7u, 200u}) {
        for (std::uint32_t j = 1; j < t; ++j) {
            const double tau = static_cast<double>(j) / t;
            const double mid = tau + 1.0 / (2.0 * t);
            CHECK(min_matches_above(tau, t) == j + 1);
            CHECK(min_matches_above(mid, t) == min_matches_above(tau, t));
        }
    }
}

TEST_CASE("pairwise match counts agree with the direct per-pair loop") {
    const auto pts = random_points(60, 2, 21);
    const auto model = fit_isolation_kernel(pts, 4, 19, RngStream(21, "kernel-fit"));
    const auto cells = embed_matrix(model, pts);
    const auto counts = pairwise_match_counts(cells, pts.rows, model.t);
    for (std::size_t i = 0; i < pts.rows; ++i)
        for (std::size_t j = i + 1; j < pts.rows; ++j)
            CHECK(counts.at(i, j) ==
                  match_count(cells.data() + i * model.t, cells.data() + j * model.t, model.t));
}

TEST_CASE("fully connected graph at tau=0 yields one core holding all of B") {
    // tight blob: every pair shares at least one cell
    const auto ds = make_blobs(40, 2, 1, 0.01, 3, "b");
    const auto model = fit_isolation_kernel(ds.points, 2, 8, RngStream(2, "kernel-fit"));
    const auto cores = kbcc_cluster(model, ds.points, 1, 0.0);
    REQUIRE(cores.core_count() == 1);
    CHECK(cores.cores[0].size() == 40);
    CHECK(cores.mean_maps[0].support_size == 40);
}

TEST_CASE("two separated blobs split into two cores that match the BFS oracle") {
    const auto ds = make_blobs(80, 2, 2, 0.01, 7, "b2");
    const auto model = fit_isolation_kernel(ds.points, 8, 32, RngStream(5, "kernel-fit"));
    const auto cores = kbcc_cluster(model, ds.points, 2, 0.5);
    REQUIRE(cores.core_count() == 2);

    std::size_t count = 0;
    const auto oracle = oracle::bfs_cores(model, ds.points, 0.5, 2, &count);
    CHECK(cores.cores == oracle);

    // each core sits inside one ground-truth blob
    for (const auto& core : cores.cores) {
        const std::int32_t label = (*ds.labels)[core.front()];
        for (const std::size_t idx : core) CHECK((*ds.labels)[idx] == label);
    }
}

TEST_CASE("requesting more cores than components carries the actual count") {
    const auto ds = make_blobs(60, 2, 3, 0.01, 11, "b3");
    const auto model = fit_isolation_kernel(ds.points, 8, 32, RngStream(6, "kernel-fit"));
    try {
        (void)kbcc_cluster(model, ds.points, 5, 0.5);
        FAIL("expected InsufficientComponentsError");
    } catch (const InsufficientComponentsError& e) {
        CHECK(e.component_count == 3);
        CHECK(e.requested_k == 5);
    }
}

TEST_CASE("cores equal the BFS oracle on random instances") {
    auto eng = RngStream(77, "meta").engine();
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 20 + uniform_below(eng, 100);
        const auto pts = random_points(n, 2, 1000 + trial);
        const auto model = fit_isolation_kernel(pts, 4, 8, RngStream(trial, "kernel-fit"));
        const double tau = static_cast<double>(uniform_below(eng, model.t)) / model.t;
        const std::size_t k = 1 + uniform_below(eng, 4);

        std::size_t oracle_count = 0;
        const auto oracle = oracle::bfs_cores(model, pts, tau, k, &oracle_count);
        if (oracle_count < k) {
            CHECK_THROWS_AS((void)kbcc_cluster(model, pts, k, tau), InsufficientComponentsError);
        } else {
            const auto cores = kbcc_cluster(model, pts, k, tau);
            CHECK(cores.cores == oracle);
            // sizes are non-increasing and nonempty
            for (std::size_t c = 0; c < cores.core_count(); ++c) {
                CHECK(!cores.cores[c].empty());
                if (c > 0) CHECK(cores.cores[c - 1].size() >= cores.cores[c].size());
            }
        }
    }
}

TEST_CASE("tau sweep covers the grid and component counts grow with tau") {
    const auto ds = make_blobs(90, 2, 3, 0.015, 13, "b4");
    const auto model = fit_isolation_kernel(ds.points, 4, 16, RngStream(8, "kernel-fit"));
    const auto grid = default_tau_grid(model.t);
    CHECK(grid.size() == model.t - 1);
    const auto entries = tau_sweep(model, ds.points, 3, grid);
    REQUIRE(entries.size() == grid.size());
    for (std::size_t i = 1; i < entries.size(); ++i)
        CHECK(entries[i].component_count >= entries[i - 1].component_count);
    // some tau yields exactly 3 components covering at least half of B
    bool found = false;
    for (const auto& e : entries) {
        if (!e.cores) continue;
        std::size_t covered = 0;
        for (const auto& c : e.cores->cores) covered += c.size();
        if (e.component_count == 3 && 2 * covered >= ds.size()) found = true;
    }
    CHECK(found);
}

TEST_CASE("results are constant within each 1/t quantization interval") {
    const auto pts = random_points(70, 2, 31);
    const auto model = fit_isolation_kernel(pts, 4, 10, RngStream(31, "kernel-fit"));
    for (std::uint32_t j = 1; j + 1 < model.t; ++j) {
        const double lo = static_cast<double>(j) / model.t;
        const double mid = lo + 1.0 / (2.0 * model.t);
        std::size_t c_lo = 0, c_mid = 0;
        const auto cells = embed_matrix(model, pts);
        const auto counts = pairwise_match_counts(cells, pts.rows, model.t);
        const auto comp_lo = threshold_components(counts, min_matches_above(lo, model.t), &c_lo);
        const auto comp_mid = threshold_components(counts, min_matches_above(mid, model.t), &c_mid);
        CHECK(comp_lo == comp_mid);
        CHECK(c_lo == c_mid);
    }
}

TEST_CASE("select_tau agrees with a brute-force scan of the default grid") {
    for (std::uint64_t seed : {1ULL, 5ULL, 9ULL}) {
        const auto ds = make_blobs(70, 2, 3, 0.02, seed, "b5");
        const auto model = fit_isolation_kernel(ds.points, 4, 12, RngStream(seed, "kernel-fit"));
        const std::size_t k = 3;

        const auto entries = tau_sweep(model, ds.points, k, default_tau_grid(model.t));
        double best_tau = -1.0;
        std::size_t best_covered = 0;
        for (const auto& e : entries) {
            if (!e.cores) continue;
            std::size_t covered = 0;
            for (const auto& c : e.cores->cores) covered += c.size();
            if (covered > best_covered ||
                (covered == best_covered && best_tau < 0.0)) {
                best_covered = covered;
                best_tau = e.tau;
            }
        }
        if (best_tau >= 0.0) {
            CHECK(select_tau(model, ds.points, k) == doctest::Approx(best_tau));
        } else {
            CHECK_THROWS_AS((void)select_tau(model, ds.points, k), InsufficientComponentsError);
        }
    }
}
