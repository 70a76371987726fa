#include <doctest.h>

#include "kdc/bench.hpp"

using namespace kdc;

TEST_CASE("generators are deterministic and labeled") {
    const auto a = make_blobs(100, 4, 5, 0.02, 9, "b");
    const auto b = make_blobs(100, 4, 5, 0.02, 9, "b");
    CHECK(a.points.values == b.points.values);
    CHECK(*a.labels == *b.labels);
    CHECK(a.dim() == 4);

    const auto moons = make_two_moons(60, 30, 0.05, 0.08, 4);
    CHECK(moons.size() == 90);
    CHECK(moons.dim() == 2);
    std::size_t dense = 0;
    for (const auto l : *moons.labels) dense += (l == 0);
    CHECK(dense == 60);

    const auto nine = make_nine_shapes(5);
    CHECK(nine.dim() == 2);
    std::int32_t k = 0;
    for (const auto l : *nine.labels) k = std::max(k, l + 1);
    CHECK(k == 9);
    CHECK(nine.size() > 2000);
}

TEST_CASE("step-3 scaling counts are exactly n*k and times are recorded") {
    const auto result = bench_step3_scaling({2000, 4000, 8000}, 500, 4, KernelConfig{8, 20}, 3);
    REQUIRE(result.rows.size() == 3);
    for (const auto& row : result.rows) CHECK(row.assignment_ops == row.n * 4);
    CHECK(result.rows[1].assignment_ops == 2 * result.rows[0].assignment_ops);
    for (const auto& row : result.rows) CHECK(row.assign_ms > 0.0);
}

TEST_CASE("max site cost drops below the centralized cost once r >= 2") {
    const auto ds = make_blobs(4000, 3, 4, 0.02, 11, "b");
    RunConfig cfg;
    cfg.pipeline.k = 4;
    cfg.pipeline.kernel = KernelConfig{8, 20};
    cfg.pipeline.subset_size = 300;
    cfg.pipeline.plugin.kind = PluginKind::kmeans;
    cfg.pipeline.seed = 11;
    const auto rows = bench_property_b(ds, {1, 2, 8}, cfg, std::nullopt);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].max_site_ops == rows[0].centralized_ops);  // r=1 degenerate
    for (std::size_t i = 1; i < rows.size(); ++i) {
        CHECK(rows[i].max_site_ops < rows[i].centralized_ops);
        CHECK(rows[i].centralized_ops == ds.size() * 4);
    }
}
