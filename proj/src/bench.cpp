#include "kdc/bench.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace kdc {

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

ScalingResult bench_step3_scaling(const std::vector<std::size_t>& sizes, std::size_t s,
                                  std::int32_t k, const KernelConfig& kernel, std::uint64_t seed) {
    if (sizes.empty()) throw std::invalid_argument("bench_step3_scaling: no sizes");
    for (std::size_t i = 1; i < sizes.size(); ++i)
        if (sizes[i] <= sizes[i - 1])
            throw std::invalid_argument("bench_step3_scaling: sizes must ascend");

    const std::size_t n_max = sizes.back();
    const Dataset ds = make_blobs(n_max, 4, k, 0.02, seed, "scaling-blobs");

    PipelineConfig cfg;
    cfg.k = k;
    cfg.kernel = kernel;
    cfg.subset_size = std::min(s, sizes.front());
    cfg.plugin.kind = PluginKind::kmeans;
    cfg.seed = seed;

    // step 2 once, on a subset drawn from the smallest prefix so the same
    // initial clusters serve every size
    std::vector<std::size_t> base(sizes.front());
    for (std::size_t i = 0; i < base.size(); ++i) base[i] = i;
    const auto subset =
        sample_subset(base, *cfg.subset_size, RngStream(cfg.seed, "subset"));
    const PointMatrix subset_points = ds.points.gather(subset);
    const StepTwoOutput step2 = coordinator_step2(subset_points, cfg);

    ScalingResult result;
    for (const std::size_t n : sizes) {
        // step-2 re-run: with s fixed its cost should not move with n
        auto t0 = std::chrono::steady_clock::now();
        (void)coordinator_step2(subset_points, cfg);
        const double cluster_ms = ms_since(t0);

        PointMatrix prefix(n, ds.dim());
        std::copy(ds.points.values.begin(), ds.points.values.begin() + n * ds.dim(),
                  prefix.values.begin());
        t0 = std::chrono::steady_clock::now();
        const auto assignment = assign_distribution(step2.model, step2.cores.mean_maps, prefix);
        const double assign_ms = ms_since(t0);
        result.rows.push_back(ScalingRow{n, assignment.op_count, assign_ms, cluster_ms});
    }

    // least-squares slope in log-log space
    const std::size_t m = result.rows.size();
    if (m >= 2) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (const auto& row : result.rows) {
            const double x = std::log(static_cast<double>(row.n));
            const double y = std::log(std::max(row.assign_ms, 1e-6));
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double dm = static_cast<double>(m);
        result.loglog_slope = (dm * sxy - sx * sy) / (dm * sxx - sx * sx);
    }
    return result;
}

std::vector<PropertyBRow> bench_property_b(const Dataset& ds,
                                           const std::vector<std::size_t>& r_values,
                                           const RunConfig& cfg, std::optional<double> skew) {
    const RunReport central = run_centralized(ds, cfg);
    std::vector<PropertyBRow> rows;
    for (const std::size_t r : r_values) {
        const auto part =
            partition_sites(ds.size(), r, skew, RngStream(cfg.pipeline.seed, "partitioning"));
        const RunReport dist = run_kdc(ds, part, cfg);
        PropertyBRow row;
        row.r = r;
        row.centralized_ops = central.total_assignment_ops();
        row.max_site_ops = dist.max_site_assignment_ops();
        row.centralized_assign_ms = central.timings.assign_ms;
        row.max_site_assign_ms = dist.max_site_assign_ms;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace kdc
