#include "kdc/pipeline.hpp"

#include <chrono>
#include <stdexcept>

namespace kdc {

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

}  // namespace

std::string to_string(PluginKind kind) {
    switch (kind) {
        case PluginKind::kernel_bounded_cores: return "kbcc";
        case PluginKind::kmeans: return "kmeans";
        case PluginKind::kernel_kmeans: return "kernel-kmeans";
        case PluginKind::density_peak: return "dp";
    }
    return "?";
}

std::string to_string(AssignRule rule) {
    return rule == AssignRule::distribution ? "distribution" : "center";
}

PluginKind plugin_from_string(const std::string& name) {
    if (name == "kbcc") return PluginKind::kernel_bounded_cores;
    if (name == "kmeans") return PluginKind::kmeans;
    if (name == "kernel-kmeans") return PluginKind::kernel_kmeans;
    if (name == "dp") return PluginKind::density_peak;
    throw std::invalid_argument("unknown plugin: " + name);
}

AssignRule assign_rule_from_string(const std::string& name) {
    if (name == "distribution") return AssignRule::distribution;
    if (name == "center") return AssignRule::center;
    throw std::invalid_argument("unknown assignment rule: " + name);
}

std::size_t default_subset_size(std::size_t n) { return std::min<std::size_t>(n, 10000); }

std::size_t effective_subset_size(std::size_t n, const PipelineConfig& cfg) {
    const std::size_t s = cfg.subset_size ? *cfg.subset_size : default_subset_size(n);
    return std::min(s, n);
}

StepTwoOutput coordinator_step2(const PointMatrix& subset_points, const PipelineConfig& cfg) {
    StepTwoOutput out;
    const RngStream fit_stream(cfg.seed, "kernel-fit");
    const RngStream plugin_stream(cfg.seed, "plugin");
    out.model = fit_isolation_kernel(subset_points, cfg.kernel.psi, cfg.kernel.t, fit_stream);

    const std::size_t s = subset_points.rows;
    switch (cfg.plugin.kind) {
        case PluginKind::kernel_bounded_cores: {
            const auto cells = embed_matrix(out.model, subset_points);
            const auto counts = pairwise_match_counts(cells, s, out.model.t);
            out.kernel_evaluations += counts.pair_count();
            const double tau = cfg.plugin.tau ? *cfg.plugin.tau
                                              : select_tau_from_counts(counts, cfg.k, out.model.t);
            out.cores = kbcc_cluster_from_counts(out.model, cells, counts, cfg.k, tau);
            out.selected_tau = tau;
            break;
        }
        case PluginKind::kmeans: {
            const auto ic = kmeans(subset_points, cfg.k, cfg.plugin.max_iters, plugin_stream);
            out.cores = to_cluster_cores(out.model, subset_points, ic);
            break;
        }
        case PluginKind::kernel_kmeans: {
            const auto ic =
                kernel_kmeans(out.model, subset_points, cfg.k, cfg.plugin.max_iters, plugin_stream);
            out.kernel_evaluations +=
                static_cast<std::uint64_t>(cfg.k > 1 ? cfg.k - 1 : 0) * s;  // seeding
            out.cores = to_cluster_cores(out.model, subset_points, ic);
            break;
        }
        case PluginKind::density_peak: {
            const auto ic = density_peak(subset_points, cfg.k, cfg.plugin.dp_percentile);
            out.cores = to_cluster_cores(out.model, subset_points, ic);
            break;
        }
    }
    return out;
}

AssignmentResult assign_points(const IsolationKernelModel& model, const StepTwoOutput& step2,
                               const PointMatrix& subset_points, AssignRule rule,
                               const PointMatrix& points) {
    if (rule == AssignRule::distribution)
        return assign_distribution(model, step2.cores.mean_maps, points);
    const auto centroids = group_centroids(subset_points, step2.cores.cores);
    return assign_center(centroids, subset_points.cols, points);
}

PipelineResult run_pipeline(const PointMatrix& points, const PipelineConfig& cfg) {
    PipelineResult result;
    const std::size_t n = points.rows;
    const std::size_t s = effective_subset_size(n, cfg);
    const RngStream subset_stream(cfg.seed, "subset");

    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    result.subset = sample_subset(all, s, subset_stream);
    result.timings.sample_ms = ms_since(t0);

    t0 = std::chrono::steady_clock::now();
    const PointMatrix subset_points = points.gather(result.subset);
    StepTwoOutput step2 = coordinator_step2(subset_points, cfg);
    result.timings.cluster_ms = ms_since(t0);
    result.kernel_evaluations = step2.kernel_evaluations;
    result.selected_tau = step2.selected_tau;

    t0 = std::chrono::steady_clock::now();
    auto assignment = assign_points(step2.model, step2, subset_points, cfg.assign_rule, points);
    result.timings.assign_ms = ms_since(t0);

    result.labels = std::move(assignment.labels);
    result.zero_similarity_count = assignment.zero_similarity_count;
    result.assignment_ops = assignment.op_count;
    result.cores = std::move(step2.cores);
    return result;
}

}  // namespace kdc
