#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kdc/assign.hpp"
#include "kdc/dataset.hpp"
#include "kdc/isolation_kernel.hpp"
#include "kdc/kbcc.hpp"
#include "kdc/plugins.hpp"

namespace kdc {

enum class PluginKind { kernel_bounded_cores, kmeans, kernel_kmeans, density_peak };
enum class AssignRule { distribution, center };

std::string to_string(PluginKind kind);
std::string to_string(AssignRule rule);
PluginKind plugin_from_string(const std::string& name);
AssignRule assign_rule_from_string(const std::string& name);

struct KernelConfig {
    std::uint32_t psi = 16;
    std::uint32_t t = 200;
};

struct PluginConfig {
    PluginKind kind = PluginKind::kernel_bounded_cores;
    std::optional<double> tau;  // fixed threshold; unset = coverage-based pick
    std::int32_t max_iters = 100;
    double dp_percentile = 0.02;
};

struct PipelineConfig {
    std::int32_t k = 2;
    KernelConfig kernel;
    std::optional<std::size_t> subset_size;  // unset = min(n, 10000)
    PluginConfig plugin;
    AssignRule assign_rule = AssignRule::distribution;
    std::uint64_t seed = 1;
};

std::size_t default_subset_size(std::size_t n);
std::size_t effective_subset_size(std::size_t n, const PipelineConfig& cfg);

struct StageTimings {
    double sample_ms = 0.0;
    double cluster_ms = 0.0;
    double assign_ms = 0.0;
};

/// Everything the coordinator produces in step 2: the fitted kernel model
/// and the initial clusters with their mean maps. The same seed always
/// yields the same output for the same subset, which is what makes the
/// distributed and centralized runs agree.
struct StepTwoOutput {
    IsolationKernelModel model;
    ClusterCores cores;
    double selected_tau = -1.0;
    std::uint64_t kernel_evaluations = 0;
};

StepTwoOutput coordinator_step2(const PointMatrix& subset_points, const PipelineConfig& cfg);

/// One site's (or the whole dataset's) step-3 point assignment under the
/// configured rule.
AssignmentResult assign_points(const IsolationKernelModel& model, const StepTwoOutput& step2,
                               const PointMatrix& subset_points, AssignRule rule,
                               const PointMatrix& points);

struct PipelineResult {
    std::vector<std::int32_t> labels;
    std::size_t zero_similarity_count = 0;
    ClusterCores cores;
    std::vector<std::size_t> subset;  // global indices, ascending
    double selected_tau = -1.0;
    std::uint64_t kernel_evaluations = 0;
    std::uint64_t assignment_ops = 0;
    StageTimings timings;
};

/// The full three-step composition: sample a subset, cluster it, assign
/// every point to its most similar initial cluster.
PipelineResult run_pipeline(const PointMatrix& points, const PipelineConfig& cfg);

}  // namespace kdc
