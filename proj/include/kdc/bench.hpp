#pragma once

#include <cstdint>
#include <vector>

#include "kdc/simulation.hpp"
#include "kdc/synth.hpp"

namespace kdc {

struct ScalingRow {
    std::size_t n = 0;
    std::uint64_t assignment_ops = 0;
    double assign_ms = 0.0;
    double cluster_ms = 0.0;  // step-2 time at the fixed subset size
};

struct ScalingResult {
    std::vector<ScalingRow> rows;
    double loglog_slope = 0.0;  // least-squares slope of log assign time vs log n
};

/// Step-3 cost against growing n at a fixed subset size: the model and
/// initial clusters are built once from the first points, then every size
/// is labeled and timed. Assignment op counts are exact (n*k); wall times
/// are the noisy companion.
ScalingResult bench_step3_scaling(const std::vector<std::size_t>& sizes, std::size_t s,
                                  std::int32_t k, const KernelConfig& kernel, std::uint64_t seed);

struct PropertyBRow {
    std::size_t r = 0;
    std::uint64_t centralized_ops = 0;
    std::uint64_t max_site_ops = 0;
    double centralized_assign_ms = 0.0;
    double max_site_assign_ms = 0.0;
};

/// Max-over-sites step-3 cost versus the centralized run, per site count.
std::vector<PropertyBRow> bench_property_b(const Dataset& ds,
                                           const std::vector<std::size_t>& r_values,
                                           const RunConfig& cfg, std::optional<double> skew);

}  // namespace kdc
