#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kdc/rng.hpp"

namespace kdc {

/// Row-major matrix of point coordinates.
struct PointMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    PointMatrix() = default;
    PointMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

    const double* row(std::size_t i) const { return values.data() + i * cols; }
    double* row(std::size_t i) { return values.data() + i * cols; }
    std::span<const double> row_span(std::size_t i) const { return {row(i), cols}; }

    /// Copy of the listed rows, in the given order.
    PointMatrix gather(std::span<const std::size_t> indices) const;

    static PointMatrix from_rows(const std::vector<std::vector<double>>& rows);
};

struct Dataset {
    PointMatrix points;
    std::optional<std::vector<std::int32_t>> labels;
    std::string name;

    std::size_t size() const { return points.rows; }
    std::size_t dim() const { return points.cols; }
};

struct CsvOptions {
    std::optional<std::size_t> label_column;  // 0-indexed over all columns
    bool has_header = false;
};

/// Parse a comma-separated file of decimal reals into a Dataset. Reports
/// the offending row and column on any malformed cell; rejects ragged rows
/// and empty files. Row order is preserved.
Dataset load_csv(const std::string& path, const CsvOptions& opts = {});

/// Write points (plus label columns when present) back out as CSV.
void save_csv(const std::string& path, const Dataset& ds, bool header = true);

/// Affine map of every dimension onto [0,1]; constant dimensions map to 0.
/// Labels pass through untouched.
Dataset normalize_unit_range(const Dataset& ds);

/// r disjoint index lists covering 0..n-1, one per simulated site.
struct SitePartition {
    std::vector<std::vector<std::size_t>> site_indices;

    std::size_t site_count() const { return site_indices.size(); }
    std::size_t total_points() const;
};

/// Split 0..n-1 across r sites. With no skew the sites get floor(n/r) or
/// ceil(n/r) points each from a random shuffle; with skew=p the first site
/// gets ceil(p*n) points and the rest share the remainder evenly.
SitePartition partition_sites(std::size_t n, std::size_t r,
                              std::optional<double> skew, const RngStream& rng);

/// Uniform sample without replacement of exactly s_target indices,
/// returned in ascending order. Selection keeps the s_target smallest
/// per-index priorities of the stream, so the same (stream, index) pair is
/// chosen or rejected identically no matter which subsets of indices other
/// callers hold. sample_subset(all of 0..n-1) therefore equals the union
/// of sample-below-threshold calls over any partition of 0..n-1.
std::vector<std::size_t> sample_subset(const std::vector<std::size_t>& indices,
                                       std::size_t s_target, const RngStream& rng);

/// Priority-order rank threshold: the pair (priority, index) of the s-th
/// smallest priority over 0..n-1. Points at or below this threshold form
/// exactly sample_subset(0..n-1, s, rng).
struct SubsetThreshold {
    std::uint64_t priority = 0;
    std::uint64_t index = 0;
};
SubsetThreshold subset_threshold(std::size_t n, std::size_t s, const RngStream& rng);

/// The members of `indices` that fall inside the global sample defined by
/// the threshold; ascending order.
std::vector<std::size_t> sample_below_threshold(const std::vector<std::size_t>& indices,
                                                const SubsetThreshold& threshold,
                                                const RngStream& rng);

}  // namespace kdc
