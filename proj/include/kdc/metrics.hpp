#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace kdc {

/// Cross-tabulation of two labelings over the same n points.
struct ContingencyTable {
    std::size_t n = 0;
    std::vector<std::vector<std::int64_t>> counts;  // |U| x |V|
    std::vector<std::int64_t> row_sums;
    std::vector<std::int64_t> col_sums;

    static ContingencyTable from_labels(std::span<const std::int32_t> u,
                                        std::span<const std::int32_t> v);
};

/// Normalized mutual information with sqrt normalization and natural-log
/// entropies. 1 when both labelings are the same single cluster, 0 when
/// either entropy is zero and the labelings differ.
double nmi(std::span<const std::int32_t> truth, std::span<const std::int32_t> predicted);

/// Adjusted mutual information with arithmetic-mean normalization and the
/// exact hypergeometric expected MI. Identical labelings score 1; a zero
/// denominator scores 0 by convention.
double ami(std::span<const std::int32_t> truth, std::span<const std::int32_t> predicted);

/// Adjusted Rand index in [-1, 1].
double ari(std::span<const std::int32_t> truth, std::span<const std::int32_t> predicted);

/// Pair-counting F1: precision and recall over co-clustered point pairs,
/// harmonic mean; degenerate cases (no positive pairs on either side)
/// score 0 unless the labelings are identical.
double pairwise_f1(std::span<const std::int32_t> truth, std::span<const std::int32_t> predicted);

struct MetricScores {
    double nmi = 0.0;
    double ami = 0.0;
    double ari = 0.0;
    double f1 = 0.0;
};

MetricScores all_metrics(std::span<const std::int32_t> truth,
                         std::span<const std::int32_t> predicted);

}  // namespace kdc
