#include "kdc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace kdc {

namespace {

void check_lengths(std::span<const std::int32_t> u, std::span<const std::int32_t> v) {
    if (u.size() != v.size())
        throw std::invalid_argument("metric: label vectors have different lengths (" +
                                    std::to_string(u.size()) + " vs " + std::to_string(v.size()) + ")");
    if (u.empty()) throw std::invalid_argument("metric: empty label vectors");
}

std::vector<std::int32_t> compact_ids(std::span<const std::int32_t> labels) {
    std::unordered_map<std::int32_t, std::int32_t> remap;
    std::vector<std::int32_t> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto [it, inserted] =
            remap.emplace(labels[i], static_cast<std::int32_t>(remap.size()));
        out[i] = it->second;
    }
    return out;
}

bool identical_partitions(std::span<const std::int32_t> u, std::span<const std::int32_t> v) {
    return compact_ids(u) == compact_ids(v);
}

double entropy(const std::vector<std::int64_t>& sums, std::size_t n) {
    double h = 0.0;
    for (const std::int64_t c : sums) {
        if (c <= 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(n);
        h -= p * std::log(p);
    }
    return h;
}

double mutual_information(const ContingencyTable& ct) {
    const double dn = static_cast<double>(ct.n);
    double mi = 0.0;
    for (std::size_t i = 0; i < ct.counts.size(); ++i) {
        for (std::size_t j = 0; j < ct.counts[i].size(); ++j) {
            const std::int64_t nij = ct.counts[i][j];
            if (nij <= 0) continue;
            const double pij = static_cast<double>(nij) / dn;
            mi += pij * std::log(dn * static_cast<double>(nij) /
                                 (static_cast<double>(ct.row_sums[i]) *
                                  static_cast<double>(ct.col_sums[j])));
        }
    }
    return std::max(mi, 0.0);
}

// Expected MI under the permutation (hypergeometric) model.
double expected_mutual_information(const ContingencyTable& ct) {
    const std::int64_t n = static_cast<std::int64_t>(ct.n);
    const double dn = static_cast<double>(n);
    double emi = 0.0;
    for (const std::int64_t a : ct.row_sums) {
        for (const std::int64_t b : ct.col_sums) {
            const std::int64_t lo = std::max<std::int64_t>(1, a + b - n);
            const std::int64_t hi = std::min(a, b);
            for (std::int64_t m = lo; m <= hi; ++m) {
                const double term = (static_cast<double>(m) / dn) *
                                    std::log(dn * static_cast<double>(m) /
                                             (static_cast<double>(a) * static_cast<double>(b)));
                const double log_prob =
                    std::lgamma(static_cast<double>(a + 1)) + std::lgamma(static_cast<double>(b + 1)) +
                    std::lgamma(static_cast<double>(n - a + 1)) +
                    std::lgamma(static_cast<double>(n - b + 1)) - std::lgamma(dn + 1) -
                    std::lgamma(static_cast<double>(m + 1)) -
                    std::lgamma(static_cast<double>(a - m + 1)) -
                    std::lgamma(static_cast<double>(b - m + 1)) -
                    std::lgamma(static_cast<double>(n - a - b + m + 1));
                emi += term * std::exp(log_prob);
            }
        }
    }
    return emi;
}

double comb2(std::int64_t c) {
    return 0.5 * static_cast<double>(c) * static_cast<double>(c - 1);
}

}  // namespace

ContingencyTable ContingencyTable::from_labels(std::span<const std::int32_t> u,
                                               std::span<const std::int32_t> v) {
    check_lengths(u, v);
    const auto cu = compact_ids(u);
    const auto cv = compact_ids(v);
    const std::int32_t ku = *std::max_element(cu.begin(), cu.end()) + 1;
    const std::int32_t kv = *std::max_element(cv.begin(), cv.end()) + 1;

    ContingencyTable ct;
    ct.n = u.size();
    ct.counts.assign(ku, std::vector<std::int64_t>(kv, 0));
    ct.row_sums.assign(ku, 0);
    ct.col_sums.assign(kv, 0);
    for (std::size_t i = 0; i < u.size(); ++i) {
        ++ct.counts[cu[i]][cv[i]];
        ++ct.row_sums[cu[i]];
        ++ct.col_sums[cv[i]];
    }
    return ct;
}

double nmi(std::span<const std::int32_t> truth, std::span<const std::int32_t> predicted) {
    const auto ct = ContingencyTable::from_labels(truth, predicted);
    const double hu = entropy(ct.row_sums, ct.n);
    const double hv = entropy(ct.col_sums, ct.n);
    if (hu == 0.0 && hv == 0.0) return 1.0;  // both a single cluster
    if (hu == 0.0 || hv == 0.0) return 0.0;
    const double value = mutual_information(ct) / std::sqrt(hu * hv);
    return std::clamp(value, 0.0, 1.0);
}

double ami(std::span<const std::int32_t> truth, std::span<const std::int32_t> predicted) {
    check_lengths(truth, predicted);
    if (identical_partitions(truth, predicted)) return 1.0;
    const auto ct = ContingencyTable::from_labels(truth, predicted);
    const double hu = entropy(ct.row_sums, ct.n);
    const double hv = entropy(ct.col_sums, ct.n);
    const double mi = mutual_information(ct);
    const double emi = expected_mutual_information(ct);
    const double denom = 0.5 * (hu + hv) - emi;
    if (std::abs(denom) < 1e-15) return 0.0;
    return (mi - emi) / denom;
}

double ari(std::span<const std::int32_t> truth, std::span<const std::int32_t> predicted) {
    check_lengths(truth, predicted);
    if (truth.size() < 2) throw std::invalid_argument("ari: need at least 2 points");
    const auto ct = ContingencyTable::from_labels(truth, predicted);

    double sum_cells = 0.0;
    for (const auto& row : ct.counts)
        for (const std::int64_t c : row) sum_cells += comb2(c);
    double sum_rows = 0.0, sum_cols = 0.0;
    for (const std::int64_t a : ct.row_sums) sum_rows += comb2(a);
    for (const std::int64_t b : ct.col_sums) sum_cols += comb2(b);

    const double total = comb2(static_cast<std::int64_t>(ct.n));
    const double expected = sum_rows * sum_cols / total;
    const double max_index = 0.5 * (sum_rows + sum_cols);
    const double denom = max_index - expected;
    if (denom == 0.0) return 1.0;  // both labelings trivial and equal
    return (sum_cells - expected) / denom;
}

double pairwise_f1(std::span<const std::int32_t> truth, std::span<const std::int32_t> predicted) {
    check_lengths(truth, predicted);
    if (truth.size() < 2) throw std::invalid_argument("pairwise_f1: need at least 2 points");
    if (identical_partitions(truth, predicted)) return 1.0;
    const auto ct = ContingencyTable::from_labels(truth, predicted);

    double tp = 0.0;
    for (const auto& row : ct.counts)
        for (const std::int64_t c : row) tp += comb2(c);
    double true_pairs = 0.0, pred_pairs = 0.0;
    for (const std::int64_t a : ct.row_sums) true_pairs += comb2(a);
    for (const std::int64_t b : ct.col_sums) pred_pairs += comb2(b);

    if (true_pairs == 0.0 || pred_pairs == 0.0) return 0.0;
    const double precision = tp / pred_pairs;
    const double recall = tp / true_pairs;
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

MetricScores all_metrics(std::span<const std::int32_t> truth,
                         std::span<const std::int32_t> predicted) {
    return MetricScores{nmi(truth, predicted), ami(truth, predicted), ari(truth, predicted),
                        pairwise_f1(truth, predicted)};
}

}  // namespace kdc
