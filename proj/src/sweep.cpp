#include "kdc/sweep.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

#include "kdc/assign.hpp"
#include "kdc/kbcc.hpp"
#include "kdc/plugins.hpp"

namespace kdc {

namespace {

double mean_of(const std::vector<double>& xs) {
    if (xs.empty()) return 0.0;
    double total = 0.0;
    for (const double x : xs) total += x;
    return total / static_cast<double>(xs.size());
}

double median_of(std::vector<double> xs) {
    if (xs.empty()) return 0.0;
    std::sort(xs.begin(), xs.end());
    const std::size_t m = xs.size() / 2;
    return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
}

std::vector<double> collect(const std::vector<MetricScores>& scores,
                            double MetricScores::*field) {
    std::vector<double> out;
    out.reserve(scores.size());
    for (const auto& s : scores) out.push_back(s.*field);
    return out;
}

}  // namespace

double SweepRow::nmi_mean() const { return mean_of(collect(per_trial, &MetricScores::nmi)); }
double SweepRow::nmi_median() const { return median_of(collect(per_trial, &MetricScores::nmi)); }
double SweepRow::ami_mean() const { return mean_of(collect(per_trial, &MetricScores::ami)); }
double SweepRow::ari_mean() const { return mean_of(collect(per_trial, &MetricScores::ari)); }
double SweepRow::f1_mean() const { return mean_of(collect(per_trial, &MetricScores::f1)); }

std::vector<SweepRow> run_sweep(const Dataset& ds, const PipelineConfig& base,
                                const std::vector<std::uint32_t>& psi_grid,
                                const std::vector<std::uint32_t>& t_grid,
                                const std::vector<double>& tau_grid,
                                const std::vector<std::uint64_t>& seeds) {
    if (psi_grid.empty() || t_grid.empty() || seeds.empty())
        throw std::invalid_argument("run_sweep: empty grid");
    if (!ds.labels) throw std::invalid_argument("run_sweep: dataset has no ground-truth labels");
    const bool uses_tau = base.plugin.kind == PluginKind::kernel_bounded_cores;
    if (uses_tau && tau_grid.empty()) throw std::invalid_argument("run_sweep: empty tau grid");

    struct Key {
        std::uint32_t psi, t;
        double tau;
        bool operator<(const Key& o) const {
            return std::tie(psi, t, tau) < std::tie(o.psi, o.t, o.tau);
        }
    };
    std::map<Key, SweepRow> rows;
    auto row_for = [&](std::uint32_t psi, std::uint32_t t, std::optional<double> tau) -> SweepRow& {
        const Key key{psi, t, tau ? *tau : -1.0};
        auto& row = rows[key];
        if (row.trials == 0) {
            row.psi = psi;
            row.t = t;
            row.tau = tau;
        }
        return row;
    };

    const std::size_t n = ds.size();
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;

    for (const std::uint32_t t : t_grid) {
        for (const std::uint32_t psi : psi_grid) {
            for (const std::uint64_t seed : seeds) {
                PipelineConfig cfg = base;
                cfg.kernel = KernelConfig{psi, t};
                cfg.seed = seed;

                const std::size_t s = effective_subset_size(n, cfg);
                const auto subset = sample_subset(all, s, RngStream(seed, "subset"));
                const PointMatrix subset_points = ds.points.gather(subset);
                const auto model =
                    fit_isolation_kernel(subset_points, psi, t, RngStream(seed, "kernel-fit"));
                const auto subset_cells = embed_matrix(model, subset_points);
                const bool subset_is_all = (s == n);
                const auto all_cells =
                    subset_is_all ? subset_cells : embed_matrix(model, ds.points);

                auto evaluate = [&](const ClusterCores& cores, SweepRow& row) {
                    std::vector<std::int32_t> labels(n);
                    std::size_t covered = 0;
                    for (const auto& core : cores.cores) covered += core.size();
                    if (cfg.assign_rule == AssignRule::distribution) {
                        for (std::size_t i = 0; i < n; ++i) {
                            const std::uint16_t* cells = all_cells.data() + i * t;
                            std::size_t best = 0;
                            double best_sim = -1.0;
                            for (std::size_t c = 0; c < cores.mean_maps.size(); ++c) {
                                const double sim = similarity_from_cells(cores.mean_maps[c], cells);
                                if (sim > best_sim) {
                                    best_sim = sim;
                                    best = c;
                                }
                            }
                            labels[i] = static_cast<std::int32_t>(best + 1);
                        }
                    } else {
                        labels = assign_center(group_centroids(subset_points, cores.cores),
                                               ds.dim(), ds.points)
                                     .labels;
                    }
                    row.per_trial.push_back(all_metrics(*ds.labels, labels));
                    row.coverage_mean += static_cast<double>(covered) / static_cast<double>(s);
                    ++row.trials;
                };

                if (uses_tau) {
                    const auto counts = pairwise_match_counts(subset_cells, s, t);
                    for (const double tau : tau_grid) {
                        auto& row = row_for(psi, t, tau);
                        try {
                            const auto cores =
                                kbcc_cluster_from_counts(model, subset_cells, counts, cfg.k, tau);
                            evaluate(cores, row);
                        } catch (const InsufficientComponentsError&) {
                            ++row.trials;
                            ++row.failures;
                        }
                    }
                } else {
                    auto& row = row_for(psi, t, std::nullopt);
                    StepTwoOutput step2;
                    step2.model = model;
                    const RngStream plugin_stream(seed, "plugin");
                    switch (cfg.plugin.kind) {
                        case PluginKind::kmeans:
                            step2.cores = to_cluster_cores(
                                model, subset_points,
                                kmeans(subset_points, cfg.k, cfg.plugin.max_iters, plugin_stream));
                            break;
                        case PluginKind::kernel_kmeans:
                            step2.cores = to_cluster_cores(
                                model, subset_points,
                                kernel_kmeans(model, subset_points, cfg.k, cfg.plugin.max_iters,
                                              plugin_stream));
                            break;
                        case PluginKind::density_peak:
                            step2.cores = to_cluster_cores(
                                model, subset_points,
                                density_peak(subset_points, cfg.k, cfg.plugin.dp_percentile));
                            break;
                        default: break;
                    }
                    evaluate(step2.cores, row);
                }
            }
        }
    }

    std::vector<SweepRow> out;
    out.reserve(rows.size());
    for (auto& [key, row] : rows) {
        const std::size_t successes = row.trials - row.failures;
        if (successes > 0) row.coverage_mean /= static_cast<double>(successes);
        out.push_back(std::move(row));
    }
    // flag the best row by median NMI (rows with no successful trial skip)
    double best_nmi = -1.0;
    std::size_t best_at = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i].per_trial.empty()) continue;
        if (out[i].nmi_median() > best_nmi) {
            best_nmi = out[i].nmi_median();
            best_at = i;
        }
    }
    if (best_nmi >= 0.0) out[best_at].best = true;
    return out;
}

}  // namespace kdc
