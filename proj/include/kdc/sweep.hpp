#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "kdc/dataset.hpp"
#include "kdc/metrics.hpp"
#include "kdc/pipeline.hpp"

namespace kdc {

struct SweepRow {
    std::uint32_t psi = 0;
    std::uint32_t t = 0;
    std::optional<double> tau;  // unset for plugins without a threshold
    std::size_t trials = 0;
    std::size_t failures = 0;  // trials with fewer than k components at this tau
    std::vector<MetricScores> per_trial;
    double coverage_mean = 0.0;  // fraction of the subset inside the kept cores
    bool best = false;           // flagged on the row with the highest median NMI

    double nmi_mean() const;
    double nmi_median() const;
    double ami_mean() const;
    double ari_mean() const;
    double f1_mean() const;
};

/// Cross-product parameter search over (psi, t, tau) x seeds on the
/// centralized pipeline. Per (psi, t, seed) the kernel is fitted and the
/// data embedded once; tau rows reuse those embeddings, so every row's
/// labels are identical to a run_pipeline call with the same settings.
/// tau_grid is ignored for plugins without a threshold (one row per
/// (psi, t) then). Rows come back keyed by (psi, t, tau) with per-seed
/// metric scores; the best row by median NMI is flagged.
std::vector<SweepRow> run_sweep(const Dataset& ds, const PipelineConfig& base,
                                const std::vector<std::uint32_t>& psi_grid,
                                const std::vector<std::uint32_t>& t_grid,
                                const std::vector<double>& tau_grid,
                                const std::vector<std::uint64_t>& seeds);

}  // namespace kdc
