#include "kdc/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "kdc/wire.hpp"

namespace kdc {

namespace {

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

nlohmann::json config_json(const PipelineConfig& cfg) {
    nlohmann::json j;
    j["k"] = cfg.k;
    j["psi"] = cfg.kernel.psi;
    j["t"] = cfg.kernel.t;
    j["plugin"] = to_string(cfg.plugin.kind);
    j["assign"] = to_string(cfg.assign_rule);
    if (cfg.plugin.tau)
        j["tau"] = *cfg.plugin.tau;
    else
        j["tau"] = nullptr;
    j["max_iters"] = cfg.plugin.max_iters;
    j["dp_percentile"] = cfg.plugin.dp_percentile;
    if (cfg.subset_size)
        j["s"] = *cfg.subset_size;
    else
        j["s"] = nullptr;
    j["seed"] = cfg.seed;
    return j;
}

nlohmann::json counters_json(const SiteCounters& c) {
    return nlohmann::json{{"name", c.name},
                          {"kernel_evaluations", c.kernel_evaluations},
                          {"assignment_ops", c.assignment_ops},
                          {"wall_ms", c.wall_ms}};
}

}  // namespace

std::string to_string(MessageKind kind) {
    switch (kind) {
        case MessageKind::subset_upload: return "subset-upload";
        case MessageKind::meanmap_broadcast: return "meanmap-broadcast";
        case MessageKind::model_broadcast: return "model-broadcast";
    }
    return "?";
}

std::uint64_t CommLedger::total_records() const {
    std::uint64_t total = 0;
    for (const auto& m : messages) total += m.record_count;
    return total;
}

std::uint64_t CommLedger::total_bytes() const {
    std::uint64_t total = 0;
    for (const auto& m : messages) total += m.byte_count;
    return total;
}

std::uint64_t CommLedger::records_of(MessageKind kind) const {
    std::uint64_t total = 0;
    for (const auto& m : messages)
        if (m.kind == kind) total += m.record_count;
    return total;
}

std::uint64_t RunReport::total_assignment_ops() const {
    std::uint64_t total = 0;
    for (const auto& s : sites) total += s.assignment_ops;
    return total;
}

std::uint64_t RunReport::max_site_assignment_ops() const {
    std::uint64_t best = 0;
    for (const auto& s : sites) best = std::max(best, s.assignment_ops);
    return best;
}

nlohmann::json RunReport::to_json(bool include_labels) const {
    nlohmann::json j;
    j["schema_version"] = 1;
    j["mode"] = mode;
    j["dataset"] = dataset;
    j["n"] = n;
    j["dim"] = dim;
    j["r"] = r;
    if (skew)
        j["skew"] = *skew;
    else
        j["skew"] = nullptr;
    j["config"] = config_json(config);
    j["subset_size"] = subset_size;
    j["selected_tau"] = selected_tau;
    j["zero_similarity_points"] = zero_similarity_count;
    if (include_labels) j["labels"] = labels;

    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : ledger.messages)
        msgs.push_back(nlohmann::json{{"from", m.from},
                                      {"to", m.to},
                                      {"kind", to_string(m.kind)},
                                      {"records", m.record_count},
                                      {"bytes", m.byte_count}});
    j["ledger"]["messages"] = msgs;
    j["ledger"]["totals"] = {
        {"records", ledger.total_records()},
        {"bytes", ledger.total_bytes()},
        {"subset_upload_records", ledger.records_of(MessageKind::subset_upload)},
        {"meanmap_broadcast_records", ledger.records_of(MessageKind::meanmap_broadcast)},
        {"model_broadcast_records", ledger.records_of(MessageKind::model_broadcast)},
    };

    j["counters"]["coordinator"] = counters_json(coordinator);
    nlohmann::json site_arr = nlohmann::json::array();
    for (const auto& s : sites) site_arr.push_back(counters_json(s));
    j["counters"]["sites"] = site_arr;
    j["counters"]["total_assignment_ops"] = total_assignment_ops();

    j["timings_ms"] = {{"sample", timings.sample_ms},
                       {"cluster", timings.cluster_ms},
                       {"assign", timings.assign_ms},
                       {"max_site_assign", max_site_assign_ms},
                       {"total", total_ms}};
    if (metrics)
        j["metrics"] = {
            {"nmi", metrics->nmi}, {"ami", metrics->ami}, {"ari", metrics->ari}, {"f1", metrics->f1}};
    else
        j["metrics"] = nullptr;
    return j;
}

namespace {

void attach_metrics(RunReport& report, const Dataset& ds, const RunConfig& cfg) {
    if (cfg.compute_metrics && ds.labels)
        report.metrics = all_metrics(*ds.labels, report.labels);
}

}  // namespace

RunReport run_centralized(const Dataset& ds, const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    RunReport report;
    report.mode = "centralized";
    report.dataset = ds.name;
    report.n = ds.size();
    report.dim = ds.dim();
    report.r = 1;
    report.config = cfg.pipeline;

    PipelineResult result = run_pipeline(ds.points, cfg.pipeline);
    report.labels = std::move(result.labels);
    report.subset_size = result.subset.size();
    report.selected_tau = result.selected_tau;
    report.zero_similarity_count = result.zero_similarity_count;
    report.timings = result.timings;
    report.coordinator =
        SiteCounters{"coordinator", result.kernel_evaluations, 0, result.timings.cluster_ms};
    report.sites.push_back(
        SiteCounters{"site-1", 0, result.assignment_ops, result.timings.assign_ms});
    report.max_site_assign_ms = result.timings.assign_ms;

    attach_metrics(report, ds, cfg);
    report.total_ms = ms_since(t0);
    return report;
}

RunReport run_kdc(const Dataset& ds, const SitePartition& part, const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = ds.size();
    if (part.total_points() != n)
        throw std::invalid_argument("run_kdc: partition does not cover the dataset");

    RunReport report;
    report.mode = "distributed";
    report.dataset = ds.name;
    report.n = n;
    report.dim = ds.dim();
    report.r = part.site_count();
    report.skew = cfg.skew;
    report.config = cfg.pipeline;

    const std::size_t s = effective_subset_size(n, cfg.pipeline);
    const RngStream subset_stream(cfg.pipeline.seed, "subset");

    // Step 1: every site selects the members of the global sample it
    // holds. Per-point priorities are keyed to global ids, so the union
    // over sites equals the centralized draw for any partition.
    auto t_stage = std::chrono::steady_clock::now();
    const SubsetThreshold threshold = subset_threshold(n, s, subset_stream);
    std::vector<std::vector<std::size_t>> site_subsets(part.site_count());
    std::vector<std::size_t> combined;
    combined.reserve(s);
    for (std::size_t ell = 0; ell < part.site_count(); ++ell) {
        site_subsets[ell] =
            sample_below_threshold(part.site_indices[ell], threshold, subset_stream);
        combined.insert(combined.end(), site_subsets[ell].begin(), site_subsets[ell].end());
        report.ledger.add(Message{
            "site-" + std::to_string(ell + 1), "coordinator", MessageKind::subset_upload,
            site_subsets[ell].size(),
            subset_upload_wire_size(site_subsets[ell].size(), ds.dim())});
    }
    std::sort(combined.begin(), combined.end());
    report.subset_size = combined.size();
    report.timings.sample_ms = ms_since(t_stage);

    // Step 2 on the coordinator, over the union in global order.
    t_stage = std::chrono::steady_clock::now();
    const PointMatrix subset_points = ds.points.gather(combined);
    StepTwoOutput step2;
    try {
        step2 = coordinator_step2(subset_points, cfg.pipeline);
    } catch (const std::exception& e) {
        throw std::runtime_error("run_kdc: step-2 failure on coordinator (" +
                                 to_string(cfg.pipeline.plugin.kind) + "): " + e.what());
    }
    report.timings.cluster_ms = ms_since(t_stage);
    report.selected_tau = step2.selected_tau;
    report.coordinator =
        SiteCounters{"coordinator", step2.kernel_evaluations, 0, report.timings.cluster_ms};

    // Broadcast accounting: k mean maps plus the model (chi = psi*t
    // records) to each of the r sites.
    const std::uint64_t mm_bytes =
        static_cast<std::uint64_t>(cfg.pipeline.k) *
        mean_map_wire_size(cfg.pipeline.kernel.psi, cfg.pipeline.kernel.t);
    const std::uint64_t model_bytes =
        model_wire_size(cfg.pipeline.kernel.psi, cfg.pipeline.kernel.t, ds.dim());
    for (std::size_t ell = 0; ell < part.site_count(); ++ell) {
        const std::string site = "site-" + std::to_string(ell + 1);
        report.ledger.add(Message{"coordinator", site, MessageKind::meanmap_broadcast,
                                  static_cast<std::uint64_t>(cfg.pipeline.k), mm_bytes});
        report.ledger.add(Message{"coordinator", site, MessageKind::model_broadcast,
                                  step2.model.feature_dim(), model_bytes});
    }

    // Step 3 independently on each site.
    t_stage = std::chrono::steady_clock::now();
    report.labels.assign(n, 0);
    for (std::size_t ell = 0; ell < part.site_count(); ++ell) {
        const auto site_t0 = std::chrono::steady_clock::now();
        const PointMatrix site_points = ds.points.gather(part.site_indices[ell]);
        AssignmentResult site_result;
        try {
            site_result = assign_points(step2.model, step2, subset_points,
                                        cfg.pipeline.assign_rule, site_points);
        } catch (const std::exception& e) {
            throw std::runtime_error("run_kdc: step-3 failure on site " + std::to_string(ell + 1) +
                                     ": " + e.what());
        }
        for (std::size_t i = 0; i < part.site_indices[ell].size(); ++i)
            report.labels[part.site_indices[ell][i]] = site_result.labels[i];
        report.zero_similarity_count += site_result.zero_similarity_count;
        SiteCounters sc{"site-" + std::to_string(ell + 1), 0, site_result.op_count,
                        ms_since(site_t0)};
        report.max_site_assign_ms = std::max(report.max_site_assign_ms, sc.wall_ms);
        report.sites.push_back(std::move(sc));
    }
    report.timings.assign_ms = ms_since(t_stage);

    attach_metrics(report, ds, cfg);
    report.total_ms = ms_since(t0);
    return report;
}

}  // namespace kdc
