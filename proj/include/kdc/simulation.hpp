#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kdc/dataset.hpp"
#include "kdc/metrics.hpp"
#include "kdc/pipeline.hpp"

namespace kdc {

enum class MessageKind { subset_upload, meanmap_broadcast, model_broadcast };

std::string to_string(MessageKind kind);

/// One logical transmission between a site and the coordinator.
struct Message {
    std::string from;
    std::string to;
    MessageKind kind = MessageKind::subset_upload;
    std::uint64_t record_count = 0;
    std::uint64_t byte_count = 0;
};

/// Ordered record of every transmission in a run, with per-kind totals.
struct CommLedger {
    std::vector<Message> messages;

    void add(Message m) { messages.push_back(std::move(m)); }
    std::uint64_t total_records() const;
    std::uint64_t total_bytes() const;
    std::uint64_t records_of(MessageKind kind) const;
};

struct SiteCounters {
    std::string name;
    std::uint64_t kernel_evaluations = 0;
    std::uint64_t assignment_ops = 0;
    double wall_ms = 0.0;
};

struct RunConfig {
    PipelineConfig pipeline;
    bool compute_metrics = true;
    std::optional<double> skew;  // echoed into the report; the partition itself decides
};

/// Everything a run produces: global labels, the communication ledger,
/// per-actor counters and timings, and metric scores when ground truth is
/// available. Serializes to a single JSON document.
struct RunReport {
    std::string mode;  // "centralized" or "distributed"
    std::string dataset;
    std::size_t n = 0;
    std::size_t dim = 0;
    std::size_t r = 1;
    std::optional<double> skew;
    PipelineConfig config;

    std::vector<std::int32_t> labels;  // global point order
    std::size_t subset_size = 0;
    double selected_tau = -1.0;
    std::size_t zero_similarity_count = 0;

    CommLedger ledger;
    SiteCounters coordinator;
    std::vector<SiteCounters> sites;
    StageTimings timings;
    double max_site_assign_ms = 0.0;
    double total_ms = 0.0;
    std::optional<MetricScores> metrics;

    std::uint64_t total_assignment_ops() const;
    std::uint64_t max_site_assignment_ops() const;
    nlohmann::json to_json(bool include_labels = true) const;
};

/// Framework run on the whole dataset as one logical site: no messages,
/// same pipeline, counters and timings recorded.
RunReport run_centralized(const Dataset& ds, const RunConfig& cfg);

/// Distributed run over the given partition: each site contributes its
/// share of the globally-chosen subset (step 1), the coordinator fits the
/// kernel and clusters the combined subset (step 2), every site labels its
/// own points against the broadcast mean maps (step 3). Labels come back
/// in global point order, bit-identical to the centralized run under the
/// same seed.
RunReport run_kdc(const Dataset& ds, const SitePartition& part, const RunConfig& cfg);

}  // namespace kdc
