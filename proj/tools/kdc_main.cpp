// kdc: distributional-kernel clustering over simulated sites.
//
// Subcommands: run, sweep, equivalence, dump-assignments, bench-step3,
// bench-property-b, gen-data. Exit codes: 0 ok, 1 pipeline error, 2 usage.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "kdc/bench.hpp"
#include "kdc/simulation.hpp"
#include "kdc/sweep.hpp"
#include "kdc/synth.hpp"

using namespace kdc;

namespace {

struct DataOptions {
    std::string path;
    int label_col = -1;
    bool header = false;
    bool no_normalize = false;
};

struct PipelineOptions {
    std::int32_t k = 2;
    std::uint32_t psi = 16;
    std::uint32_t t = 200;
    double tau = -1.0;  // < 0 means automatic coverage-based choice
    std::int64_t s = -1;
    std::string plugin = "kbcc";
    std::string assign = "distribution";
    std::uint64_t seed = 1;
    std::int32_t max_iters = 100;
    double dp_percentile = 0.02;
};

void add_data_options(CLI::App* cmd, DataOptions& opts) {
    cmd->add_option("--data", opts.path, "CSV dataset path")->required();
    cmd->add_option("--label-col", opts.label_col,
                    "0-based index of the ground-truth label column (-1 = none)");
    cmd->add_flag("--header", opts.header, "skip a header row");
    cmd->add_flag("--no-normalize", opts.no_normalize,
                  "skip the per-dimension [0,1] normalization");
}

void add_pipeline_options(CLI::App* cmd, PipelineOptions& opts) {
    cmd->add_option("--k", opts.k, "number of clusters")->required();
    cmd->add_option("--psi", opts.psi, "cells per partitioning");
    cmd->add_option("--t", opts.t, "number of partitionings");
    cmd->add_option("--tau", opts.tau, "similarity threshold for kbcc (default: automatic)");
    cmd->add_option("--s", opts.s, "subset size (default: min(n, 10000))");
    cmd->add_option("--plugin", opts.plugin, "step-2 clustering algorithm")
        ->check(CLI::IsMember({"kbcc", "kmeans", "kernel-kmeans", "dp"}));
    cmd->add_option("--assign", opts.assign, "step-3 point assignment rule")
        ->check(CLI::IsMember({"distribution", "center"}));
    cmd->add_option("--seed", opts.seed, "master seed");
    cmd->add_option("--max-iters", opts.max_iters, "Lloyd iteration cap");
    cmd->add_option("--dp-percentile", opts.dp_percentile, "density-peak cutoff percentile");
}

Dataset load_dataset(const DataOptions& opts) {
    CsvOptions csv;
    if (opts.label_col >= 0) csv.label_column = static_cast<std::size_t>(opts.label_col);
    csv.has_header = opts.header;
    Dataset ds = load_csv(opts.path, csv);
    return opts.no_normalize ? ds : normalize_unit_range(ds);
}

PipelineConfig make_pipeline_config(const PipelineOptions& opts) {
    PipelineConfig cfg;
    cfg.k = opts.k;
    cfg.kernel = KernelConfig{opts.psi, opts.t};
    if (opts.s >= 0) cfg.subset_size = static_cast<std::size_t>(opts.s);
    cfg.plugin.kind = plugin_from_string(opts.plugin);
    if (opts.tau >= 0.0) cfg.plugin.tau = opts.tau;
    cfg.plugin.max_iters = opts.max_iters;
    cfg.plugin.dp_percentile = opts.dp_percentile;
    cfg.assign_rule = assign_rule_from_string(opts.assign);
    cfg.seed = opts.seed;
    return cfg;
}

void write_output(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << content;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---- run ----

int cmd_run(const DataOptions& data_opts, const PipelineOptions& pipe_opts,
            const std::string& mode, std::size_t r, double skew, std::uint32_t trials,
            const std::string& out_path, bool no_labels) {
    const Dataset ds = load_dataset(data_opts);
    RunConfig cfg;
    cfg.pipeline = make_pipeline_config(pipe_opts);
    if (skew >= 0.0) cfg.skew = skew;

    nlohmann::json output;
    output["schema_version"] = 1;
    output["command"] = "run";
    output["dataset"] = {{"name", ds.name}, {"n", ds.size()}, {"dim", ds.dim()}};
    output["mode"] = mode;
    output["trials"] = trials;
    output["base_seed"] = pipe_opts.seed;

    nlohmann::json runs = nlohmann::json::array();
    std::vector<MetricScores> scores;
    for (std::uint32_t trial = 0; trial < trials; ++trial) {
        cfg.pipeline.seed = pipe_opts.seed + trial;
        RunReport report;
        if (mode == "centralized") {
            report = run_centralized(ds, cfg);
        } else {
            const auto part = partition_sites(ds.size(), r, cfg.skew,
                                              RngStream(cfg.pipeline.seed, "partitioning"));
            report = run_kdc(ds, part, cfg);
        }
        if (report.metrics) scores.push_back(*report.metrics);
        runs.push_back(report.to_json(!no_labels));
    }
    output["runs"] = runs;

    if (!scores.empty()) {
        auto mean = [&](double MetricScores::*field) {
            double total = 0.0;
            for (const auto& s : scores) total += s.*field;
            return total / static_cast<double>(scores.size());
        };
        output["mean_metrics"] = {{"nmi", mean(&MetricScores::nmi)},
                                  {"ami", mean(&MetricScores::ami)},
                                  {"ari", mean(&MetricScores::ari)},
                                  {"f1", mean(&MetricScores::f1)}};
    }
    write_output(out_path, output.dump(2) + "\n");
    return 0;
}

// ---- sweep ----

int cmd_sweep(const DataOptions& data_opts, const PipelineOptions& pipe_opts,
              std::vector<std::uint32_t> psi_grid, std::vector<std::uint32_t> t_grid,
              std::vector<double> tau_grid, std::uint32_t trials, const std::string& out_path) {
    const Dataset ds = load_dataset(data_opts);
    if (!ds.labels) throw std::runtime_error("sweep needs a labeled dataset (--label-col)");
    PipelineConfig base = make_pipeline_config(pipe_opts);

    if (psi_grid.empty()) psi_grid = {2, 4, 8, 16, 32, 64};
    if (t_grid.empty()) t_grid = {pipe_opts.t};
    if (tau_grid.empty()) {
        // multiples of 1/t spread across the whole (0,1) range
        const std::uint32_t t = t_grid.front();
        const std::uint32_t step = std::max(1u, t / 24);
        for (std::uint32_t j = step; j < t; j += step)
            tau_grid.push_back(static_cast<double>(j) / t);
    }
    std::vector<std::uint64_t> seeds;
    for (std::uint32_t i = 0; i < trials; ++i) seeds.push_back(pipe_opts.seed + i);

    const auto rows = run_sweep(ds, base, psi_grid, t_grid, tau_grid, seeds);

    std::string csv =
        "psi,t,tau,trials,failures,nmi_mean,nmi_median,ami_mean,ari_mean,f1_mean,coverage_mean,"
        "best\n";
    for (const auto& row : rows) {
        csv += std::to_string(row.psi) + "," + std::to_string(row.t) + ",";
        csv += row.tau ? format_double(*row.tau) : std::string("");
        csv += "," + std::to_string(row.trials) + "," + std::to_string(row.failures) + ",";
        csv += format_double(row.nmi_mean()) + "," + format_double(row.nmi_median()) + ",";
        csv += format_double(row.ami_mean()) + "," + format_double(row.ari_mean()) + ",";
        csv += format_double(row.f1_mean()) + "," + format_double(row.coverage_mean) + ",";
        csv += row.best ? "1" : "0";
        csv += "\n";
    }
    write_output(out_path, csv);
    return 0;
}

// ---- equivalence ----

int cmd_equivalence(const DataOptions& data_opts, const PipelineOptions& pipe_opts,
                    const std::vector<std::size_t>& r_values, double skew,
                    const std::vector<std::uint64_t>& seeds, bool mismatch_seeds) {
    const Dataset ds = load_dataset(data_opts);
    RunConfig cfg;
    cfg.pipeline = make_pipeline_config(pipe_opts);
    cfg.compute_metrics = false;

    bool all_ok = true;
    for (const std::uint64_t seed : seeds) {
        cfg.pipeline.seed = seed;
        const auto central = run_centralized(ds, cfg);
        for (const std::size_t r : r_values) {
            for (const bool use_skew : {false, true}) {
                if (use_skew && skew < 0.0) continue;
                std::optional<double> sk;
                if (use_skew) sk = skew;
                const auto part =
                    partition_sites(ds.size(), r, sk, RngStream(seed, "partitioning"));
                RunConfig dist_cfg = cfg;
                dist_cfg.skew = sk;
                if (mismatch_seeds) dist_cfg.pipeline.seed = seed + 1000003;  // negative control
                const auto dist = run_kdc(ds, part, dist_cfg);
                const bool ok = dist.labels == central.labels;
                all_ok = all_ok && ok;
                std::printf("%s seed=%llu r=%zu skew=%s : %s\n", ok ? "PASS" : "FAIL",
                            static_cast<unsigned long long>(seed), r,
                            use_skew ? format_double(skew).c_str() : "even",
                            ok ? "labels identical" : "labels differ");
            }
        }
    }
    std::printf("%s\n", all_ok ? "EQUIVALENCE PASS" : "EQUIVALENCE FAIL");
    return all_ok ? 0 : 1;
}

// ---- dump-assignments ----

int cmd_dump_assignments(const DataOptions& data_opts, const PipelineOptions& pipe_opts,
                         const std::string& out_path) {
    const Dataset ds = load_dataset(data_opts);
    RunConfig cfg;
    cfg.pipeline = make_pipeline_config(pipe_opts);
    const auto report = run_centralized(ds, cfg);

    std::string csv;
    for (std::size_t c = 0; c < ds.dim(); ++c) csv += "x" + std::to_string(c) + ",";
    csv += "true_label,predicted_label\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (std::size_t c = 0; c < ds.dim(); ++c) csv += format_double(ds.points.row(i)[c]) + ",";
        csv += ds.labels ? std::to_string((*ds.labels)[i]) : std::string("-1");
        csv += "," + std::to_string(report.labels[i]) + "\n";
    }
    write_output(out_path, csv);
    return 0;
}

// ---- benches ----

int cmd_bench_step3(const std::vector<std::size_t>& sizes, std::size_t s, std::int32_t k,
                    std::uint32_t psi, std::uint32_t t, std::uint64_t seed,
                    const std::string& out_path) {
    const auto result = bench_step3_scaling(sizes, s, k, KernelConfig{psi, t}, seed);
    std::string csv = "n,assignment_ops,assign_ms,cluster_ms\n";
    for (const auto& row : result.rows)
        csv += std::to_string(row.n) + "," + std::to_string(row.assignment_ops) + "," +
               format_double(row.assign_ms) + "," + format_double(row.cluster_ms) + "\n";
    write_output(out_path, csv);
    std::fprintf(stderr, "log-log slope of assign time vs n: %.3f\n", result.loglog_slope);
    return 0;
}

int cmd_bench_property_b(const DataOptions& data_opts, const PipelineOptions& pipe_opts,
                         std::size_t synthetic_n, const std::vector<std::size_t>& r_values,
                         double skew, const std::string& out_path) {
    Dataset ds;
    if (!data_opts.path.empty()) {
        ds = load_dataset(data_opts);
    } else {
        ds = make_blobs(synthetic_n, 4, pipe_opts.k, 0.02, pipe_opts.seed, "synthetic-blobs");
    }
    RunConfig cfg;
    cfg.pipeline = make_pipeline_config(pipe_opts);
    cfg.compute_metrics = false;
    std::optional<double> sk;
    if (skew >= 0.0) sk = skew;

    const auto rows = bench_property_b(ds, r_values, cfg, sk);
    std::string csv = "r,centralized_ops,max_site_ops,centralized_assign_ms,max_site_assign_ms\n";
    for (const auto& row : rows)
        csv += std::to_string(row.r) + "," + std::to_string(row.centralized_ops) + "," +
               std::to_string(row.max_site_ops) + "," + format_double(row.centralized_assign_ms) +
               "," + format_double(row.max_site_assign_ms) + "\n";
    write_output(out_path, csv);
    return 0;
}

// ---- gen-data ----

int cmd_gen_data(const std::string& out_dir) {
    const auto jain = make_two_moons(260, 113, 0.05, 0.08, 7, "jain");
    const auto complex9 = make_nine_shapes(9, "complex9");
    const auto blobs = make_blobs(2000, 4, 5, 0.02, 11, "blobs");
    save_csv(out_dir + "/jain.csv", jain);
    save_csv(out_dir + "/complex9.csv", complex9);
    save_csv(out_dir + "/blobs.csv", blobs);
    std::printf("wrote %s/{jain,complex9,blobs}.csv\n", out_dir.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"distributional-kernel clustering: centralized and simulated-distributed runs"};
    app.require_subcommand(1);

    // run
    DataOptions run_data;
    PipelineOptions run_pipe;
    std::string run_mode = "centralized";
    std::size_t run_r = 20;
    double run_skew = -1.0;
    std::uint32_t run_trials = 5;
    std::string run_out;
    bool run_no_labels = false;
    auto* run_cmd = app.add_subcommand("run", "run one experiment and emit a JSON report");
    add_data_options(run_cmd, run_data);
    add_pipeline_options(run_cmd, run_pipe);
    run_cmd->add_option("--mode", run_mode)->check(CLI::IsMember({"centralized", "distributed"}));
    run_cmd->add_option("--r", run_r, "site count (distributed mode)");
    run_cmd->add_option("--skew", run_skew, "fraction of data on site 1 (distributed mode)");
    run_cmd->add_option("--trials", run_trials, "trial count with derived seeds");
    run_cmd->add_option("--out", run_out, "output file (default stdout)");
    run_cmd->add_flag("--no-labels", run_no_labels, "omit per-point labels from the report");

    // sweep
    DataOptions sweep_data;
    PipelineOptions sweep_pipe;
    std::vector<std::uint32_t> sweep_psi, sweep_t;
    std::vector<double> sweep_tau;
    std::uint32_t sweep_trials = 5;
    std::string sweep_out;
    auto* sweep_cmd = app.add_subcommand("sweep", "grid-search (psi, t, tau) and emit CSV");
    add_data_options(sweep_cmd, sweep_data);
    add_pipeline_options(sweep_cmd, sweep_pipe);
    sweep_cmd->add_option("--psi-grid", sweep_psi, "psi values (default 2,4,8,16,32,64)");
    sweep_cmd->add_option("--t-grid", sweep_t, "t values (default --t)");
    sweep_cmd->add_option("--tau-grid", sweep_tau, "tau values (default multiples of 1/t)");
    sweep_cmd->add_option("--trials", sweep_trials);
    sweep_cmd->add_option("--out", sweep_out, "output CSV (default stdout)");

    // equivalence
    DataOptions eq_data;
    PipelineOptions eq_pipe;
    std::vector<std::size_t> eq_r{1, 4, 20};
    double eq_skew = 0.5;
    std::vector<std::uint64_t> eq_seeds{1, 2, 3};
    bool eq_mismatch = false;
    auto* eq_cmd = app.add_subcommand(
        "equivalence", "check distributed labels equal centralized labels bit for bit");
    add_data_options(eq_cmd, eq_data);
    add_pipeline_options(eq_cmd, eq_pipe);
    eq_cmd->add_option("--r-list", eq_r, "site counts to test");
    eq_cmd->add_option("--skew", eq_skew, "also test this skew (-1 disables)");
    eq_cmd->add_option("--seeds", eq_seeds, "master seeds to test");
    eq_cmd->add_flag("--mismatch-seeds", eq_mismatch,
                     "negative control: run distributed with a different seed");

    // dump-assignments
    DataOptions dump_data;
    PipelineOptions dump_pipe;
    std::string dump_out;
    auto* dump_cmd =
        app.add_subcommand("dump-assignments", "per-point CSV of coordinates and labels");
    add_data_options(dump_cmd, dump_data);
    add_pipeline_options(dump_cmd, dump_pipe);
    dump_cmd->add_option("--out", dump_out, "output CSV (default stdout)");

    // bench-step3
    std::vector<std::size_t> bs_sizes{10000, 100000, 1000000};
    std::size_t bs_s = 2000;
    std::int32_t bs_k = 10;
    std::uint32_t bs_psi = 8, bs_t = 64;
    std::uint64_t bs_seed = 1;
    std::string bs_out;
    auto* bs_cmd = app.add_subcommand("bench-step3", "step-3 scaling against n at fixed s");
    bs_cmd->add_option("--sizes", bs_sizes, "ascending point counts");
    bs_cmd->add_option("--s", bs_s);
    bs_cmd->add_option("--k", bs_k);
    bs_cmd->add_option("--psi", bs_psi);
    bs_cmd->add_option("--t", bs_t);
    bs_cmd->add_option("--seed", bs_seed);
    bs_cmd->add_option("--out", bs_out);

    // bench-property-b
    DataOptions pb_data;
    PipelineOptions pb_pipe;
    std::size_t pb_n = 100000;
    std::vector<std::size_t> pb_r{2, 4, 20};
    double pb_skew = -1.0;
    std::string pb_out;
    auto* pb_cmd =
        app.add_subcommand("bench-property-b", "max-site step-3 cost vs the centralized cost");
    pb_cmd->add_option("--data", pb_data.path, "CSV dataset (default: synthetic blobs)");
    pb_cmd->add_option("--label-col", pb_data.label_col);
    pb_cmd->add_flag("--header", pb_data.header);
    add_pipeline_options(pb_cmd, pb_pipe);
    pb_cmd->add_option("--n", pb_n, "synthetic dataset size when --data is absent");
    pb_cmd->add_option("--r-list", pb_r);
    pb_cmd->add_option("--skew", pb_skew);
    pb_cmd->add_option("--out", pb_out);

    // gen-data
    std::string gen_dir = "data";
    auto* gen_cmd = app.add_subcommand("gen-data", "regenerate the bundled benchmark CSVs");
    gen_cmd->add_option("--out-dir", gen_dir);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (run_cmd->parsed())
            return cmd_run(run_data, run_pipe, run_mode, run_r, run_skew, run_trials, run_out,
                           run_no_labels);
        if (sweep_cmd->parsed())
            return cmd_sweep(sweep_data, sweep_pipe, sweep_psi, sweep_t, sweep_tau, sweep_trials,
                             sweep_out);
        if (eq_cmd->parsed())
            return cmd_equivalence(eq_data, eq_pipe, eq_r, eq_skew, eq_seeds, eq_mismatch);
        if (dump_cmd->parsed()) return cmd_dump_assignments(dump_data, dump_pipe, dump_out);
        if (bs_cmd->parsed())
            return cmd_bench_step3(bs_sizes, bs_s, bs_k, bs_psi, bs_t, bs_seed, bs_out);
        if (pb_cmd->parsed())
            return cmd_bench_property_b(pb_data, pb_pipe, pb_n, pb_r, pb_skew, pb_out);
        if (gen_cmd->parsed()) return cmd_gen_data(gen_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 2;
}
