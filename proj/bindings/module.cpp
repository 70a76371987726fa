// Python bindings for the clustering core: numpy in, numpy/dict out.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "kdc/bench.hpp"
#include "kdc/simulation.hpp"
#include "kdc/sweep.hpp"
#include "kdc/synth.hpp"

namespace py = pybind11;
using namespace kdc;

namespace {

PointMatrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("points must be a 2-D array");
    PointMatrix m(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
    std::copy(arr.data(), arr.data() + arr.size(), m.values.begin());
    return m;
}

py::array_t<double> from_matrix(const PointMatrix& m) {
    py::array_t<double> arr({m.rows, m.cols});
    std::copy(m.values.begin(), m.values.end(), arr.mutable_data());
    return arr;
}

std::vector<std::int32_t> to_labels(const py::array_t<std::int32_t, py::array::c_style |
                                                                        py::array::forcecast>& arr) {
    return {arr.data(), arr.data() + arr.size()};
}

py::array_t<std::int32_t> from_labels(const std::vector<std::int32_t>& labels) {
    py::array_t<std::int32_t> arr(
        std::vector<py::ssize_t>{static_cast<py::ssize_t>(labels.size())});
    std::copy(labels.begin(), labels.end(), arr.mutable_data());
    return arr;
}

Dataset make_dataset(const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
                     const py::object& labels, const std::string& name) {
    Dataset ds;
    ds.points = to_matrix(points);
    ds.name = name;
    if (!labels.is_none())
        ds.labels = to_labels(
            labels.cast<py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>>());
    return ds;
}

PipelineConfig make_config(std::int32_t k, std::uint32_t psi, std::uint32_t t,
                           const std::optional<double>& tau, const std::optional<std::size_t>& s,
                           const std::string& plugin, const std::string& assign,
                           std::uint64_t seed, std::int32_t max_iters, double dp_percentile) {
    PipelineConfig cfg;
    cfg.k = k;
    cfg.kernel = KernelConfig{psi, t};
    cfg.plugin.kind = plugin_from_string(plugin);
    cfg.plugin.tau = tau;
    cfg.plugin.max_iters = max_iters;
    cfg.plugin.dp_percentile = dp_percentile;
    cfg.subset_size = s;
    cfg.assign_rule = assign_rule_from_string(assign);
    cfg.seed = seed;
    return cfg;
}

py::object json_to_py(const nlohmann::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

py::tuple dataset_tuple(const Dataset& ds) {
    return py::make_tuple(from_matrix(ds.points),
                          ds.labels ? py::object(from_labels(*ds.labels)) : py::none(), ds.name);
}

}  // namespace

PYBIND11_MODULE(_kdc, m) {
    m.doc() = "distributional-kernel clustering: isolation-kernel mean maps, kernel-bounded "
              "cluster cores, and a deterministic multi-site simulation";

    py::class_<IsolationKernelModel>(m, "IsolationKernelModel")
        .def_readonly("psi", &IsolationKernelModel::psi)
        .def_readonly("t", &IsolationKernelModel::t)
        .def_readonly("dim", &IsolationKernelModel::dim)
        .def_property_readonly("feature_dim", &IsolationKernelModel::feature_dim);

    py::class_<MeanMap>(m, "MeanMap")
        .def_readonly("psi", &MeanMap::psi)
        .def_readonly("t", &MeanMap::t)
        .def_readonly("support_size", &MeanMap::support_size)
        .def_property_readonly("weights", [](const MeanMap& mm) {
            py::array_t<double> arr(
                std::vector<py::ssize_t>{static_cast<py::ssize_t>(mm.weights.size())});
            std::copy(mm.weights.begin(), mm.weights.end(), arr.mutable_data());
            return arr;
        });

    py::class_<ClusterCores>(m, "ClusterCores")
        .def_readonly("tau", &ClusterCores::tau)
        .def_readonly("cores", &ClusterCores::cores)
        .def_readonly("mean_maps", &ClusterCores::mean_maps)
        .def_property_readonly("core_count", &ClusterCores::core_count);

    m.def(
        "fit_isolation_kernel",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
           std::uint32_t psi, std::uint32_t t, std::uint64_t seed) {
            return fit_isolation_kernel(to_matrix(points), psi, t, RngStream(seed, "kernel-fit"));
        },
        py::arg("points"), py::arg("psi") = 16, py::arg("t") = 200, py::arg("seed") = 1,
        "Fit t Voronoi partitionings of psi anchors sampled from the data.");

    m.def(
        "embed",
        [](const IsolationKernelModel& model,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& points) {
            const auto mat = to_matrix(points);
            const auto cells = embed_matrix(model, mat);
            py::array_t<std::uint16_t> arr({mat.rows, static_cast<std::size_t>(model.t)});
            std::copy(cells.begin(), cells.end(), arr.mutable_data());
            return arr;
        },
        py::arg("model"), py::arg("points"),
        "Active cell per partitioning for every row (n x t).");

    m.def(
        "kernel_value",
        [](const IsolationKernelModel& model,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& y) {
            return kernel_value(model, {x.data(), static_cast<std::size_t>(x.size())},
                                {y.data(), static_cast<std::size_t>(y.size())});
        },
        py::arg("model"), py::arg("x"), py::arg("y"),
        "Fraction of partitionings in which x and y share a cell.");

    m.def(
        "mean_map",
        [](const IsolationKernelModel& model,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& points) {
            return mean_map(model, to_matrix(points));
        },
        py::arg("model"), py::arg("points"), "Kernel mean embedding of a point set.");

    m.def(
        "point_set_similarity",
        [](const IsolationKernelModel& model,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const MeanMap& mm) {
            return point_set_similarity(model, {x.data(), static_cast<std::size_t>(x.size())}, mm);
        },
        py::arg("model"), py::arg("x"), py::arg("mean_map"),
        "Similarity between a point and a set's distribution; equals the "
        "average kernel value against the set.");

    m.def(
        "kbcc_cluster",
        [](const IsolationKernelModel& model,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
           std::size_t k, double tau) { return kbcc_cluster(model, to_matrix(points), k, tau); },
        py::arg("model"), py::arg("points"), py::arg("k"), py::arg("tau"),
        "k largest kernel-bounded cluster cores of the subset at threshold tau.");

    m.def(
        "select_tau",
        [](const IsolationKernelModel& model,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
           std::size_t k) { return select_tau(model, to_matrix(points), k); },
        py::arg("model"), py::arg("points"), py::arg("k"),
        "Coverage-maximising threshold on the 1/t grid.");

    m.def(
        "kmeans",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
           std::int32_t k, std::int32_t max_iters, std::uint64_t seed) {
            return from_labels(kmeans(to_matrix(points), k, max_iters, RngStream(seed, "plugin"))
                                   .assignment);
        },
        py::arg("points"), py::arg("k"), py::arg("max_iters") = 100, py::arg("seed") = 1,
        "Lloyd's algorithm with k-means++ seeding; labels in 1..k.");

    m.def(
        "kernel_kmeans",
        [](const IsolationKernelModel& model,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
           std::int32_t k, std::int32_t max_iters, std::uint64_t seed) {
            return from_labels(kernel_kmeans(model, to_matrix(points), k, max_iters,
                                             RngStream(seed, "plugin"))
                                   .assignment);
        },
        py::arg("model"), py::arg("points"), py::arg("k"), py::arg("max_iters") = 100,
        py::arg("seed") = 1, "Lloyd's algorithm on the explicit isolation-kernel features.");

    m.def(
        "density_peak",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
           std::int32_t k, double d_c_percentile) {
            return from_labels(density_peak(to_matrix(points), k, d_c_percentile).assignment);
        },
        py::arg("points"), py::arg("k"), py::arg("d_c_percentile") = 0.02,
        "Density-peak clustering with a Gaussian density estimate.");

    m.def(
        "assign_distribution",
        [](const IsolationKernelModel& model, const ClusterCores& cores,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& points) {
            const auto result = assign_distribution(model, cores.mean_maps, to_matrix(points));
            return py::make_tuple(from_labels(result.labels), result.zero_similarity_count);
        },
        py::arg("model"), py::arg("cores"), py::arg("points"),
        "Label every point with its most similar core distribution; returns "
        "(labels, zero_similarity_count).");

    m.def(
        "assign_center",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& subset,
           const std::vector<std::vector<std::size_t>>& groups,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& points) {
            const auto sub = to_matrix(subset);
            return from_labels(
                assign_center(group_centroids(sub, groups), sub.cols, to_matrix(points)).labels);
        },
        py::arg("subset"), py::arg("groups"), py::arg("points"),
        "Center-based baseline: label of the nearest group centroid.");

    m.def(
        "nmi",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& a,
           const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& b) {
            return nmi(to_labels(a), to_labels(b));
        },
        py::arg("truth"), py::arg("predicted"));
    m.def(
        "ami",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& a,
           const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& b) {
            return ami(to_labels(a), to_labels(b));
        },
        py::arg("truth"), py::arg("predicted"));
    m.def(
        "ari",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& a,
           const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& b) {
            return ari(to_labels(a), to_labels(b));
        },
        py::arg("truth"), py::arg("predicted"));
    m.def(
        "pairwise_f1",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& a,
           const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& b) {
            return pairwise_f1(to_labels(a), to_labels(b));
        },
        py::arg("truth"), py::arg("predicted"));

    m.def(
        "normalize_unit_range",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points) {
            Dataset ds;
            ds.points = to_matrix(points);
            return from_matrix(normalize_unit_range(ds).points);
        },
        py::arg("points"), "Map each dimension onto [0,1]; constant dimensions go to 0.");

    m.def(
        "load_csv",
        [](const std::string& path, const std::optional<std::size_t>& label_column,
           bool has_header) {
            CsvOptions opts;
            opts.label_column = label_column;
            opts.has_header = has_header;
            return dataset_tuple(load_csv(path, opts));
        },
        py::arg("path"), py::arg("label_column") = py::none(), py::arg("has_header") = false,
        "Returns (points, labels or None, name).");

    m.def(
        "run_centralized",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
           const py::object& labels, std::int32_t k, std::uint32_t psi, std::uint32_t t,
           const std::optional<double>& tau, const std::optional<std::size_t>& s,
           const std::string& plugin, const std::string& assign, std::uint64_t seed,
           std::int32_t max_iters, double dp_percentile, bool include_labels) {
            RunConfig cfg;
            cfg.pipeline =
                make_config(k, psi, t, tau, s, plugin, assign, seed, max_iters, dp_percentile);
            const auto report =
                run_centralized(make_dataset(points, labels, "python"), cfg);
            return json_to_py(report.to_json(include_labels));
        },
        py::arg("points"), py::arg("labels") = py::none(), py::arg("k") = 2, py::arg("psi") = 16,
        py::arg("t") = 200, py::arg("tau") = py::none(), py::arg("s") = py::none(),
        py::arg("plugin") = "kbcc", py::arg("assign") = "distribution", py::arg("seed") = 1,
        py::arg("max_iters") = 100, py::arg("dp_percentile") = 0.02,
        py::arg("include_labels") = true,
        "Whole pipeline on one logical site; returns the run report as a dict.");

    m.def(
        "run_kdc",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& points,
           const py::object& labels, std::size_t r, const std::optional<double>& skew,
           std::int32_t k, std::uint32_t psi, std::uint32_t t, const std::optional<double>& tau,
           const std::optional<std::size_t>& s, const std::string& plugin,
           const std::string& assign, std::uint64_t seed, std::int32_t max_iters,
           double dp_percentile, bool include_labels) {
            RunConfig cfg;
            cfg.pipeline =
                make_config(k, psi, t, tau, s, plugin, assign, seed, max_iters, dp_percentile);
            cfg.skew = skew;
            const Dataset ds = make_dataset(points, labels, "python");
            const auto part = partition_sites(ds.size(), r, skew, RngStream(seed, "partitioning"));
            return json_to_py(run_kdc(ds, part, cfg).to_json(include_labels));
        },
        py::arg("points"), py::arg("labels") = py::none(), py::arg("r") = 20,
        py::arg("skew") = py::none(), py::arg("k") = 2, py::arg("psi") = 16, py::arg("t") = 200,
        py::arg("tau") = py::none(), py::arg("s") = py::none(), py::arg("plugin") = "kbcc",
        py::arg("assign") = "distribution", py::arg("seed") = 1, py::arg("max_iters") = 100,
        py::arg("dp_percentile") = 0.02, py::arg("include_labels") = true,
        "Distributed run over r simulated sites; returns the run report as a dict.");

    m.def(
        "make_blobs",
        [](std::size_t n, std::size_t d, std::int32_t k, double spread, std::uint64_t seed) {
            return dataset_tuple(make_blobs(n, d, k, spread, seed));
        },
        py::arg("n"), py::arg("d") = 2, py::arg("k") = 3, py::arg("spread") = 0.02,
        py::arg("seed") = 1);
    m.def(
        "make_two_moons",
        [](std::size_t n_dense, std::size_t n_sparse, double noise_dense, double noise_sparse,
           std::uint64_t seed) {
            return dataset_tuple(make_two_moons(n_dense, n_sparse, noise_dense, noise_sparse, seed));
        },
        py::arg("n_dense") = 260, py::arg("n_sparse") = 113, py::arg("noise_dense") = 0.05,
        py::arg("noise_sparse") = 0.08, py::arg("seed") = 7);
    m.def(
        "make_nine_shapes", [](std::uint64_t seed) { return dataset_tuple(make_nine_shapes(seed)); },
        py::arg("seed") = 9);

    m.attr("__version__") = "0.1.0";
}
