#include "kdc/isolation_kernel.hpp"

#include <algorithm>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace kdc {

namespace {

// Hash of a row's raw coordinate values, for de-duplication during fit.
struct RowRef {
    const double* data;
    std::size_t dim;
};

struct RowHash {
    std::size_t operator()(const RowRef& r) const {
        std::uint64_t h = 0x9E3779B97F4A7C15ULL;
        for (std::size_t i = 0; i < r.dim; ++i) {
            std::uint64_t bits;
            double v = r.data[i];
            if (v == 0.0) v = 0.0;  // collapse -0.0 onto +0.0
            std::memcpy(&bits, &v, sizeof(bits));
            h = mix64(h ^ bits);
        }
        return static_cast<std::size_t>(h);
    }
};

struct RowEq {
    bool operator()(const RowRef& a, const RowRef& b) const {
        return std::equal(a.data, a.data + a.dim, b.data);
    }
};

}  // namespace

IsolationKernelModel fit_isolation_kernel(const PointMatrix& points, std::uint32_t psi,
                                          std::uint32_t t, const RngStream& rng) {
    if (psi < 2) throw std::invalid_argument("fit_isolation_kernel: psi must be >= 2");
    if (t < 1) throw std::invalid_argument("fit_isolation_kernel: t must be >= 1");
    if (psi > std::numeric_limits<std::uint16_t>::max())
        throw std::invalid_argument("fit_isolation_kernel: psi exceeds cell index range");

    // Distinct rows, in order of first occurrence, so identical data yields
    // identical anchor pools no matter how duplicates are spread.
    std::vector<std::size_t> distinct;
    {
        std::unordered_map<RowRef, std::size_t, RowHash, RowEq> seen;
        seen.reserve(points.rows * 2);
        for (std::size_t i = 0; i < points.rows; ++i) {
            RowRef ref{points.row(i), points.cols};
            if (seen.emplace(ref, i).second) distinct.push_back(i);
        }
    }
    if (distinct.size() < psi)
        throw std::invalid_argument("fit_isolation_kernel: only " + std::to_string(distinct.size()) +
                                    " distinct points, need at least psi=" + std::to_string(psi));

    IsolationKernelModel model;
    model.psi = psi;
    model.t = t;
    model.dim = points.cols;
    model.anchors.resize(static_cast<std::size_t>(psi) * t * points.cols);

    auto eng = rng.engine();
    std::vector<std::size_t> pool = distinct;
    for (std::uint32_t p = 0; p < t; ++p) {
        // partial Fisher-Yates: first psi entries become this partitioning's anchors
        for (std::uint32_t c = 0; c < psi; ++c) {
            const std::size_t j = c + static_cast<std::size_t>(uniform_below(eng, pool.size() - c));
            std::swap(pool[c], pool[j]);
            const double* src = points.row(pool[c]);
            std::copy(src, src + points.cols,
                      model.anchors.data() + (static_cast<std::size_t>(p) * psi + c) * points.cols);
        }
    }
    return model;
}

void embed_point_into(const IsolationKernelModel& model, const double* x, std::uint16_t* out) {
    const std::size_t d = model.dim;
    for (std::uint32_t p = 0; p < model.t; ++p) {
        const double* block = model.anchors.data() + static_cast<std::size_t>(p) * model.psi * d;
        std::uint32_t best = 0;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::uint32_t c = 0; c < model.psi; ++c) {
            const double* a = block + static_cast<std::size_t>(c) * d;
            double dist = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                const double diff = x[j] - a[j];
                dist += diff * diff;
            }
            if (dist < best_dist) {  // strict: ties keep the lowest index
                best_dist = dist;
                best = c;
            }
        }
        out[p] = static_cast<std::uint16_t>(best);
    }
}

FeatureMap embed_point(const IsolationKernelModel& model, std::span<const double> x) {
    if (x.size() != model.dim)
        throw std::invalid_argument("embed_point: point dimension " + std::to_string(x.size()) +
                                    " does not match model dimension " + std::to_string(model.dim));
    FeatureMap fm;
    fm.active_cells.resize(model.t);
    embed_point_into(model, x.data(), fm.active_cells.data());
    return fm;
}

std::vector<std::uint16_t> embed_matrix(const IsolationKernelModel& model,
                                        const PointMatrix& points) {
    if (points.cols != model.dim)
        throw std::invalid_argument("embed_matrix: dimension mismatch");
    std::vector<std::uint16_t> cells(points.rows * model.t);
    for (std::size_t i = 0; i < points.rows; ++i)
        embed_point_into(model, points.row(i), cells.data() + i * model.t);
    return cells;
}

std::uint32_t match_count(const std::uint16_t* a, const std::uint16_t* b, std::uint32_t t) {
    std::uint32_t m = 0;
    for (std::uint32_t p = 0; p < t; ++p) m += (a[p] == b[p]);
    return m;
}

double kernel_value(const IsolationKernelModel& model, std::span<const double> x,
                    std::span<const double> y) {
    const FeatureMap fx = embed_point(model, x);
    const FeatureMap fy = embed_point(model, y);
    return static_cast<double>(match_count(fx.active_cells.data(), fy.active_cells.data(), model.t)) /
           static_cast<double>(model.t);
}

MeanMap mean_map(const IsolationKernelModel& model, const PointMatrix& points) {
    if (points.rows == 0) throw std::invalid_argument("mean_map: empty point set");
    const auto cells = embed_matrix(model, points);
    std::vector<std::size_t> all(points.rows);
    for (std::size_t i = 0; i < points.rows; ++i) all[i] = i;
    return mean_map_from_cells(model, cells, points.rows, all);
}

MeanMap mean_map_from_cells(const IsolationKernelModel& model,
                            std::span<const std::uint16_t> cells, std::size_t n,
                            std::span<const std::size_t> members) {
    if (members.empty()) throw std::invalid_argument("mean_map_from_cells: empty member set");
    (void)n;
    MeanMap mm;
    mm.psi = model.psi;
    mm.t = model.t;
    mm.support_size = members.size();
    mm.weights.assign(model.feature_dim(), 0.0);
    for (const std::size_t idx : members) {
        const std::uint16_t* row = cells.data() + idx * model.t;
        for (std::uint32_t p = 0; p < model.t; ++p)
            mm.weights[static_cast<std::size_t>(p) * model.psi + row[p]] += 1.0;
    }
    const double inv = 1.0 / static_cast<double>(members.size());
    for (double& w : mm.weights) w *= inv;
    return mm;
}

double similarity_from_cells(const MeanMap& mm, const std::uint16_t* cells) {
    double acc = 0.0;
    for (std::uint32_t p = 0; p < mm.t; ++p)
        acc += mm.weights[static_cast<std::size_t>(p) * mm.psi + cells[p]];
    return acc / static_cast<double>(mm.t);
}

double point_set_similarity(const IsolationKernelModel& model, std::span<const double> x,
                            const MeanMap& mm) {
    const FeatureMap fx = embed_point(model, x);
    return similarity_from_cells(mm, fx.active_cells.data());
}

}  // namespace kdc
