#include "kdc/synth.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kdc {

namespace {

struct Builder {
    std::vector<std::vector<double>> rows;
    std::vector<std::int32_t> labels;

    void add(double x, double y, std::int32_t label) {
        rows.push_back({x, y});
        labels.push_back(label);
    }

    Dataset finish(const std::string& name) {
        Dataset ds;
        ds.points = PointMatrix::from_rows(rows);
        ds.labels = labels;
        ds.name = name;
        return ds;
    }
};

// noisy arc of a circle: theta uniform in [a,b], radius R + N(0, sigma)
void arc(Builder& b, std::mt19937_64& eng, double cx, double cy, double radius, double theta0,
         double theta1, double sigma, std::size_t n, std::int32_t label) {
    for (std::size_t i = 0; i < n; ++i) {
        const double theta = theta0 + (theta1 - theta0) * uniform_unit(eng);
        const double r = radius + sigma * standard_normal(eng);
        b.add(cx + r * std::cos(theta), cy + r * std::sin(theta), label);
    }
}

void blob2d(Builder& b, std::mt19937_64& eng, double cx, double cy, double sigma, std::size_t n,
            std::int32_t label) {
    for (std::size_t i = 0; i < n; ++i)
        b.add(cx + sigma * standard_normal(eng), cy + sigma * standard_normal(eng), label);
}

void bar(Builder& b, std::mt19937_64& eng, double x0, double y0, double x1, double y1,
         double sigma, std::size_t n, std::int32_t label) {
    // points along the segment with isotropic jitter
    for (std::size_t i = 0; i < n; ++i) {
        const double u = uniform_unit(eng);
        b.add(x0 + u * (x1 - x0) + sigma * standard_normal(eng),
              y0 + u * (y1 - y0) + sigma * standard_normal(eng), label);
    }
}

}  // namespace

Dataset make_blobs(std::size_t n, std::size_t d, std::int32_t k, double spread,
                   std::uint64_t seed, const std::string& name) {
    if (k < 1 || n < static_cast<std::size_t>(k) || d == 0)
        throw std::invalid_argument("make_blobs: bad shape");
    auto eng = RngStream(seed, "synth-blobs").engine();

    // rejection-sampled centers with pairwise separation
    std::vector<std::vector<double>> centers;
    const double min_sep = std::max(0.25, 6.0 * spread);
    while (centers.size() < static_cast<std::size_t>(k)) {
        std::vector<double> c(d);
        for (double& v : c) v = uniform_unit(eng);
        bool ok = true;
        for (const auto& other : centers) {
            double sq = 0.0;
            for (std::size_t j = 0; j < d; ++j) sq += (c[j] - other[j]) * (c[j] - other[j]);
            if (std::sqrt(sq) < min_sep) {
                ok = false;
                break;
            }
        }
        if (ok) centers.push_back(std::move(c));
    }

    Dataset ds;
    ds.points = PointMatrix(n, d);
    std::vector<std::int32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int32_t c = static_cast<std::int32_t>(i % k);
        labels[i] = c;
        double* row = ds.points.row(i);
        for (std::size_t j = 0; j < d; ++j)
            row[j] = centers[c][j] + spread * standard_normal(eng);
    }
    ds.labels = std::move(labels);
    ds.name = name;
    return ds;
}

Dataset make_two_moons(std::size_t n_dense, std::size_t n_sparse, double noise_dense,
                       double noise_sparse, std::uint64_t seed, const std::string& name) {
    Builder b;
    auto eng = RngStream(seed, "synth-moons").engine();
    const double pi = std::numbers::pi;
    // upper crescent, dense; lower crescent shifted right and up, sparse
    arc(b, eng, 0.0, 0.0, 1.0, 0.0, pi, noise_dense, n_dense, 0);
    arc(b, eng, 1.0, 0.5, 1.0, pi, 2.0 * pi, noise_sparse, n_sparse, 1);
    return b.finish(name);
}

Dataset make_nine_shapes(std::uint64_t seed, const std::string& name) {
    Builder b;
    auto eng = RngStream(seed, "synth-nine").engine();
    const double pi = std::numbers::pi;

    arc(b, eng, 6.0, 6.0, 4.0, 0.0, 2.0 * pi, 0.25, 420, 0);    // ring
    blob2d(b, eng, 6.0, 6.0, 0.7, 180, 1);                      // blob inside it
    arc(b, eng, 17.0, 6.0, 4.2, 0.0, 2.0 * pi, 0.25, 430, 2);   // second ring
    blob2d(b, eng, 17.0, 6.0, 0.7, 180, 3);                     // blob inside it
    arc(b, eng, 28.0, 6.0, 4.0, 0.0, pi, 0.30, 330, 4);         // upper crescent
    arc(b, eng, 32.0, 8.0, 4.0, pi, 2.0 * pi, 0.30, 330, 5);    // interlocked lower crescent
    bar(b, eng, 4.0, 16.0, 20.0, 16.0, 0.40, 350, 6);           // horizontal bar
    bar(b, eng, 24.0, 14.0, 24.0, 22.0, 0.40, 280, 7);          // vertical bar
    blob2d(b, eng, 33.0, 16.0, 0.8, 300, 8);                    // free blob
    return b.finish(name);
}

}  // namespace kdc
