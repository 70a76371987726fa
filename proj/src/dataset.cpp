#include "kdc/dataset.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace kdc {

PointMatrix PointMatrix::gather(std::span<const std::size_t> indices) const {
    PointMatrix out(indices.size(), cols);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const double* src = row(indices[i]);
        std::copy(src, src + cols, out.row(i));
    }
    return out;
}

PointMatrix PointMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    PointMatrix out(rows.size(), rows.empty() ? 0 : rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != out.cols)
            throw std::invalid_argument("from_rows: ragged input");
        std::copy(rows[i].begin(), rows[i].end(), out.row(i));
    }
    return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_cell(const std::string& field, std::size_t line_no, std::size_t col) {
    const char* begin = field.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    // skip trailing spaces
    while (end && (*end == ' ' || *end == '\t')) ++end;
    if (end == begin || (end && *end != '\0') || errno == ERANGE || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << "csv parse error at line " << line_no << ", column " << (col + 1)
            << ": '" << field << "' is not a finite number";
        throw std::runtime_error(msg.str());
    }
    return v;
}

}  // namespace

Dataset load_csv(const std::string& path, const CsvOptions& opts) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);

    std::vector<std::vector<double>> rows;
    std::vector<std::int32_t> labels;
    std::string line;
    std::size_t line_no = 0;
    std::size_t arity = 0;
    bool skipped_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (opts.has_header && !skipped_header) {
            skipped_header = true;
            continue;
        }
        if (line.empty() || line == "\r") continue;
        const auto fields = split_fields(line);
        if (arity == 0) {
            arity = fields.size();
            if (opts.label_column && *opts.label_column >= arity)
                throw std::runtime_error("label column out of range for file with " +
                                         std::to_string(arity) + " columns");
        } else if (fields.size() != arity) {
            std::ostringstream msg;
            msg << "ragged row at line " << line_no << ": expected " << arity
                << " fields, found " << fields.size();
            throw std::runtime_error(msg.str());
        }

        std::vector<double> coords;
        coords.reserve(arity - (opts.label_column ? 1 : 0));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const double v = parse_cell(fields[c], line_no, c);
            if (opts.label_column && c == *opts.label_column) {
                const double r = std::round(v);
                if (r != v || r < 0) {
                    std::ostringstream msg;
                    msg << "csv parse error at line " << line_no << ", column " << (c + 1)
                        << ": label '" << fields[c] << "' is not a non-negative integer";
                    throw std::runtime_error(msg.str());
                }
                labels.push_back(static_cast<std::int32_t>(r));
            } else {
                coords.push_back(v);
            }
        }
        rows.push_back(std::move(coords));
    }

    if (rows.empty()) throw std::runtime_error("empty csv file: " + path);

    Dataset ds;
    ds.points = PointMatrix::from_rows(rows);
    if (opts.label_column) ds.labels = std::move(labels);
    // dataset name = file stem
    std::size_t slash = path.find_last_of("/\\");
    std::string stem = (slash == std::string::npos) ? path : path.substr(slash + 1);
    const std::size_t dot = stem.find_last_of('.');
    if (dot != std::string::npos) stem = stem.substr(0, dot);
    ds.name = stem;
    return ds;
}

void save_csv(const std::string& path, const Dataset& ds, bool header) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.precision(17);
    if (header) {
        for (std::size_t c = 0; c < ds.dim(); ++c) out << "x" << c << ",";
        out << (ds.labels ? "label" : "") << "\n";
    }
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double* p = ds.points.row(i);
        for (std::size_t c = 0; c < ds.dim(); ++c) out << p[c] << ",";
        if (ds.labels) out << (*ds.labels)[i];
        out << "\n";
    }
}

Dataset normalize_unit_range(const Dataset& ds) {
    if (ds.size() == 0) throw std::invalid_argument("normalize_unit_range: empty dataset");
    const std::size_t n = ds.size(), d = ds.dim();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        const double* p = ds.points.row(i);
        for (std::size_t c = 0; c < d; ++c) {
            lo[c] = std::min(lo[c], p[c]);
            hi[c] = std::max(hi[c], p[c]);
        }
    }
    Dataset out = ds;
    for (std::size_t i = 0; i < n; ++i) {
        double* p = out.points.row(i);
        for (std::size_t c = 0; c < d; ++c) {
            const double range = hi[c] - lo[c];
            p[c] = range > 0.0 ? (p[c] - lo[c]) / range : 0.0;
        }
    }
    return out;
}

std::size_t SitePartition::total_points() const {
    std::size_t total = 0;
    for (const auto& s : site_indices) total += s.size();
    return total;
}

SitePartition partition_sites(std::size_t n, std::size_t r,
                              std::optional<double> skew, const RngStream& rng) {
    if (r == 0) throw std::invalid_argument("partition_sites: r must be positive");
    if (r > n)
        throw std::invalid_argument("partition_sites: r=" + std::to_string(r) +
                                    " exceeds n=" + std::to_string(n));

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    auto eng = rng.engine();
    shuffle_in_place(order, eng);

    std::vector<std::size_t> sizes(r, 0);
    if (!skew) {
        const std::size_t q = n / r, rem = n % r;
        for (std::size_t i = 0; i < r; ++i) sizes[i] = q + (i < rem ? 1 : 0);
    } else {
        if (*skew < 0.0 || *skew >= 1.0)
            throw std::invalid_argument("partition_sites: skew must lie in [0,1)");
        const std::size_t first = static_cast<std::size_t>(std::ceil(*skew * static_cast<double>(n)));
        if (first + (r - 1) > n)
            throw std::invalid_argument("partition_sites: skewed first site leaves too few points");
        sizes[0] = first;
        if (r > 1) {
            const std::size_t rest = n - first;
            const std::size_t q = rest / (r - 1), rem = rest % (r - 1);
            for (std::size_t i = 1; i < r; ++i) sizes[i] = q + (i - 1 < rem ? 1 : 0);
        } else {
            sizes[0] = n;
        }
    }
    if (std::any_of(sizes.begin(), sizes.end(), [](std::size_t s) { return s == 0; }))
        throw std::invalid_argument("partition_sites: configuration leaves an empty site");

    SitePartition part;
    part.site_indices.resize(r);
    std::size_t cursor = 0;
    for (std::size_t i = 0; i < r; ++i) {
        auto& site = part.site_indices[i];
        site.assign(order.begin() + cursor, order.begin() + cursor + sizes[i]);
        std::sort(site.begin(), site.end());
        cursor += sizes[i];
    }
    return part;
}

namespace {

bool priority_leq(std::uint64_t pa, std::uint64_t ia, const SubsetThreshold& th) {
    return pa < th.priority || (pa == th.priority && ia <= th.index);
}

}  // namespace

std::vector<std::size_t> sample_subset(const std::vector<std::size_t>& indices,
                                       std::size_t s_target, const RngStream& rng) {
    if (s_target > indices.size())
        throw std::invalid_argument("sample_subset: s_target=" + std::to_string(s_target) +
                                    " exceeds available " + std::to_string(indices.size()));
    if (s_target == 0) return {};
    if (s_target == indices.size()) {
        std::vector<std::size_t> all = indices;
        std::sort(all.begin(), all.end());
        return all;
    }
    std::vector<std::pair<std::uint64_t, std::size_t>> keyed;
    keyed.reserve(indices.size());
    for (const std::size_t idx : indices)
        keyed.emplace_back(rng.index_priority(idx), idx);
    std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(s_target) - 1,
                     keyed.end());
    std::vector<std::size_t> chosen;
    chosen.reserve(s_target);
    for (std::size_t i = 0; i < s_target; ++i) chosen.push_back(keyed[i].second);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

SubsetThreshold subset_threshold(std::size_t n, std::size_t s, const RngStream& rng) {
    if (s == 0 || s > n) throw std::invalid_argument("subset_threshold: need 0 < s <= n");
    std::vector<std::pair<std::uint64_t, std::uint64_t>> keyed;
    keyed.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        keyed.emplace_back(rng.index_priority(i), static_cast<std::uint64_t>(i));
    std::nth_element(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(s) - 1, keyed.end());
    return SubsetThreshold{keyed[s - 1].first, keyed[s - 1].second};
}

std::vector<std::size_t> sample_below_threshold(const std::vector<std::size_t>& indices,
                                                const SubsetThreshold& threshold,
                                                const RngStream& rng) {
    std::vector<std::size_t> chosen;
    for (const std::size_t idx : indices)
        if (priority_leq(rng.index_priority(idx), idx, threshold)) chosen.push_back(idx);
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

}  // namespace kdc
