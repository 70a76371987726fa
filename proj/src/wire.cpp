#include "kdc/wire.hpp"

#include <bit>
#include <cstring>
#include <stdexcept>
#include <type_traits>

namespace kdc {

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& buf, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, &value, sizeof(T));
    // x86 memcpy is already little-endian; keep the explicit byte order anyway
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
    buf.insert(buf.end(), raw, raw + sizeof(T));
}

template <typename T>
T take(std::span<const std::uint8_t>& bytes) {
    if (bytes.size() < sizeof(T)) throw std::runtime_error("wire: truncated payload");
    std::uint8_t raw[sizeof(T)];
    std::memcpy(raw, bytes.data(), sizeof(T));
    if constexpr (std::endian::native == std::endian::big)
        for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(raw[i], raw[sizeof(T) - 1 - i]);
    T value;
    std::memcpy(&value, raw, sizeof(T));
    bytes = bytes.subspan(sizeof(T));
    return value;
}

}  // namespace

std::size_t mean_map_wire_size(std::uint32_t psi, std::uint32_t t) {
    return 4 + 4 + 8 + static_cast<std::size_t>(psi) * t * 8;
}

std::size_t model_wire_size(std::uint32_t psi, std::uint32_t t, std::size_t dim) {
    return 4 + 4 + 8 + static_cast<std::size_t>(psi) * t * dim * 8;
}

std::size_t subset_upload_wire_size(std::size_t count, std::size_t dim) {
    return 8 + 8 + count * (8 + dim * 8);
}

std::vector<std::uint8_t> serialize_mean_map(const MeanMap& mm) {
    std::vector<std::uint8_t> buf;
    buf.reserve(mean_map_wire_size(mm.psi, mm.t));
    put<std::uint32_t>(buf, mm.psi);
    put<std::uint32_t>(buf, mm.t);
    put<std::uint64_t>(buf, mm.weights.size());
    for (const double w : mm.weights) put<double>(buf, w);
    return buf;
}

MeanMap deserialize_mean_map(std::span<const std::uint8_t> bytes) {
    MeanMap mm;
    mm.psi = take<std::uint32_t>(bytes);
    mm.t = take<std::uint32_t>(bytes);
    const std::uint64_t len = take<std::uint64_t>(bytes);
    if (len != static_cast<std::uint64_t>(mm.psi) * mm.t)
        throw std::runtime_error("wire: mean map length disagrees with header");
    mm.weights.resize(len);
    for (std::uint64_t i = 0; i < len; ++i) mm.weights[i] = take<double>(bytes);
    return mm;
}

std::vector<std::uint8_t> serialize_model(const IsolationKernelModel& model) {
    std::vector<std::uint8_t> buf;
    buf.reserve(model_wire_size(model.psi, model.t, model.dim));
    put<std::uint32_t>(buf, model.psi);
    put<std::uint32_t>(buf, model.t);
    put<std::uint64_t>(buf, model.dim);
    for (const double a : model.anchors) put<double>(buf, a);
    return buf;
}

IsolationKernelModel deserialize_model(std::span<const std::uint8_t> bytes) {
    IsolationKernelModel model;
    model.psi = take<std::uint32_t>(bytes);
    model.t = take<std::uint32_t>(bytes);
    model.dim = static_cast<std::size_t>(take<std::uint64_t>(bytes));
    const std::size_t count = static_cast<std::size_t>(model.psi) * model.t * model.dim;
    model.anchors.resize(count);
    for (std::size_t i = 0; i < count; ++i) model.anchors[i] = take<double>(bytes);
    return model;
}

std::vector<std::uint8_t> serialize_subset_upload(std::span<const std::size_t> global_ids,
                                                  const PointMatrix& points) {
    if (global_ids.size() != points.rows)
        throw std::invalid_argument("serialize_subset_upload: id/point count mismatch");
    std::vector<std::uint8_t> buf;
    buf.reserve(subset_upload_wire_size(points.rows, points.cols));
    put<std::uint64_t>(buf, points.rows);
    put<std::uint64_t>(buf, points.cols);
    for (std::size_t i = 0; i < points.rows; ++i) {
        put<std::uint64_t>(buf, global_ids[i]);
        const double* p = points.row(i);
        for (std::size_t j = 0; j < points.cols; ++j) put<double>(buf, p[j]);
    }
    return buf;
}

}  // namespace kdc
