#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kdc/isolation_kernel.hpp"

namespace kdc {

// Little-endian wire formats used by the network simulation's byte
// accounting. A mean map is a (psi, t) header, a 64-bit length prefix and
// that many 64-bit floats. The model payload carries (psi, t, dim) and the
// anchor coordinates; a subset upload carries (count, dim) and per point a
// 64-bit global index plus its coordinates.

std::vector<std::uint8_t> serialize_mean_map(const MeanMap& mm);
MeanMap deserialize_mean_map(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_model(const IsolationKernelModel& model);
IsolationKernelModel deserialize_model(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> serialize_subset_upload(std::span<const std::size_t> global_ids,
                                                  const PointMatrix& points);

std::size_t mean_map_wire_size(std::uint32_t psi, std::uint32_t t);
std::size_t model_wire_size(std::uint32_t psi, std::uint32_t t, std::size_t dim);
std::size_t subset_upload_wire_size(std::size_t count, std::size_t dim);

}  // namespace kdc
