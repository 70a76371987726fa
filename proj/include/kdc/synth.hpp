#pragma once

#include <cstdint>
#include <string>

#include "kdc/dataset.hpp"

namespace kdc {

/// k well-separated Gaussian blobs in [0,1]^d with ground-truth labels.
Dataset make_blobs(std::size_t n, std::size_t d, std::int32_t k, double spread,
                   std::uint64_t seed, const std::string& name = "blobs");

/// Two interlocking crescents of unequal size and density, in the style of
/// the classic Jain 2-D benchmark.
Dataset make_two_moons(std::size_t n_dense, std::size_t n_sparse, double noise_dense,
                       double noise_sparse, std::uint64_t seed,
                       const std::string& name = "two-moons");

/// Nine 2-D clusters of mixed shape: two rings with blobs inside them, an
/// interlocking crescent pair, two bars and a free blob, in the style of
/// the Complex9 benchmark. Roughly 2800 points.
Dataset make_nine_shapes(std::uint64_t seed, const std::string& name = "nine-shapes");

}  // namespace kdc
