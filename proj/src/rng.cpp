#include "kdc/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace kdc {

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

namespace {

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, std::string label)
    : master_(master_seed),
      label_(std::move(label)),
      derived_(mix64(master_seed ^ mix64(fnv1a64(label_)))) {}

std::uint64_t RngStream::index_priority(std::uint64_t index) const {
    return mix64(derived_ ^ mix64(index + 0x51ED270B76B9D9CDULL));
}

RngStream RngStream::child(std::string_view suffix) const {
    std::string sub = label_;
    sub += '/';
    sub += suffix;
    return RngStream(master_, std::move(sub));
}

std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    // Rejection sampling on the top of the range keeps the draw unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % bound);
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit && limit != 0);
    return x % bound;
}

double uniform_unit(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& eng) {
    double u1 = uniform_unit(eng);
    while (u1 <= 0.0) u1 = uniform_unit(eng);
    const double u2 = uniform_unit(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t weighted_pick(std::mt19937_64& eng, const std::vector<double>& weights) {
    if (weights.empty()) throw std::invalid_argument("weighted_pick: empty weights");
    double total = 0.0;
    for (const double w : weights) total += w;
    if (total <= 0.0) return static_cast<std::size_t>(uniform_below(eng, weights.size()));
    const double target = uniform_unit(eng) * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (target < acc) return i;
    }
    return weights.size() - 1;
}

}  // namespace kdc
