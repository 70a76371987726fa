#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace kdc {

/// Stateless 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// A named, reproducible randomness source. A stream is identified by
/// (master_seed, label); the same pair always yields the same draws, and
/// distinct labels yield unrelated sequences. Streams are cheap value
/// types; operations that need randomness take one by const reference and
/// derive whatever state they need from it.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::string label);

    std::uint64_t master_seed() const { return master_; }
    const std::string& label() const { return label_; }
    std::uint64_t derived_seed() const { return derived_; }

    /// Fresh engine positioned at the start of this stream's sequence.
    std::mt19937_64 engine() const { return std::mt19937_64(derived_); }

    /// Per-index hash value, independent of call order. Used for
    /// partition-invariant subset selection: every holder of index i
    /// computes the same priority without coordination.
    std::uint64_t index_priority(std::uint64_t index) const;

    /// Sub-stream with a suffixed label.
    RngStream child(std::string_view suffix) const;

private:
    std::uint64_t master_;
    std::string label_;
    std::uint64_t derived_;
};

// Deterministic draw helpers. The std <random> distributions are
// implementation-defined, so anything that must reproduce bit-exactly
// across platforms goes through these instead.

/// Uniform integer in [0, bound). bound must be > 0.
std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t bound);

/// Uniform double in [0, 1).
double uniform_unit(std::mt19937_64& eng);

/// Standard normal via Box-Muller.
double standard_normal(std::mt19937_64& eng);

/// Index drawn proportionally to non-negative weights; falls back to a
/// uniform pick when the total mass is zero. weights must be nonempty.
std::size_t weighted_pick(std::mt19937_64& eng, const std::vector<double>& weights);

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle_in_place(std::vector<T>& items, std::mt19937_64& eng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_below(eng, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace kdc
