#pragma once

// Deterministic stream derivation. Every random quantity in the toolkit is
// drawn from an engine keyed by (master seed, index, purpose tag), so the
// draw for a given case never depends on which other cases were generated
// or in which order.

#include <cstdint>
#include <random>

namespace lrbench {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Purpose tags keep independent experiments on the same seed from sharing
// streams.
enum class StreamTag : std::uint64_t {
    Case = 1,
    Oracle = 2,
    Bootstrap = 3,
    TotalExpectationLhs = 4,
    TotalExpectationRhs = 5,
    TailBound = 6,
    Violating = 7,
};

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                    StreamTag tag) noexcept {
    std::uint64_t h = splitmix64(master);
    h = splitmix64(h ^ static_cast<std::uint64_t>(tag));
    return splitmix64(h ^ splitmix64(index));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t index,
                       StreamTag tag = StreamTag::Case) {
    return Rng(derive_seed(master, index, tag));
}

}  // namespace lrbench
