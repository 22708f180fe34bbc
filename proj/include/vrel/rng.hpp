#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vrel {

/// Derives an independent, reproducible substream seed from a top-level
/// seed and a stream tag (splitmix64 over an FNV-1a hash of the tag).
/// All randomness in a run flows from one seed through named substreams,
/// so e.g. the example clauses of two knowledge-base modes coincide.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

inline std::mt19937_64 substream(std::uint64_t seed, std::string_view tag) {
    return std::mt19937_64(derive_seed(seed, tag));
}

}  // namespace vrel
