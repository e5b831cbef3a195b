#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace vpr {

using Rng = std::mt19937_64;

namespace detail {

[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

[[nodiscard]] constexpr std::uint64_t fnv1a(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace detail

/// Seed for an independent stream keyed by (master seed, experiment, grid point, trial).
/// Streams do not depend on execution order, so trials can run in any order or in parallel.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view experiment,
                                                  std::uint64_t grid_index,
                                                  std::uint64_t trial_index) noexcept {
    std::uint64_t h = detail::splitmix64(master);
    h = detail::splitmix64(h ^ detail::fnv1a(experiment));
    h = detail::splitmix64(h ^ grid_index);
    h = detail::splitmix64(h ^ (trial_index * 0xd1b54a32d192ed03ULL));
    return h;
}

[[nodiscard]] inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

}  // namespace vpr
