#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace evac {

/// Hardware concurrency, at least 1.
[[nodiscard]] unsigned default_jobs() noexcept;

/// Calls fn(i) for i in [0, n) on up to `jobs` threads. Each index runs
/// exactly once; the first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, unsigned jobs, const std::function<void(std::size_t)> &fn);

/// Stateless 64-bit mixer for deriving independent sub-seeds.
[[nodiscard]] constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace evac
