#pragma once

#include <cstdint>
#include <limits>

namespace lmc {

/// SplitMix64 finalizer. Used to derive independent stream keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept
{
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of path number `index` in a Monte Carlo run keyed by `base_seed`.
constexpr std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t index) noexcept
{
    return mix64(mix64(base_seed) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Stream identifiers inside a single path.
enum class Stream : std::uint64_t { brownian = 1, jumps = 2, auxiliary = 3 };

//---------------------------------------------------------------------------//
/*!
 * xoshiro256** keyed by (seed, stream).
 *
 * Distinct (seed, stream) pairs give statistically independent sequences, so
 * path simulation is reproducible regardless of how paths are scheduled over
 * threads. Satisfies UniformRandomBitGenerator.
 */
class StreamRng
{
  public:
    using result_type = std::uint64_t;

    StreamRng(std::uint64_t seed, Stream stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept;

    // Uniform on [0, 1).
    double uniform() noexcept;
    // Uniform on the open interval (0, 1).
    double uniform_open() noexcept;
    double normal() noexcept;
    std::uint64_t poisson(double mean);

  private:
    std::uint64_t s_[4];
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

} // namespace lmc
