#include "lmc/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lmc {
namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
{
    return (x << k) | (x >> (64 - k));
}

// Inversion by sequential search; exact for moderate means.
std::uint64_t poisson_inversion(StreamRng& rng, double mean)
{
    double u = rng.uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf) {
        ++k;
        p *= mean / static_cast<double>(k);
        cdf += p;
        if (p <= 0.0 && cdf < u) {
            // Tail underflowed; remaining mass is below double resolution.
            break;
        }
    }
    return k;
}

} // namespace

StreamRng::StreamRng(std::uint64_t seed, Stream stream) noexcept
{
    std::uint64_t key = mix64(seed) ^ mix64(static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL);
    for (auto& word : s_) {
        key = mix64(key);
        word = key;
    }
}

StreamRng::result_type StreamRng::operator()() noexcept
{
    std::uint64_t const result = rotl(s_[1] * 5, 7) * 9;
    std::uint64_t const t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double StreamRng::uniform() noexcept
{
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
}

double StreamRng::uniform_open() noexcept
{
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

double StreamRng::normal() noexcept
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double const r = std::sqrt(-2.0 * std::log(uniform_open()));
    double const theta = 2.0 * std::numbers::pi * uniform();
    spare_normal_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
}

std::uint64_t StreamRng::poisson(double mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean)) {
        throw std::invalid_argument("poisson: mean must be finite and nonnegative");
    }
    if (mean == 0.0) {
        return 0;
    }
    // Split large means into independent pieces so exp(-mean) never underflows.
    constexpr double chunk = 64.0;
    auto const pieces = static_cast<std::uint64_t>(std::ceil(mean / chunk));
    double const piece_mean = mean / static_cast<double>(pieces);
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < pieces; ++i) {
        total += poisson_inversion(*this, piece_mean);
    }
    return total;
}

} // namespace lmc
