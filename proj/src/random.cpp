#include "uavcomm/random.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace uavcomm {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept
{
    return splitmix64(master_seed + 0x9E3779B97F4A7C15ULL * index);
}

double RandomStream::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t RandomStream::uniform_index(std::size_t n)
{
    if (n == 0) {
        throw std::invalid_argument("uniform_index: empty range");
    }
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r = engine_();
    while (r >= limit) {
        r = engine_();
    }
    return static_cast<std::size_t>(r % bound);
}

double RandomStream::standard_normal()
{
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::complex<double> RandomStream::complex_normal()
{
    const double re = standard_normal();
    const double im = standard_normal();
    return {re * std::numbers::sqrt2 / 2.0, im * std::numbers::sqrt2 / 2.0};
}

} // namespace uavcomm
