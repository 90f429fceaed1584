#ifndef UAVCOMM_RANDOM_HPP
#define UAVCOMM_RANDOM_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>

namespace uavcomm {

/// SplitMix64 finalizer. Used for seed derivation so that run seeds are
/// reproducible across compilers and platforms.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of run `index` under `master_seed`: the (index+1)-th output of a
/// SplitMix64 sequence started at `master_seed`.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index) noexcept;

/// Portable random stream. std::mt19937_64 is fully specified by the
/// standard; the distributions below are implemented here rather than taken
/// from <random>, whose distribution algorithms are implementation-defined.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform();

    /// Uniform integer on [0, n). n must be > 0.
    std::size_t uniform_index(std::size_t n);

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Box-Muller (no cached spare).
    double standard_normal();

    /// Circularly-symmetric complex Gaussian with E[|z|^2] = 1.
    std::complex<double> complex_normal();

private:
    std::mt19937_64 engine_;
};

} // namespace uavcomm

#endif
