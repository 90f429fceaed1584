#ifndef UAVCOMM_CHANNEL_HPP
#define UAVCOMM_CHANNEL_HPP

#include "uavcomm/random.hpp"

#include <complex>
#include <span>
#include <variant>

namespace uavcomm::channel {

inline constexpr double kSpeedOfLight = 2.998e8; // m/s

/// Geometry of a single UAV-ground (or UAV-UAV) link, in meters.
struct LinkGeometry {
    double horizontal_separation = 0.0;
    double transmitter_height = 0.0;
    double receiver_height = 0.0;

    double slant_distance() const noexcept;
};

struct FreeSpace {};

struct TwoRay {
    /// Ground reflection coefficient, in [-1, 0].
    double reflection_coefficient = -1.0;
};

using MeanModel = std::variant<FreeSpace, TwoRay>;

/// Small-scale Rician fading on top of a mean path-loss model.
struct Rician {
    double k_factor_db = 15.0;
    MeanModel base = FreeSpace{};
};

struct ChannelModel {
    std::variant<FreeSpace, TwoRay, Rician> variant = FreeSpace{};
    double carrier_frequency = 5e9; // Hz

    bool has_fading() const noexcept { return std::holds_alternative<Rician>(variant); }
    MeanModel mean_model() const;

    /// Throws DomainError when a parameter is out of range.
    void validate() const;
};

/// Power anchor: the SNR observed at `reference_distance` (slant, meters).
struct SnrReference {
    double reference_snr_db = 10.0;
    double reference_distance = 1.0;
};

double db_to_linear(double db) noexcept;
double linear_to_db(double linear) noexcept;

/// Friis magnitude 20 log10(4 pi d f / c), in dB.
double free_space_path_loss(double distance, double frequency);
double free_space_path_loss(const LinkGeometry& geometry, double frequency);

/// d_b = 4 h_t h_r / lambda.
double breakpoint_distance(double transmitter_height, double receiver_height, double frequency);

/// Exact coherent sum of the direct ray and the ground-reflected ray.
/// Returns +infinity when the two rays cancel.
double two_ray_path_loss(const LinkGeometry& geometry, double frequency,
                         double reflection_coefficient);

/// Mean (fading-free) path loss of `model` for the given link, in dB.
double path_loss(const LinkGeometry& geometry, const ChannelModel& model);

/// Complex channel amplitude with a fixed-phase LoS part and a scattered
/// CN(0, 1/(K+1)) part; E[|g|^2] = 1.
std::complex<double> sample_rician_gain(double k_factor_db, RandomStream& rng);

/// Moment-based K-factor estimate from power samples |g|^2, in dB, using
/// K = sqrt(1 - g) / (1 - sqrt(1 - g)) with g = Var[P] / E[P]^2.
/// Returns -infinity when the spread is too large for a LoS component.
double estimate_k_factor_db(std::span<const double> power_samples);

/// Mean SNR in dB at the link's slant distance. The reference path loss is
/// evaluated with the same antenna heights as `geometry`.
double snr_at(const LinkGeometry& geometry, const ChannelModel& model, const SnrReference& ref);

/// Shannon spectral efficiency log2(1 + SNR) in bps/Hz.
double spectral_efficiency(double snr_db) noexcept;

/// Maximum Doppler shift v f / c in Hz. Diagnostic only.
double doppler_shift(double relative_speed, double frequency);

} // namespace uavcomm::channel

#endif
