#include "uavcomm/channel.hpp"

#include "uavcomm/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace uavcomm::channel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Same antenna heights, horizontal offset chosen so the slant distance is
// `distance`.
LinkGeometry with_slant_distance(const LinkGeometry& geometry, double distance)
{
    const double dh = geometry.transmitter_height - geometry.receiver_height;
    if (distance < std::abs(dh)) {
        throw DomainError("reference distance " + std::to_string(distance) +
                          " m is shorter than the antenna height difference");
    }
    LinkGeometry out = geometry;
    out.horizontal_separation = std::sqrt(distance * distance - dh * dh);
    return out;
}

} // namespace

double LinkGeometry::slant_distance() const noexcept
{
    return std::hypot(horizontal_separation, transmitter_height - receiver_height);
}

MeanModel ChannelModel::mean_model() const
{
    if (const auto* rician = std::get_if<Rician>(&variant)) {
        return rician->base;
    }
    if (std::holds_alternative<TwoRay>(variant)) {
        return std::get<TwoRay>(variant);
    }
    return FreeSpace{};
}

void ChannelModel::validate() const
{
    require_positive(carrier_frequency, "carrier frequency");
    auto check_two_ray = [](const TwoRay& tr) {
        if (!(tr.reflection_coefficient >= -1.0 && tr.reflection_coefficient <= 0.0)) {
            throw DomainError("reflection coefficient must lie in [-1, 0]");
        }
    };
    if (const auto* tr = std::get_if<TwoRay>(&variant)) {
        check_two_ray(*tr);
    }
    if (const auto* rician = std::get_if<Rician>(&variant)) {
        if (!std::isfinite(rician->k_factor_db)) {
            throw DomainError("Rician K-factor must be finite");
        }
        if (const auto* tr = std::get_if<TwoRay>(&rician->base)) {
            check_two_ray(*tr);
        }
    }
}

double db_to_linear(double db) noexcept { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) noexcept { return 10.0 * std::log10(linear); }

double free_space_path_loss(double distance, double frequency)
{
    require_positive(distance, "distance");
    require_positive(frequency, "frequency");
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance * frequency / kSpeedOfLight);
}

double free_space_path_loss(const LinkGeometry& geometry, double frequency)
{
    return free_space_path_loss(geometry.slant_distance(), frequency);
}

double breakpoint_distance(double transmitter_height, double receiver_height, double frequency)
{
    require_positive(frequency, "frequency");
    const double wavelength = kSpeedOfLight / frequency;
    return 4.0 * transmitter_height * receiver_height / wavelength;
}

double two_ray_path_loss(const LinkGeometry& geometry, double frequency,
                         double reflection_coefficient)
{
    require_positive(geometry.transmitter_height, "transmitter height");
    require_non_negative(geometry.receiver_height, "receiver height");
    const double direct = geometry.slant_distance();
    const double direct_loss = free_space_path_loss(direct, frequency);

    const double r = geometry.horizontal_separation;
    const double ht = geometry.transmitter_height;
    const double hr = geometry.receiver_height;
    const double reflected = std::hypot(r, ht + hr);
    // d2 - d1 without cancellation.
    const double path_difference = 4.0 * ht * hr / (direct + reflected);
    const double k = 2.0 * std::numbers::pi * frequency / kSpeedOfLight;

    // Field relative to the direct ray alone: 1 + G (d1/d2) e^{-j k (d2-d1)}.
    const std::complex<double> relative =
        1.0 + reflection_coefficient * (direct / reflected) *
                  std::polar(1.0, -k * path_difference);
    const double magnitude = std::abs(relative);
    if (magnitude == 0.0) {
        return kInf;
    }
    return direct_loss - 20.0 * std::log10(magnitude);
}

double path_loss(const LinkGeometry& geometry, const ChannelModel& model)
{
    const MeanModel mean = model.mean_model();
    if (const auto* tr = std::get_if<TwoRay>(&mean)) {
        return two_ray_path_loss(geometry, model.carrier_frequency, tr->reflection_coefficient);
    }
    return free_space_path_loss(geometry, model.carrier_frequency);
}

std::complex<double> sample_rician_gain(double k_factor_db, RandomStream& rng)
{
    const double k = db_to_linear(k_factor_db);
    const double los = std::sqrt(k / (k + 1.0));
    const double scatter = std::sqrt(1.0 / (k + 1.0));
    return los + scatter * rng.complex_normal();
}

double estimate_k_factor_db(std::span<const double> power_samples)
{
    if (power_samples.size() < 2) {
        throw DomainError("K-factor estimate needs at least two samples");
    }
    double m1 = 0.0;
    double m2 = 0.0;
    for (double p : power_samples) {
        m1 += p;
        m2 += p * p;
    }
    const auto n = static_cast<double>(power_samples.size());
    m1 /= n;
    m2 /= n;
    const double spread = (m2 - m1 * m1) / (m1 * m1);
    if (!(spread < 1.0)) {
        return -kInf;
    }
    const double root = std::sqrt(1.0 - spread);
    if (root >= 1.0) {
        return kInf;
    }
    return linear_to_db(root / (1.0 - root));
}

double snr_at(const LinkGeometry& geometry, const ChannelModel& model, const SnrReference& ref)
{
    require_positive(ref.reference_distance, "reference distance");
    const double loss = path_loss(geometry, model);
    double reference_loss = 0.0;
    if (std::holds_alternative<FreeSpace>(model.mean_model())) {
        reference_loss = free_space_path_loss(ref.reference_distance, model.carrier_frequency);
    } else {
        reference_loss = path_loss(with_slant_distance(geometry, ref.reference_distance), model);
    }
    return ref.reference_snr_db + reference_loss - loss;
}

double spectral_efficiency(double snr_db) noexcept
{
    return std::log2(1.0 + db_to_linear(snr_db));
}

double doppler_shift(double relative_speed, double frequency)
{
    require_non_negative(relative_speed, "relative speed");
    return relative_speed * frequency / kSpeedOfLight;
}

} // namespace uavcomm::channel
