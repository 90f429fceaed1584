#include "uavcomm/coverage.hpp"

#include "uavcomm/channel.hpp"
#include "uavcomm/error.hpp"
#include "uavcomm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uavcomm::coverage {

namespace {

constexpr double kScanStep = 0.1;      // fallback scan resolution, m
constexpr double kBisectionWidth = 1e-7; // m

std::size_t grid_points(double lower, double upper, double step)
{
    require_positive(lower, "lower altitude bound");
    require_positive(step, "altitude step");
    if (!(upper >= lower)) {
        throw DomainError("altitude range upper bound below lower bound");
    }
    return static_cast<std::size_t>(std::floor((upper - lower) / step + 1e-9)) + 1;
}

} // namespace

double LosProbabilityModel::probability(double elevation_deg) const noexcept
{
    return 1.0 / (1.0 + s_curve_a * std::exp(-s_curve_b * (elevation_deg - s_curve_a)));
}

void LosProbabilityModel::validate() const
{
    require_positive(s_curve_a, "LoS s-curve parameter a");
    require_positive(s_curve_b, "LoS s-curve parameter b");
}

void ExcessLoss::validate() const
{
    require_non_negative(eta_los, "LoS excess loss");
    if (!(eta_nlos >= eta_los)) {
        throw DomainError("NLoS excess loss must not be below the LoS excess loss");
    }
}

const std::vector<Environment>& environments()
{
    static const std::vector<Environment> presets{
        {"suburban", {4.88, 0.43}, {0.1, 21.0}},
        {"urban", {9.61, 0.16}, {1.0, 20.0}},
        {"dense_urban", {12.08, 0.11}, {1.6, 23.0}},
        {"highrise", {27.23, 0.08}, {2.3, 34.0}},
    };
    return presets;
}

std::optional<Environment> find_environment(std::string_view name)
{
    for (const auto& env : environments()) {
        if (env.name == name) {
            return env;
        }
    }
    return std::nullopt;
}

double elevation_angle_deg(double altitude, double ground_range) noexcept
{
    return std::atan2(altitude, ground_range) * 180.0 / std::numbers::pi;
}

double expected_path_loss(double altitude, double ground_range, double frequency,
                          const LosProbabilityModel& los, const ExcessLoss& excess)
{
    require_positive(altitude, "altitude");
    require_non_negative(ground_range, "ground range");
    const double fspl =
        channel::free_space_path_loss(std::hypot(altitude, ground_range), frequency);
    const double p = los.probability(elevation_angle_deg(altitude, ground_range));
    return p * (fspl + excess.eta_los) + (1.0 - p) * (fspl + excess.eta_nlos);
}

double coverage_radius(double altitude, double max_path_loss, double frequency,
                       const LosProbabilityModel& los, const ExcessLoss& excess)
{
    auto loss = [&](double r) { return expected_path_loss(altitude, r, frequency, los, excess); };
    if (loss(0.0) > max_path_loss) {
        return 0.0;
    }
    // Expected loss is at least FSPL + η_LoS, so the range where that lower
    // bound reaches the threshold brackets the answer.
    const double budget = max_path_loss - excess.eta_los;
    const double d_max = std::pow(10.0, budget / 20.0) * channel::kSpeedOfLight /
                         (4.0 * std::numbers::pi * frequency);
    double hi = std::sqrt(std::max(0.0, d_max * d_max - altitude * altitude)) + 1.0;
    double lo = 0.0;
    double lo_loss = loss(lo);
    double hi_loss = loss(hi);

    bool monotone = hi_loss > max_path_loss;
    while (monotone && hi - lo > kBisectionWidth) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double mid_loss = loss(mid);
        if (mid_loss < lo_loss || mid_loss > hi_loss) {
            monotone = false;
            break;
        }
        if (mid_loss <= max_path_loss) {
            lo = mid;
            lo_loss = mid_loss;
        } else {
            hi = mid;
            hi_loss = mid_loss;
        }
    }
    if (monotone) {
        return lo;
    }

    const double limit = std::sqrt(std::max(0.0, d_max * d_max - altitude * altitude)) + 1.0;
    double best = 0.0;
    for (double r = 0.0; r <= limit; r += kScanStep) {
        if (loss(r) <= max_path_loss) {
            best = r;
        }
    }
    return best;
}

std::vector<AltitudePoint> altitude_sweep(double lower, double upper, double step,
                                          double max_path_loss, double frequency,
                                          const LosProbabilityModel& los, const ExcessLoss& excess,
                                          bool parallel)
{
    los.validate();
    excess.validate();
    require_positive(frequency, "frequency");
    const std::size_t n = grid_points(lower, upper, step);
    return parallel_map(
        n,
        [&](std::size_t i) {
            const double h = std::min(lower + static_cast<double>(i) * step, upper);
            return AltitudePoint{h, coverage_radius(h, max_path_loss, frequency, los, excess)};
        },
        parallel);
}

AltitudePoint best_point(const std::vector<AltitudePoint>& sweep)
{
    if (sweep.empty()) {
        throw DomainError("empty altitude sweep");
    }
    AltitudePoint best = sweep.front();
    for (const auto& p : sweep) {
        if (p.radius > best.radius) {
            best = p;
        }
    }
    return best;
}

AltitudePoint optimal_altitude(double lower, double upper, double max_path_loss, double frequency,
                               const LosProbabilityModel& los, const ExcessLoss& excess,
                               double resolution, bool parallel)
{
    return best_point(
        altitude_sweep(lower, upper, resolution, max_path_loss, frequency, los, excess, parallel));
}

} // namespace uavcomm::coverage
