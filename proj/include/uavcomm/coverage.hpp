#ifndef UAVCOMM_COVERAGE_HPP
#define UAVCOMM_COVERAGE_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace uavcomm::coverage {

/// Elevation-angle sigmoid P(θ) = 1 / (1 + a exp(-b (θ - a))), θ in degrees.
struct LosProbabilityModel {
    double s_curve_a = 9.61;
    double s_curve_b = 0.16;

    double probability(double elevation_deg) const noexcept;
    void validate() const;
};

/// Mean excess loss over free space for LoS and NLoS links, in dB.
struct ExcessLoss {
    double eta_los = 1.0;
    double eta_nlos = 20.0;

    void validate() const;
};

struct Environment {
    std::string name;
    LosProbabilityModel los;
    ExcessLoss excess;
};

/// Built-in parameter sets: "suburban", "urban", "dense_urban", "highrise".
/// These are commonly used air-to-ground fits, shipped as defaults.
const std::vector<Environment>& environments();
std::optional<Environment> find_environment(std::string_view name);

double elevation_angle_deg(double altitude, double ground_range) noexcept;

/// P_LoS (FSPL + η_LoS) + (1 - P_LoS) (FSPL + η_NLoS) at slant distance
/// sqrt(h^2 + r^2), in dB.
double expected_path_loss(double altitude, double ground_range, double frequency,
                          const LosProbabilityModel& los, const ExcessLoss& excess);

/// Largest ground range whose expected loss stays within `max_path_loss`;
/// 0 when even the nadir link exceeds it. Bisection, with a fixed-step scan
/// fallback if the loss is found to be non-monotone in range.
double coverage_radius(double altitude, double max_path_loss, double frequency,
                       const LosProbabilityModel& los, const ExcessLoss& excess);

struct AltitudePoint {
    double altitude = 0.0;
    double radius = 0.0;
};

/// Coverage radius at lower, lower + step, ..., up to and including upper.
std::vector<AltitudePoint> altitude_sweep(double lower, double upper, double step,
                                          double max_path_loss, double frequency,
                                          const LosProbabilityModel& los, const ExcessLoss& excess,
                                          bool parallel = false);

/// Grid argmax of coverage_radius over [lower, upper]; ties go to the lowest
/// altitude.
AltitudePoint optimal_altitude(double lower, double upper, double max_path_loss, double frequency,
                               const LosProbabilityModel& los, const ExcessLoss& excess,
                               double resolution = 1.0, bool parallel = false);

/// Argmax of a precomputed sweep, lowest altitude on ties.
AltitudePoint best_point(const std::vector<AltitudePoint>& sweep);

} // namespace uavcomm::coverage

#endif
