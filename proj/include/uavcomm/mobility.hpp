#ifndef UAVCOMM_MOBILITY_HPP
#define UAVCOMM_MOBILITY_HPP

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace uavcomm::mobility {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
    friend bool operator==(const Vec3&, const Vec3&) = default;
};

double norm(Vec3 v) noexcept;
double distance(Vec3 a, Vec3 b) noexcept;
double horizontal_distance(Vec3 a, Vec3 b) noexcept;

struct UavState {
    double time = 0.0;
    Vec3 position;
    /// Speed over the step that starts at this state; 0 for the last state.
    double speed = 0.0;

    friend bool operator==(const UavState&, const UavState&) = default;
};

/// Uniformly sampled UAV path. Timestamps are k * time_step.
struct Trajectory {
    std::vector<UavState> states;
    double time_step = 0.0;

    double duration() const noexcept { return states.empty() ? 0.0 : states.back().time; }

    /// Linear interpolation between samples; clamps outside [0, duration].
    Vec3 position_at(double t) const;
};

/// Two ground terminals and the UAV's operating limits.
struct RelayGeometry {
    Vec3 source_position;
    Vec3 destination_position{1000.0, 0.0, 0.0};
    double uav_altitude = 100.0;
    double v_max = 0.0;
    double delay_budget = 20.0;
    /// Antenna height of both ground terminals. Only enters link geometry;
    /// the terminals themselves sit at z = 0.
    double terminal_height = 0.0;

    /// Source at the origin, destination `separation` meters along +x.
    static RelayGeometry on_axis(double separation, double altitude, double v_max,
                                 double delay_budget);

    double separation() const noexcept;
    Vec3 above_source() const noexcept;
    Vec3 above_destination() const noexcept;
    Vec3 midpoint() const noexcept;

    void validate() const;
};

/// Number of whole steps in `duration`; throws ConfigError when `time_step`
/// does not divide it (tolerance 1e-9 steps).
std::size_t steps_in(double duration, double time_step);

/// One 2δ relaying cycle starting and ending at the midpoint; see README.
Trajectory mobile_relay_trajectory(const RelayGeometry& geom, double time_step);

/// Constant trajectory over one cycle at the midpoint.
Trajectory static_relay_trajectory(const RelayGeometry& geom, double time_step);

/// Load-carry-deliver shuttle: hover over source, fly, hover over
/// destination, fly back. Throws InfeasibleError when v_max * δ < R.
Trajectory ferry_trajectory(const RelayGeometry& geom, double time_step);

/// Ferry hover time at each end, δ - R / v_max.
double ferry_hover_duration(const RelayGeometry& geom);

Trajectory overflight_trajectory(Vec3 start, Vec3 end, double speed, double time_step);

enum class ViolationKind { NonMonotoneTime, NonUniformStep, SpeedExceeded };

struct Violation {
    std::size_t index = 0;
    ViolationKind kind = ViolationKind::SpeedExceeded;
    double value = 0.0;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate_trajectory(const Trajectory& traj, double v_max);

std::string to_string(ViolationKind kind);

/// CSV with header time_s,x_m,y_m,z_m.
void write_trajectory_csv(const Trajectory& traj, std::ostream& out);

} // namespace uavcomm::mobility

#endif
