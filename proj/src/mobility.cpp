#include "uavcomm/mobility.hpp"

#include "uavcomm/csv.hpp"
#include "uavcomm/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace uavcomm::mobility {

namespace {

constexpr double kStepTolerance = 1e-9;
constexpr double kSpeedTolerance = 1e-9;

// Fills `speed` from the displacement over each outgoing step.
void assign_speeds(Trajectory& traj)
{
    auto& states = traj.states;
    for (std::size_t k = 0; k + 1 < states.size(); ++k) {
        states[k].speed = distance(states[k + 1].position, states[k].position) / traj.time_step;
    }
    if (!states.empty()) {
        states.back().speed = 0.0;
    }
}

// Point that is `fraction` of the way from `from` to `to`.
Vec3 lerp(Vec3 from, Vec3 to, double fraction) { return from + fraction * (to - from); }

} // namespace

double norm(Vec3 v) noexcept { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

double distance(Vec3 a, Vec3 b) noexcept { return norm(a - b); }

double horizontal_distance(Vec3 a, Vec3 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

Vec3 Trajectory::position_at(double t) const
{
    if (states.empty()) {
        throw DomainError("position_at on an empty trajectory");
    }
    if (states.size() == 1 || t <= 0.0) {
        return states.front().position;
    }
    if (t >= states.back().time) {
        return states.back().position;
    }
    const auto k = std::min(static_cast<std::size_t>(t / time_step), states.size() - 2);
    const double fraction = std::clamp((t - states[k].time) / time_step, 0.0, 1.0);
    return lerp(states[k].position, states[k + 1].position, fraction);
}

RelayGeometry RelayGeometry::on_axis(double separation, double altitude, double v_max,
                                     double delay_budget)
{
    RelayGeometry geom;
    geom.source_position = {0.0, 0.0, 0.0};
    geom.destination_position = {separation, 0.0, 0.0};
    geom.uav_altitude = altitude;
    geom.v_max = v_max;
    geom.delay_budget = delay_budget;
    return geom;
}

double RelayGeometry::separation() const noexcept
{
    return horizontal_distance(source_position, destination_position);
}

Vec3 RelayGeometry::above_source() const noexcept
{
    return {source_position.x, source_position.y, uav_altitude};
}

Vec3 RelayGeometry::above_destination() const noexcept
{
    return {destination_position.x, destination_position.y, uav_altitude};
}

Vec3 RelayGeometry::midpoint() const noexcept
{
    return {0.5 * (source_position.x + destination_position.x),
            0.5 * (source_position.y + destination_position.y), uav_altitude};
}

void RelayGeometry::validate() const
{
    require_positive(separation(), "source-destination separation");
    require_positive(uav_altitude, "UAV altitude");
    require_positive(delay_budget, "delay budget");
    require_non_negative(v_max, "maximum speed");
    if (source_position.z != 0.0 || destination_position.z != 0.0) {
        throw DomainError("source and destination must be at ground level (z = 0)");
    }
}

std::size_t steps_in(double duration, double time_step)
{
    require_positive(time_step, "time step");
    require_positive(duration, "duration");
    const double ratio = duration / time_step;
    const double whole = std::round(ratio);
    if (whole < 1.0 || std::abs(ratio - whole) > kStepTolerance * std::max(1.0, whole)) {
        std::ostringstream msg;
        msg << "time step " << time_step << " s does not divide " << duration << " s evenly";
        throw ConfigError(msg.str());
    }
    return static_cast<std::size_t>(whole);
}

Trajectory mobile_relay_trajectory(const RelayGeometry& geom, double time_step)
{
    geom.validate();
    const std::size_t n = steps_in(geom.delay_budget, time_step);
    const double half = 0.5 * geom.separation();
    const Vec3 mid = geom.midpoint();
    const Vec3 to_source = geom.above_source() - mid;
    const Vec3 to_destination = geom.above_destination() - mid;

    Trajectory traj;
    traj.time_step = time_step;
    traj.states.reserve(2 * n + 1);
    for (std::size_t k = 0; k <= 2 * n; ++k) {
        const bool first_phase = k < n;
        const std::size_t local = first_phase ? k : k - n;
        // Elapsed and remaining phase time, both in whole steps so that the
        // out-and-back path is exactly symmetric.
        const double elapsed = static_cast<double>(local) * time_step;
        const double remaining = static_cast<double>(n - local) * time_step;
        const double progress = std::min(geom.v_max * std::min(elapsed, remaining), half);
        const Vec3 heading = first_phase ? to_source : to_destination;
        traj.states.push_back({static_cast<double>(k) * time_step,
                               mid + (progress / half) * heading, 0.0});
    }
    assign_speeds(traj);
    return traj;
}

Trajectory static_relay_trajectory(const RelayGeometry& geom, double time_step)
{
    geom.validate();
    const std::size_t n = steps_in(geom.delay_budget, time_step);
    Trajectory traj;
    traj.time_step = time_step;
    traj.states.reserve(2 * n + 1);
    for (std::size_t k = 0; k <= 2 * n; ++k) {
        traj.states.push_back({static_cast<double>(k) * time_step, geom.midpoint(), 0.0});
    }
    return traj;
}

double ferry_hover_duration(const RelayGeometry& geom)
{
    geom.validate();
    const double r = geom.separation();
    // Relative slack so that v = R / δ computed in floating point still counts
    // as feasible.
    if (geom.v_max * geom.delay_budget < r * (1.0 - 1e-12)) {
        const double minimum = r / geom.delay_budget;
        std::ostringstream msg;
        msg << "data ferry infeasible: v_max = " << geom.v_max << " m/s cannot cover " << r
            << " m within " << geom.delay_budget << " s; minimum feasible speed is " << minimum
            << " m/s";
        throw InfeasibleError(msg.str(), minimum);
    }
    return std::max(0.0, geom.delay_budget - r / geom.v_max);
}

Trajectory ferry_trajectory(const RelayGeometry& geom, double time_step)
{
    const double hover = ferry_hover_duration(geom);
    const std::size_t n = steps_in(geom.delay_budget, time_step);
    const double r = geom.separation();
    const Vec3 from = geom.above_source();
    const Vec3 to = geom.above_destination();

    Trajectory traj;
    traj.time_step = time_step;
    traj.states.reserve(2 * n + 1);
    for (std::size_t k = 0; k <= 2 * n; ++k) {
        const bool first_phase = k < n;
        const double local = static_cast<double>(first_phase ? k : k - n) * time_step;
        const double flown = std::clamp(geom.v_max * (local - hover), 0.0, r);
        const double along = first_phase ? flown : r - flown;
        traj.states.push_back({static_cast<double>(k) * time_step, lerp(from, to, along / r), 0.0});
    }
    assign_speeds(traj);
    return traj;
}

Trajectory overflight_trajectory(Vec3 start, Vec3 end, double speed, double time_step)
{
    require_positive(speed, "overflight speed");
    require_positive(time_step, "time step");
    Trajectory traj;
    traj.time_step = time_step;
    const double length = distance(start, end);
    if (length == 0.0) {
        traj.states.push_back({0.0, start, 0.0});
        return traj;
    }
    const auto n = static_cast<std::size_t>(std::ceil(length / (speed * time_step) - 1e-9));
    traj.states.reserve(n + 1);
    for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) * time_step;
        const double covered = std::min(speed * t, length);
        traj.states.push_back({t, lerp(start, end, covered / length), 0.0});
    }
    assign_speeds(traj);
    return traj;
}

ValidationReport validate_trajectory(const Trajectory& traj, double v_max)
{
    ValidationReport report;
    const auto& states = traj.states;
    for (std::size_t k = 1; k < states.size(); ++k) {
        const double dt = states[k].time - states[k - 1].time;
        if (!(dt > 0.0)) {
            report.violations.push_back({k, ViolationKind::NonMonotoneTime, dt});
        } else if (!(std::abs(dt - traj.time_step) <= kStepTolerance)) {
            report.violations.push_back({k, ViolationKind::NonUniformStep, dt});
        }
        if (traj.time_step > 0.0) {
            const double speed =
                distance(states[k].position, states[k - 1].position) / traj.time_step;
            if (speed > v_max + kSpeedTolerance) {
                report.violations.push_back({k, ViolationKind::SpeedExceeded, speed});
            }
        }
    }
    return report;
}

std::string to_string(ViolationKind kind)
{
    switch (kind) {
    case ViolationKind::NonMonotoneTime:
        return "non_monotone_time";
    case ViolationKind::NonUniformStep:
        return "non_uniform_step";
    case ViolationKind::SpeedExceeded:
        return "speed_exceeded";
    }
    return "unknown";
}

void write_trajectory_csv(const Trajectory& traj, std::ostream& out)
{
    csv::Writer writer(out);
    writer.header({"time_s", "x_m", "y_m", "z_m"});
    for (const auto& s : traj.states) {
        writer.row(s.time, s.position.x, s.position.y, s.position.z);
    }
}

} // namespace uavcomm::mobility
