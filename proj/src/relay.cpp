#include "uavcomm/relay.hpp"

#include "uavcomm/error.hpp"
#include "uavcomm/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace uavcomm::relay {

using channel::ChannelModel;
using channel::LinkGeometry;
using channel::SnrReference;
using mobility::RelayGeometry;
using mobility::Vec3;

namespace {

LinkGeometry link_to(Vec3 uav, Vec3 terminal, double terminal_height)
{
    return {mobility::horizontal_distance(uav, terminal), uav.z, terminal_height};
}

} // namespace

std::string to_string(RelayStrategy strategy)
{
    switch (strategy) {
    case RelayStrategy::Static:
        return "static";
    case RelayStrategy::Mobile:
        return "mobile";
    case RelayStrategy::Ferry:
        return "ferry";
    }
    return "unknown";
}

RelayStrategy parse_strategy(std::string_view name)
{
    if (name == "static") {
        return RelayStrategy::Static;
    }
    if (name == "mobile") {
        return RelayStrategy::Mobile;
    }
    if (name == "ferry") {
        return RelayStrategy::Ferry;
    }
    throw ConfigError("unknown relay strategy '" + std::string(name) +
                      "' (expected static, mobile or ferry)");
}

BufferState::BufferState(std::optional<double> capacity) : capacity_(capacity)
{
    if (capacity_ && !(*capacity_ >= 0.0)) {
        throw DomainError("buffer capacity must be non-negative");
    }
}

double BufferState::capacity() const noexcept
{
    return capacity_ ? *capacity_ : std::numeric_limits<double>::infinity();
}

double BufferState::fill(double bits)
{
    const double before = occupancy_;
    occupancy_ = capacity_ ? std::min(occupancy_ + bits, *capacity_) : occupancy_ + bits;
    return occupancy_ - before;
}

double BufferState::drain(double bits)
{
    const double taken = std::min(bits, occupancy_);
    occupancy_ -= taken;
    return taken;
}

mobility::Trajectory trajectory_for(RelayStrategy strategy, const RelayGeometry& geom,
                                    double time_step)
{
    switch (strategy) {
    case RelayStrategy::Static:
        return mobility::static_relay_trajectory(geom, time_step);
    case RelayStrategy::Mobile:
        return mobility::mobile_relay_trajectory(geom, time_step);
    case RelayStrategy::Ferry:
        return mobility::ferry_trajectory(geom, time_step);
    }
    throw DomainError("unknown relay strategy");
}

SnrReference midpoint_reference(const RelayGeometry& geom, double snr_db)
{
    const LinkGeometry link = link_to(geom.midpoint(), geom.source_position, geom.terminal_height);
    return {snr_db, link.slant_distance()};
}

RelayRunResult simulate_cycle(RelayStrategy strategy, const RelayGeometry& geom,
                              const ChannelModel& model, const SnrReference& ref,
                              const RelayOptions& options)
{
    model.validate();
    require_positive(ref.reference_distance, "reference distance");
    BufferState buffer(options.buffer_capacity);
    const mobility::Trajectory traj = trajectory_for(strategy, geom, options.time_step);
    const std::size_t n = mobility::steps_in(geom.delay_budget, options.time_step);
    const std::size_t last = 2 * n;
    const double dt = options.time_step;

    const auto* rician = std::get_if<channel::Rician>(&model.variant);
    RandomStream rng(options.fading_seed);

    RelayRunResult result;
    result.trace.reserve(traj.states.size());
    for (std::size_t k = 0; k <= last; ++k) {
        const auto& state = traj.states[k];
        const bool first_phase = k < n;
        const LinkGeometry src = link_to(state.position, geom.source_position, geom.terminal_height);
        const LinkGeometry dst =
            link_to(state.position, geom.destination_position, geom.terminal_height);

        CycleSample sample;
        sample.time = state.time;
        sample.pl_src_db = channel::path_loss(src, model);
        sample.pl_dst_db = channel::path_loss(dst, model);
        sample.buffer_bits = buffer.occupancy();

        // A ferry only talks while hovering over the step (it hovers over the
        // source in phase 1 and over the destination in phase 2).
        const std::size_t step = k < last ? k : k - 1;
        const bool active = strategy != RelayStrategy::Ferry || traj.states[step].speed == 0.0;

        double snr_linear = channel::db_to_linear(
            channel::snr_at(first_phase ? src : dst, model, ref));
        if (rician && k < last) {
            snr_linear *= std::norm(channel::sample_rician_gain(rician->k_factor_db, rng));
        }
        const double rate = active ? std::log2(1.0 + snr_linear) : 0.0;
        sample.se_bpshz = rate;
        result.trace.push_back(sample);

        if (k < last) {
            if (first_phase) {
                result.bits_received += buffer.fill(rate * dt);
            } else {
                result.bits_delivered += buffer.drain(rate * dt);
            }
            result.peak_occupancy = std::max(result.peak_occupancy, buffer.occupancy());
        }
    }
    result.final_occupancy = buffer.occupancy();
    result.end_to_end_se = result.bits_delivered / (2.0 * geom.delay_budget);
    return result;
}

std::vector<PathLossSample> path_loss_trace(RelayStrategy strategy, const RelayGeometry& geom,
                                            double frequency, double time_step)
{
    ChannelModel model;
    model.variant = channel::FreeSpace{};
    model.carrier_frequency = frequency;
    model.validate();
    const mobility::Trajectory traj = trajectory_for(strategy, geom, time_step);

    std::vector<PathLossSample> out;
    out.reserve(traj.states.size());
    for (const auto& state : traj.states) {
        out.push_back({state.time,
                       channel::path_loss(
                           link_to(state.position, geom.source_position, geom.terminal_height),
                           model),
                       channel::path_loss(link_to(state.position, geom.destination_position,
                                                  geom.terminal_height),
                                          model)});
    }
    return out;
}

double active_link_loss(const PathLossSample& sample, double delay_budget) noexcept
{
    return sample.time < delay_budget ? sample.source_db : sample.destination_db;
}

std::vector<SweepRow> sweep_delay(RelayStrategy strategy, const RelayGeometry& geom,
                                  std::span<const double> delays, std::span<const double> speeds,
                                  const ChannelModel& model, double reference_snr_db,
                                  const RelayOptions& options, bool parallel)
{
    if (delays.empty() || speeds.empty()) {
        throw ConfigError("sweep needs at least one delay and one speed");
    }
    const SnrReference ref = midpoint_reference(geom, reference_snr_db);
    const std::size_t cells = delays.size() * speeds.size();

    return parallel_map(
        cells,
        [&](std::size_t i) {
            RelayGeometry cell = geom;
            cell.delay_budget = delays[i / speeds.size()];
            cell.v_max = speeds[i % speeds.size()];
            SweepRow row;
            row.delay = cell.delay_budget;
            row.speed = cell.v_max;
            row.strategy = strategy;
            try {
                const RelayRunResult run = simulate_cycle(strategy, cell, model, ref, options);
                row.se = run.end_to_end_se;
                row.peak_buffer = run.peak_occupancy;
            } catch (const InfeasibleError& e) {
                row.feasible = false;
                row.se = std::numeric_limits<double>::quiet_NaN();
                row.peak_buffer = std::numeric_limits<double>::quiet_NaN();
                row.note = e.what();
            }
            return row;
        },
        parallel);
}

double buffer_requirement(RelayStrategy strategy, const RelayGeometry& geom,
                          const ChannelModel& model, const SnrReference& ref,
                          const RelayOptions& options)
{
    RelayOptions unbounded = options;
    unbounded.buffer_capacity.reset();
    return simulate_cycle(strategy, geom, model, ref, unbounded).peak_occupancy;
}

} // namespace uavcomm::relay
