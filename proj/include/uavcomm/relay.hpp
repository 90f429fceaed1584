#ifndef UAVCOMM_RELAY_HPP
#define UAVCOMM_RELAY_HPP

#include "uavcomm/channel.hpp"
#include "uavcomm/mobility.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uavcomm::relay {

enum class RelayStrategy { Static, Mobile, Ferry };

std::string to_string(RelayStrategy strategy);
/// Accepts "static", "mobile", "ferry"; throws ConfigError otherwise.
RelayStrategy parse_strategy(std::string_view name);

/// On-board data buffer, in bits/Hz. An empty capacity means unbounded.
class BufferState {
public:
    explicit BufferState(std::optional<double> capacity = std::nullopt);

    bool unbounded() const noexcept { return !capacity_; }
    double capacity() const noexcept;
    double occupancy() const noexcept { return occupancy_; }

    /// Stores up to `bits`, clipped at capacity. Returns the amount stored.
    double fill(double bits);
    /// Removes up to `bits`, never more than the occupancy. Returns the amount removed.
    double drain(double bits);

private:
    std::optional<double> capacity_;
    double occupancy_ = 0.0;
};

/// One row of the per-step cycle trace. `se_bpshz` is the rate of the link
/// active during the step starting at `time` (0 when idle) and
/// `buffer_bits` the occupancy at `time`.
struct CycleSample {
    double time = 0.0;
    double pl_src_db = 0.0;
    double pl_dst_db = 0.0;
    double se_bpshz = 0.0;
    double buffer_bits = 0.0;

    friend bool operator==(const CycleSample&, const CycleSample&) = default;
};

struct RelayRunResult {
    double bits_received = 0.0;
    double bits_delivered = 0.0;
    double end_to_end_se = 0.0;
    double peak_occupancy = 0.0;
    double final_occupancy = 0.0;
    std::vector<CycleSample> trace;
};

struct RelayOptions {
    std::optional<double> buffer_capacity; // unbounded when empty
    double time_step = 0.01;
    std::uint64_t fading_seed = 0;
};

/// The path flown for `strategy` over one cycle.
mobility::Trajectory trajectory_for(RelayStrategy strategy, const mobility::RelayGeometry& geom,
                                    double time_step);

/// SNR anchor at the UAV-terminal slant distance from the midpoint.
channel::SnrReference midpoint_reference(const mobility::RelayGeometry& geom, double snr_db);

/// Simulates one half-duplex decode-and-forward cycle [0, 2δ]: the first δ
/// seconds the UAV receives from the source into its buffer, the next δ it
/// drains the buffer to the destination. Left-endpoint integration.
RelayRunResult simulate_cycle(RelayStrategy strategy, const mobility::RelayGeometry& geom,
                              const channel::ChannelModel& model, const channel::SnrReference& ref,
                              const RelayOptions& options = {});

struct PathLossSample {
    double time = 0.0;
    double source_db = 0.0;
    double destination_db = 0.0;
};

/// Free-space loss to both terminals at every sample of the cycle.
std::vector<PathLossSample> path_loss_trace(RelayStrategy strategy,
                                            const mobility::RelayGeometry& geom, double frequency,
                                            double time_step);

/// Loss of the link in use at `time`: source link before δ, destination after.
double active_link_loss(const PathLossSample& sample, double delay_budget) noexcept;

struct SweepRow {
    double delay = 0.0;
    double speed = 0.0;
    RelayStrategy strategy = RelayStrategy::Static;
    bool feasible = true;
    double se = 0.0;
    double peak_buffer = 0.0;
    std::string note;
};

/// One row per (delay, speed) pair, delay-major, in input order. The SNR
/// reference is anchored at the template's midpoint. Ferry cells that cannot
/// be flown are returned with feasible = false.
std::vector<SweepRow> sweep_delay(RelayStrategy strategy, const mobility::RelayGeometry& geom,
                                  std::span<const double> delays, std::span<const double> speeds,
                                  const channel::ChannelModel& model, double reference_snr_db,
                                  const RelayOptions& options = {}, bool parallel = false);

/// Peak occupancy of the unbounded-buffer run: the smallest capacity that
/// leaves the throughput unchanged.
double buffer_requirement(RelayStrategy strategy, const mobility::RelayGeometry& geom,
                          const channel::ChannelModel& model, const channel::SnrReference& ref,
                          const RelayOptions& options = {});

} // namespace uavcomm::relay

#endif
