#ifndef UAVCOMM_DISSEMINATION_HPP
#define UAVCOMM_DISSEMINATION_HPP

#include "uavcomm/mobility.hpp"
#include "uavcomm/random.hpp"

#include <cstddef>
#include <functional>
#include <set>
#include <vector>

namespace uavcomm::dissemination {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

using PacketSet = std::set<std::size_t>;

struct GroundNode {
    int id = 0;
    Vec2 position;
    PacketSet received_packets;
};

/// Ideal rateless code: any `decode_threshold` distinct packets decode.
struct FileSpec {
    std::size_t source_packet_count = 50;
    std::size_t decode_threshold = 50;

    static FileSpec ideal(std::size_t k) { return {k, k}; }
    bool decodes(const GroundNode& node) const noexcept
    {
        return node.received_packets.size() >= decode_threshold;
    }
};

/// Binary coverage disc plus i.i.d. erasures.
struct ReceptionModel {
    double coverage_radius = 300.0;
    double erasure_probability = 0.0;

    void validate() const;
};

/// Undirected D2D connectivity: i ~ j iff ground distance <= range.
class D2dGraph {
public:
    D2dGraph(const std::vector<GroundNode>& nodes, double d2d_range);

    std::size_t size() const noexcept { return adjacency_.size(); }
    double range() const noexcept { return range_; }
    /// Neighbors of the node at position `index` in the node list.
    const std::vector<std::size_t>& neighbors(std::size_t index) const { return adjacency_.at(index); }
    bool adjacent(std::size_t a, std::size_t b) const;

    /// Connected components as lists of node indices, each sorted, ordered
    /// by smallest member.
    std::vector<std::vector<std::size_t>> components() const;

private:
    double range_;
    std::vector<std::vector<std::size_t>> adjacency_;
};

struct BroadcastResult {
    std::vector<GroundNode> nodes;
    std::size_t uav_transmissions = 0;
};

/// Number of broadcast slots of duration `slot_duration` that fit in the
/// flight (slot s starts at s * slot_duration < duration).
std::size_t slot_count(const mobility::Trajectory& traj, double slot_duration);

/// Phase 1: one fresh coded packet per slot (packet index = slot index).
BroadcastResult phase1_broadcast(const mobility::Trajectory& traj, std::vector<GroundNode> nodes,
                                 const FileSpec& file, const ReceptionModel& rx,
                                 double slot_duration, RandomStream& rng);

struct ComponentSummary {
    std::vector<std::size_t> members; // node indices
    std::size_t packet_union = 0;
    bool decodable = false;
};

/// Called after each completed round with the round number (1-based) and
/// the node state.
using RoundObserver = std::function<void(std::size_t, const std::vector<GroundNode>&)>;

struct ExchangeOptions {
    std::size_t round_cap = 10000;
    RoundObserver observer;
};

struct ExchangeResult {
    std::vector<GroundNode> nodes;
    std::size_t rounds_used = 0;
    bool success = false;
    bool stalled = false;
    bool round_cap_hit = false;
    std::vector<ComponentSummary> components;
};

/// Phase 2: synchronous D2D gossip. Every round each node holding packets
/// broadcasts one of them to all neighbors, picked uniformly among the
/// packets it has not forwarded yet (uniformly among all once every held
/// packet has been forwarded).
ExchangeResult phase2_exchange(std::vector<GroundNode> nodes, const D2dGraph& graph,
                               const FileSpec& file, RandomStream& rng,
                               const ExchangeOptions& options = {});

struct BaselineResult {
    std::size_t uav_transmissions = 0;
    std::size_t passes = 0;
    bool success = false;
    std::vector<std::size_t> missing_per_node;
};

/// Repeated uncoded broadcast: packets 0..K-1 cycled continuously while the
/// UAV flies `traj` back and forth (odd passes in reverse), until every node
/// holds all K packets or `pass_cap` passes have been flown.
BaselineResult run_baseline(const mobility::Trajectory& traj, const std::vector<GroundNode>& nodes,
                            const FileSpec& file, const ReceptionModel& rx, double slot_duration,
                            RandomStream& rng, std::size_t pass_cap = 1000);

/// Connected components of the D2D graph, as lists of node ids.
std::vector<std::vector<int>> cluster_nodes(const std::vector<GroundNode>& nodes, double d2d_range);

/// Per-component packet unions, indexed like D2dGraph::components().
std::vector<ComponentSummary> summarize_components(const std::vector<GroundNode>& nodes,
                                                   const D2dGraph& graph, const FileSpec& file);

/// `count` nodes evenly spaced on the segment [0, length] along x (cell
/// centers), ids 0..count-1, empty packet sets.
std::vector<GroundNode> nodes_on_line(std::size_t count, double length);

} // namespace uavcomm::dissemination

#endif
