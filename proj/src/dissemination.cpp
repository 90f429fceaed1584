#include "uavcomm/dissemination.hpp"

#include "uavcomm/error.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <optional>

namespace uavcomm::dissemination {

namespace {

double ground_distance(const GroundNode& a, const GroundNode& b)
{
    return std::hypot(a.position.x - b.position.x, a.position.y - b.position.y);
}

bool in_coverage(mobility::Vec3 uav, const GroundNode& node, const ReceptionModel& rx)
{
    return mobility::distance(uav, {node.position.x, node.position.y, 0.0}) <= rx.coverage_radius;
}

void validate_file(const FileSpec& file)
{
    if (file.source_packet_count == 0 || file.decode_threshold == 0) {
        throw DomainError("file must have at least one source packet");
    }
}

} // namespace

void ReceptionModel::validate() const
{
    require_positive(coverage_radius, "coverage radius");
    if (!(erasure_probability >= 0.0 && erasure_probability < 1.0)) {
        throw DomainError("erasure probability must lie in [0, 1)");
    }
}

D2dGraph::D2dGraph(const std::vector<GroundNode>& nodes, double d2d_range)
    : range_(d2d_range), adjacency_(nodes.size())
{
    require_non_negative(d2d_range, "D2D range");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            if (ground_distance(nodes[i], nodes[j]) <= d2d_range) {
                adjacency_[i].push_back(j);
                adjacency_[j].push_back(i);
            }
        }
    }
}

bool D2dGraph::adjacent(std::size_t a, std::size_t b) const
{
    const auto& n = adjacency_.at(a);
    return std::find(n.begin(), n.end(), b) != n.end();
}

std::vector<std::vector<std::size_t>> D2dGraph::components() const
{
    std::vector<std::vector<std::size_t>> out;
    std::vector<bool> seen(adjacency_.size(), false);
    for (std::size_t start = 0; start < adjacency_.size(); ++start) {
        if (seen[start]) {
            continue;
        }
        std::vector<std::size_t> members;
        std::vector<std::size_t> stack{start};
        seen[start] = true;
        while (!stack.empty()) {
            const std::size_t v = stack.back();
            stack.pop_back();
            members.push_back(v);
            for (std::size_t w : adjacency_[v]) {
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            }
        }
        std::sort(members.begin(), members.end());
        out.push_back(std::move(members));
    }
    return out;
}

std::size_t slot_count(const mobility::Trajectory& traj, double slot_duration)
{
    require_positive(slot_duration, "slot duration");
    const double slots = traj.duration() / slot_duration;
    return static_cast<std::size_t>(std::max(0.0, std::ceil(slots - 1e-9)));
}

BroadcastResult phase1_broadcast(const mobility::Trajectory& traj, std::vector<GroundNode> nodes,
                                 const FileSpec& file, const ReceptionModel& rx,
                                 double slot_duration, RandomStream& rng)
{
    validate_file(file);
    rx.validate();
    const std::size_t slots = slot_count(traj, slot_duration);
    for (std::size_t s = 0; s < slots; ++s) {
        const mobility::Vec3 uav = traj.position_at(static_cast<double>(s) * slot_duration);
        for (auto& node : nodes) {
            if (in_coverage(uav, node, rx) && rng.uniform() >= rx.erasure_probability) {
                node.received_packets.insert(s);
            }
        }
    }
    return {std::move(nodes), slots};
}

std::vector<ComponentSummary> summarize_components(const std::vector<GroundNode>& nodes,
                                                   const D2dGraph& graph, const FileSpec& file)
{
    std::vector<ComponentSummary> out;
    for (auto& members : graph.components()) {
        PacketSet all;
        for (std::size_t i : members) {
            all.insert(nodes[i].received_packets.begin(), nodes[i].received_packets.end());
        }
        ComponentSummary summary;
        summary.members = std::move(members);
        summary.packet_union = all.size();
        summary.decodable = all.size() >= file.decode_threshold;
        out.push_back(std::move(summary));
    }
    return out;
}

ExchangeResult phase2_exchange(std::vector<GroundNode> nodes, const D2dGraph& graph,
                               const FileSpec& file, RandomStream& rng,
                               const ExchangeOptions& options)
{
    validate_file(file);
    if (graph.size() != nodes.size()) {
        throw DomainError("D2D graph does not match the node list");
    }
    auto all_decoded = [&] {
        return std::all_of(nodes.begin(), nodes.end(),
                           [&](const GroundNode& n) { return file.decodes(n); });
    };

    ExchangeResult result;
    if (all_decoded()) {
        result.success = true;
        result.nodes = std::move(nodes);
        return result;
    }
    result.components = summarize_components(nodes, graph, file);
    // D2D only redistributes, so a component whose union is short can never
    // decode.
    if (std::any_of(result.components.begin(), result.components.end(),
                    [](const ComponentSummary& c) { return !c.decodable; })) {
        result.stalled = true;
        result.nodes = std::move(nodes);
        return result;
    }

    std::vector<PacketSet> forwarded(nodes.size());
    std::vector<std::optional<std::size_t>> choice(nodes.size());
    std::vector<std::size_t> candidates;
    for (std::size_t round = 1; round <= options.round_cap; ++round) {
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const PacketSet& held = nodes[i].received_packets;
            choice[i].reset();
            if (held.empty()) {
                continue;
            }
            candidates.clear();
            std::set_difference(held.begin(), held.end(), forwarded[i].begin(), forwarded[i].end(),
                                std::back_inserter(candidates));
            if (candidates.empty()) {
                candidates.assign(held.begin(), held.end());
            }
            const std::size_t packet = candidates[rng.uniform_index(candidates.size())];
            forwarded[i].insert(packet);
            choice[i] = packet;
        }
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (!choice[i]) {
                continue;
            }
            for (std::size_t j : graph.neighbors(i)) {
                nodes[j].received_packets.insert(*choice[i]);
            }
        }
        if (options.observer) {
            options.observer(round, nodes);
        }
        if (all_decoded()) {
            result.success = true;
            result.rounds_used = round;
            result.components = summarize_components(nodes, graph, file);
            result.nodes = std::move(nodes);
            return result;
        }
    }
    result.round_cap_hit = true;
    result.rounds_used = options.round_cap;
    result.components = summarize_components(nodes, graph, file);
    result.nodes = std::move(nodes);
    return result;
}

BaselineResult run_baseline(const mobility::Trajectory& traj, const std::vector<GroundNode>& nodes,
                            const FileSpec& file, const ReceptionModel& rx, double slot_duration,
                            RandomStream& rng, std::size_t pass_cap)
{
    validate_file(file);
    rx.validate();
    const std::size_t k = file.source_packet_count;
    const std::size_t slots = slot_count(traj, slot_duration);

    std::vector<std::vector<bool>> have(nodes.size(), std::vector<bool>(k, false));
    std::vector<std::size_t> held(nodes.size(), 0);
    std::size_t complete = 0;

    BaselineResult result;
    std::size_t transmitted = 0;
    for (std::size_t pass = 0; pass < pass_cap && slots > 0 && complete < nodes.size(); ++pass) {
        result.passes = pass + 1;
        for (std::size_t s = 0; s < slots && complete < nodes.size(); ++s) {
            const std::size_t packet = transmitted % k;
            ++transmitted;
            const double t = static_cast<double>(s) * slot_duration;
            const mobility::Vec3 uav =
                traj.position_at(pass % 2 == 0 ? t : traj.duration() - t);
            for (std::size_t i = 0; i < nodes.size(); ++i) {
                if (in_coverage(uav, nodes[i], rx) && rng.uniform() >= rx.erasure_probability &&
                    !have[i][packet]) {
                    have[i][packet] = true;
                    if (++held[i] == k) {
                        ++complete;
                    }
                }
            }
        }
    }
    result.uav_transmissions = transmitted;
    result.success = complete == nodes.size();
    result.missing_per_node.resize(nodes.size());
    std::transform(held.begin(), held.end(), result.missing_per_node.begin(),
                   [k](std::size_t h) { return k - h; });
    return result;
}

std::vector<std::vector<int>> cluster_nodes(const std::vector<GroundNode>& nodes, double d2d_range)
{
    const D2dGraph graph(nodes, d2d_range);
    std::vector<std::vector<int>> out;
    for (const auto& members : graph.components()) {
        std::vector<int> ids;
        ids.reserve(members.size());
        for (std::size_t i : members) {
            ids.push_back(nodes[i].id);
        }
        out.push_back(std::move(ids));
    }
    return out;
}

std::vector<GroundNode> nodes_on_line(std::size_t count, double length)
{
    std::vector<GroundNode> nodes(count);
    const double spacing = count ? length / static_cast<double>(count) : 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        nodes[i].id = static_cast<int>(i);
        nodes[i].position = {(static_cast<double>(i) + 0.5) * spacing, 0.0};
    }
    return nodes;
}

} // namespace uavcomm::dissemination
