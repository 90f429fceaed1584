#include "uavcomm/dissemination.hpp"
#include "uavcomm/error.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace mob = uavcomm::mobility;
using namespace uavcomm::dissemination;
using uavcomm::RandomStream;

namespace {

mob::Trajectory hover(mob::Vec3 at, double duration, double step)
{
    mob::Trajectory traj;
    traj.time_step = step;
    const auto n = static_cast<std::size_t>(std::llround(duration / step));
    for (std::size_t k = 0; k <= n; ++k) {
        traj.states.push_back({static_cast<double>(k) * step, at, 0.0});
    }
    return traj;
}

GroundNode node(int id, double x, double y = 0.0, PacketSet packets = {})
{
    return {id, {x, y}, std::move(packets)};
}

PacketSet range(std::size_t lo, std::size_t hi)
{
    PacketSet s;
    for (std::size_t i = lo; i < hi; ++i) {
        s.insert(i);
    }
    return s;
}

mob::Trajectory standard_flight()
{
    return mob::overflight_trajectory({0.0, 0.0, 100.0}, {1000.0, 0.0, 100.0}, 20.0, 0.5);
}

const ReceptionModel standard_rx{300.0, 0.3};

} // namespace

TEST_CASE("file spec and reception model")
{
    CHECK(FileSpec::ideal(50).decode_threshold == 50);
    CHECK(FileSpec::ideal(3).decodes(node(0, 0.0, 0.0, range(0, 3))));
    CHECK_FALSE(FileSpec::ideal(3).decodes(node(0, 0.0, 0.0, range(0, 2))));
    CHECK_THROWS_AS((ReceptionModel{300.0, 1.0}.validate()), uavcomm::DomainError);
    CHECK_THROWS_AS((ReceptionModel{0.0, 0.1}.validate()), uavcomm::DomainError);
    CHECK_NOTHROW((ReceptionModel{300.0, 0.0}.validate()));
}

TEST_CASE("slot count")
{
    CHECK(slot_count(standard_flight(), 0.5) == 100);
    CHECK(slot_count(hover({}, 5.0, 0.5), 0.5) == 10);
    CHECK(slot_count(hover({}, 5.0, 0.1), 0.3) == 17);
}

TEST_CASE("perfect channel under a hovering UAV")
{
    RandomStream rng(1);
    const auto out = phase1_broadcast(hover({0.0, 0.0, 100.0}, 5.0, 0.5), {node(0, 0.0)},
                                      FileSpec::ideal(10), {300.0, 0.0}, 0.5, rng);
    CHECK(out.uav_transmissions == 10);
    CHECK(out.nodes[0].received_packets == range(0, 10));
    CHECK(FileSpec::ideal(10).decodes(out.nodes[0]));
}

TEST_CASE("out of coverage receives nothing")
{
    RandomStream rng(1);
    const auto out = phase1_broadcast(hover({0.0, 0.0, 100.0}, 5.0, 0.5), {node(0, 290.0), node(1, 282.0)},
                                      FileSpec::ideal(10), {300.0, 0.0}, 0.5, rng);
    CHECK(out.nodes[0].received_packets.empty()); // slant 306.8 m
    CHECK(out.nodes[1].received_packets.size() == 10); // slant 299.2 m
}

TEST_CASE("near-total erasure")
{
    RandomStream rng(3);
    const std::size_t slots = 20000;
    std::vector<GroundNode> nodes{node(0, 0.0), node(1, 10.0), node(2, -10.0)};
    const auto out = phase1_broadcast(hover({0.0, 0.0, 100.0}, slots * 0.5, 0.5), nodes, FileSpec::ideal(50),
                                      {300.0, 0.999}, 0.5, rng);
    double total = 0.0;
    for (const auto& n : out.nodes) {
        total += static_cast<double>(n.received_packets.size());
    }
    CHECK(total / 3.0 == doctest::Approx(0.001 * slots).epsilon(0.35));

    int decoded = 0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        RandomStream r(seed);
        const auto res = phase1_broadcast(hover({0.0, 0.0, 100.0}, 25.0, 0.5), {node(0, 0.0)},
                                          FileSpec::ideal(50), {300.0, 0.999}, 0.5, r);
        decoded += FileSpec::ideal(50).decodes(res.nodes[0]);
    }
    CHECK(decoded == 0);
}

TEST_CASE("standard overflight is reproducible per seed")
{
    const auto nodes = nodes_on_line(20, 1000.0);
    auto counts = [&](std::uint64_t seed) {
        RandomStream rng(seed);
        const auto out = phase1_broadcast(standard_flight(), nodes, FileSpec::ideal(50), standard_rx, 0.5, rng);
        std::vector<PacketSet> sets;
        for (const auto& n : out.nodes) {
            sets.push_back(n.received_packets);
        }
        return sets;
    };
    CHECK(counts(7) == counts(7));
    CHECK(counts(7) != counts(8));
}

TEST_CASE("nodes on a line")
{
    const auto nodes = nodes_on_line(20, 1000.0);
    REQUIRE(nodes.size() == 20);
    CHECK(nodes.front().position.x == 25.0);
    CHECK(nodes.back().position.x == 975.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        CHECK(nodes[i].id == static_cast<int>(i));
        CHECK(nodes[i].received_packets.empty());
    }
}

TEST_CASE("D2D graph and clusters")
{
    std::vector<GroundNode> nodes{node(10, 0.0), node(11, 50.0), node(12, 100.0), node(13, 500.0), node(14, 560.0)};
    const D2dGraph graph(nodes, 60.0);
    CHECK(graph.adjacent(0, 1));
    CHECK(graph.adjacent(1, 0));
    CHECK_FALSE(graph.adjacent(0, 2));
    CHECK_FALSE(graph.adjacent(0, 0));
    CHECK(graph.adjacent(3, 4)); // exactly at range
    const auto clusters = cluster_nodes(nodes, 60.0);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0] == std::vector<int>{10, 11, 12});
    CHECK(clusters[1] == std::vector<int>{13, 14});
    CHECK(cluster_nodes(nodes, 1000.0).size() == 1);

    RandomStream rng(5);
    std::vector<GroundNode> scattered;
    for (int i = 0; i < 100; ++i) {
        scattered.push_back(node(i, rng.uniform() * 1000.0, rng.uniform() * 1000.0));
    }
    CHECK(cluster_nodes(scattered, 0.0).size() == 100);
    const D2dGraph g(scattered, 150.0);
    for (std::size_t i = 0; i < scattered.size(); ++i) {
        for (std::size_t j : g.neighbors(i)) {
            CHECK(j != i);
            CHECK(g.adjacent(j, i));
            CHECK(std::hypot(scattered[i].position.x - scattered[j].position.x,
                             scattered[i].position.y - scattered[j].position.y) <= 150.0);
        }
    }
}

TEST_CASE("exchange with everyone decoded takes no rounds")
{
    std::vector<GroundNode> nodes{node(0, 0.0, 0.0, range(0, 10)), node(1, 50.0, 0.0, range(5, 15))};
    RandomStream rng(1);
    const auto res = phase2_exchange(nodes, D2dGraph(nodes, 100.0), FileSpec::ideal(10), rng);
    CHECK(res.success);
    CHECK(res.rounds_used == 0);
}

TEST_CASE("two neighbours with disjoint halves finish within 10 rounds")
{
    const FileSpec file = FileSpec::ideal(10);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        std::vector<GroundNode> nodes{node(0, 0.0, 0.0, range(0, 5)), node(1, 50.0, 0.0, range(5, 10))};
        const D2dGraph graph(nodes, 100.0);
        RandomStream rng(seed);
        bool union_kept = true;
        ExchangeOptions opt;
        opt.observer = [&](std::size_t, const std::vector<GroundNode>& now) {
            PacketSet u = now[0].received_packets;
            u.insert(now[1].received_packets.begin(), now[1].received_packets.end());
            union_kept &= u == range(0, 10);
        };
        const auto res = phase2_exchange(nodes, graph, file, rng, opt);
        CAPTURE(seed);
        CHECK(res.success);
        CHECK(res.rounds_used <= 10);
        CHECK(union_kept);
    }
}

TEST_CASE("isolated node short of the threshold stalls")
{
    std::vector<GroundNode> nodes{node(0, 0.0, 0.0, range(0, 10)), node(1, 50.0, 0.0, range(0, 10)),
                                  node(2, 900.0, 0.0, range(0, 4))};
    RandomStream rng(1);
    const auto res = phase2_exchange(nodes, D2dGraph(nodes, 100.0), FileSpec::ideal(10), rng);
    CHECK_FALSE(res.success);
    CHECK(res.stalled);
    REQUIRE(res.components.size() == 2);
    CHECK(res.components[0].decodable);
    CHECK_FALSE(res.components[1].decodable);
    CHECK(res.components[1].packet_union == 4);
}

TEST_CASE("round cap is reported")
{
    std::vector<GroundNode> nodes;
    for (int i = 0; i < 6; ++i) {
        nodes.push_back(node(i, 40.0 * i, 0.0, i == 0 ? range(0, 30) : PacketSet{}));
    }
    RandomStream rng(2);
    ExchangeOptions opt;
    opt.round_cap = 3;
    const auto res = phase2_exchange(nodes, D2dGraph(nodes, 50.0), FileSpec::ideal(30), rng, opt);
    CHECK_FALSE(res.success);
    CHECK(res.round_cap_hit);
    CHECK(res.rounds_used == 3);
    CHECK(res.components.size() == 1);
    CHECK(res.components[0].packet_union == 30);
}

TEST_CASE("phase 2 conserves component unions and grows sets monotonically")
{
    const FileSpec file = FileSpec::ideal(50);
    const auto flight = standard_flight();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        RandomStream rng1(uavcomm::derive_seed(seed, 0));
        const auto p1 = phase1_broadcast(flight, nodes_on_line(20, 1000.0), file, standard_rx, 0.5, rng1);
        const D2dGraph graph(p1.nodes, 120.0);
        const auto before = summarize_components(p1.nodes, graph, file);
        std::vector<std::size_t> sizes;
        for (const auto& n : p1.nodes) {
            sizes.push_back(n.received_packets.size());
        }
        bool conserved = true, monotone = true;
        std::size_t rounds_seen = 0;
        ExchangeOptions opt;
        opt.observer = [&](std::size_t round, const std::vector<GroundNode>& now) {
            rounds_seen = round;
            const auto after = summarize_components(now, graph, file);
            for (std::size_t c = 0; c < before.size(); ++c) {
                conserved &= after[c].packet_union == before[c].packet_union;
            }
            for (std::size_t i = 0; i < now.size(); ++i) {
                monotone &= now[i].received_packets.size() >= sizes[i];
                sizes[i] = now[i].received_packets.size();
            }
        };
        RandomStream rng2(uavcomm::derive_seed(seed, 1));
        const auto res = phase2_exchange(p1.nodes, graph, file, rng2, opt);
        CAPTURE(seed);
        CHECK(conserved);
        CHECK(monotone);
        CHECK(rounds_seen == res.rounds_used);
        // success iff every node reaches the threshold
        const bool all = std::all_of(res.nodes.begin(), res.nodes.end(),
                                     [&](const GroundNode& n) { return n.received_packets.size() >= 50; });
        CHECK(res.success == all);
    }
}

TEST_CASE("exchange transcripts are deterministic")
{
    const FileSpec file = FileSpec::ideal(50);
    auto transcript = [&](std::uint64_t seed) {
        RandomStream rng1(seed);
        const auto p1 = phase1_broadcast(standard_flight(), nodes_on_line(20, 1000.0), file, standard_rx, 0.5, rng1);
        std::vector<std::vector<PacketSet>> log;
        ExchangeOptions opt;
        opt.observer = [&](std::size_t, const std::vector<GroundNode>& now) {
            std::vector<PacketSet> snap;
            for (const auto& n : now) {
                snap.push_back(n.received_packets);
            }
            log.push_back(std::move(snap));
        };
        RandomStream rng2(seed + 1);
        phase2_exchange(p1.nodes, D2dGraph(p1.nodes, 120.0), file, rng2, opt);
        return log;
    };
    const auto a = transcript(7);
    CHECK_FALSE(a.empty());
    CHECK(a == transcript(7));
}

TEST_CASE("full coverage without erasures needs no exchange")
{
    const FileSpec file = FileSpec::ideal(20);
    std::vector<GroundNode> nodes{node(0, -50.0), node(1, 0.0), node(2, 50.0)};
    RandomStream rng(4);
    const auto p1 = phase1_broadcast(hover({0.0, 0.0, 100.0}, 15.0, 0.5), nodes, file, {300.0, 0.0}, 0.5, rng);
    const auto res = phase2_exchange(p1.nodes, D2dGraph(p1.nodes, 120.0), file, rng);
    CHECK(res.success);
    CHECK(res.rounds_used == 0);
}

TEST_CASE("baseline with a perfect covering channel sends K packets")
{
    std::vector<GroundNode> nodes{node(0, -50.0), node(1, 0.0), node(2, 50.0)};
    RandomStream rng(4);
    const auto res = run_baseline(hover({0.0, 0.0, 100.0}, 40.0, 0.5), nodes, FileSpec::ideal(50), {300.0, 0.0}, 0.5, rng);
    CHECK(res.success);
    CHECK(res.passes == 1);
    CHECK(res.uav_transmissions == 50);
    CHECK(std::all_of(res.missing_per_node.begin(), res.missing_per_node.end(), [](std::size_t m) { return m == 0; }));
}

TEST_CASE("baseline for one packet over an erasure channel is geometric")
{
    const auto traj = hover({0.0, 0.0, 100.0}, 50.0, 0.5);
    double total = 0.0;
    const int seeds = 10000;
    for (int s = 0; s < seeds; ++s) {
        RandomStream rng(static_cast<std::uint64_t>(s));
        const auto res = run_baseline(traj, {node(0, 0.0)}, FileSpec::ideal(1), {300.0, 0.5}, 0.5, rng);
        REQUIRE(res.success);
        total += static_cast<double>(res.uav_transmissions);
    }
    const double mean = total / seeds;
    CHECK(mean >= 1.9);
    CHECK(mean <= 2.1);
}

TEST_CASE("baseline pass cap is reported with missing counts")
{
    std::vector<GroundNode> nodes{node(0, 0.0), node(1, 5000.0)};
    RandomStream rng(4);
    const auto res = run_baseline(hover({0.0, 0.0, 100.0}, 5.0, 0.5), nodes, FileSpec::ideal(5), {300.0, 0.0}, 0.5, rng, 3);
    CHECK_FALSE(res.success);
    CHECK(res.passes == 3);
    CHECK(res.uav_transmissions == 30);
    CHECK(res.missing_per_node == std::vector<std::size_t>{0, 5});
}

TEST_CASE("standard scenario: coded broadcast beats repetition")
{
    const FileSpec file = FileSpec::ideal(50);
    const auto flight = standard_flight();
    const auto nodes = nodes_on_line(20, 1000.0);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RandomStream r1(uavcomm::derive_seed(seed, 0)), r2(uavcomm::derive_seed(seed, 1)),
            r3(uavcomm::derive_seed(seed, 2));
        const auto p1 = phase1_broadcast(flight, nodes, file, standard_rx, 0.5, r1);
        const auto p2 = phase2_exchange(p1.nodes, D2dGraph(p1.nodes, 120.0), file, r2);
        const auto base = run_baseline(flight, nodes, file, standard_rx, 0.5, r3);
        CAPTURE(seed);
        CHECK(p2.success);
        CHECK(base.success);
        CHECK(p1.uav_transmissions <= base.uav_transmissions);
    }
}
