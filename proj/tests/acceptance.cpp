// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include "uavcomm/coverage.hpp"
#include "uavcomm/csv.hpp"
#include "uavcomm/dissemination.hpp"
#include "uavcomm/experiment.hpp"
#include "uavcomm/relay.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
namespace ch = uavcomm::channel;
namespace mob = uavcomm::mobility;
namespace ex = uavcomm::experiment;
namespace dis = uavcomm::dissemination;
namespace cov = uavcomm::coverage;
using uavcomm::relay::RelayStrategy;

namespace {

// Tolerances and limits.
constexpr double kPlateauDb = 86.42;
constexpr double kPlateauDbTol = 0.01;
constexpr double kPlateauSeconds = 10.0;
constexpr double kPlateauSecondsTol = 0.1;
constexpr double kGapDb = 14.15;
constexpr double kGapDbTol = 0.05;
constexpr double kTraceSeconds = 1.0;
constexpr double kStaticSe = 1.7297;
constexpr double kStaticSeTol = 1e-4;
constexpr double kRatioAt20 = 1.95;
constexpr double kRatioAt20Tol = 0.03;
constexpr double kRatioFloorFrom40 = 2.0;
constexpr double kSweepSeconds = 5.0;
constexpr double kMinReduction = 0.30;
constexpr double kDisseminationSeconds = 10.0;
constexpr double kConvergenceRel = 1e-3;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

fs::path workdir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "uavcomm-acceptance" / name;
    fs::remove_all(dir);
    return dir;
}

ex::ExperimentConfig preset_into(const std::string& name, const fs::path& dir)
{
    ex::ConfigOverrides o;
    o.output_directory = dir;
    return ex::load_preset(name, o);
}

std::map<std::string, std::string> csv_bodies(const fs::path& dir)
{
    std::map<std::string, std::string> out;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() == ".csv") {
            std::ifstream in(e.path(), std::ios::binary);
            std::stringstream ss;
            ss << in.rdbuf();
            out[e.path().filename().string()] = ss.str();
        }
    }
    return out;
}

const ch::ChannelModel free_space{ch::FreeSpace{}, 5e9};

uavcomm::relay::RelayRunResult cycle(RelayStrategy s, double v, double delta,
                                     uavcomm::relay::RelayOptions opt = {})
{
    const auto g = mob::RelayGeometry::on_axis(1000.0, 100.0, v, delta);
    return uavcomm::relay::simulate_cycle(s, g, free_space, uavcomm::relay::midpoint_reference(g, 10.0), opt);
}

Outcome fig3_gap()
{
    const auto dir = workdir("fig3");
    const auto t0 = Clock::now();
    const auto m = ex::run(preset_into("fig3", dir));
    const double elapsed = seconds_since(t0);

    const auto mobile = uavcomm::csv::read_table((dir / "trace_mobile_v100.csv").string());
    const auto fixed = uavcomm::csv::read_table((dir / "trace_static.csv").string());
    const double delay = m.summary.at("delay_s").get<double>();
    const auto tc = mobile.column("time_s");
    const auto pc = mobile.column("pl_src_db");
    double plateau = 1e300;
    for (const auto& row : mobile.rows) {
        if (std::stod(row[tc]) < delay) {
            plateau = std::min(plateau, std::stod(row[pc]));
        }
    }
    double first = -1.0, last = -1.0;
    for (const auto& row : mobile.rows) {
        const double t = std::stod(row[tc]);
        if (t < delay && std::abs(std::stod(row[pc]) - plateau) < 1e-9) {
            if (first < 0.0) {
                first = t;
            }
            last = t;
        }
    }
    const double duration = last - first;
    const double static_level = std::stod(fixed.rows.front()[fixed.column("pl_src_db")]);
    const double gap = static_level - plateau;
    Outcome o;
    o.pass = std::abs(plateau - kPlateauDb) <= kPlateauDbTol &&
             std::abs(duration - kPlateauSeconds) <= kPlateauSecondsTol &&
             std::abs(gap - kGapDb) <= kGapDbTol && elapsed < kTraceSeconds && !m.any_failed();
    o.detail = fmt("plateau %.3f dB for %.2f s, gap %.3f dB, runtime %.3f s", plateau, duration, gap, elapsed);
    return o;
}

Outcome static_baseline()
{
    const double se = cycle(RelayStrategy::Static, 0.0, 20.0).end_to_end_se;
    const double oracle = 0.5 * std::log2(11.0);
    Outcome o;
    o.pass = std::abs(se - kStaticSe) <= kStaticSeTol && std::abs(se - oracle) <= kStaticSeTol;
    o.detail = fmt("SE %.6f bps/Hz (closed form %.6f)", se, oracle);
    return o;
}

Outcome fig4_ratio()
{
    const auto dir = workdir("fig4");
    const auto t0 = Clock::now();
    ex::run(preset_into("fig4", dir));
    const double elapsed = seconds_since(t0);

    const auto t = uavcomm::csv::read_table((dir / "sweep.csv").string());
    std::map<double, double> static_se, mobile_se;
    for (const auto& row : t.rows) {
        if (std::stod(row[t.column("v_mps")]) != 100.0) {
            continue;
        }
        const double delta = std::stod(row[t.column("delta_s")]);
        const double se = std::stod(row[t.column("se_bpshz")]);
        (row[t.column("strategy")] == "static" ? static_se : mobile_se)[delta] = se;
    }
    const double at20 = mobile_se.at(20.0) / static_se.at(20.0);
    double worst_from_40 = 1e300;
    for (const auto& [delta, se] : mobile_se) {
        if (delta >= 40.0) {
            worst_from_40 = std::min(worst_from_40, se / static_se.at(delta));
        }
    }
    Outcome o;
    o.pass = std::abs(at20 - kRatioAt20) <= kRatioAt20Tol && worst_from_40 >= kRatioFloorFrom40 &&
             elapsed < kSweepSeconds;
    o.detail = fmt("ratio %.4f at 20 s, min %.4f for delay >= 40 s, runtime %.3f s", at20, worst_from_40, elapsed);
    return o;
}

Outcome degeneracy()
{
    bool same = true;
    int cells = 0;
    for (double delta : {5.0, 20.0, 47.0, 100.0}) {
        const auto m = cycle(RelayStrategy::Mobile, 0.0, delta);
        const auto s = cycle(RelayStrategy::Static, 0.0, delta);
        same &= m.trace == s.trace && m.bits_received == s.bits_received &&
                m.bits_delivered == s.bits_delivered && m.end_to_end_se == s.end_to_end_se &&
                m.peak_occupancy == s.peak_occupancy && m.final_occupancy == s.final_occupancy;
        const auto g = mob::RelayGeometry::on_axis(1000.0, 100.0, 0.0, delta);
        const auto pm = uavcomm::relay::path_loss_trace(RelayStrategy::Mobile, g, 5e9, 0.01);
        const auto ps = uavcomm::relay::path_loss_trace(RelayStrategy::Static, g, 5e9, 0.01);
        same &= pm.size() == ps.size();
        for (std::size_t i = 0; same && i < pm.size(); ++i) {
            same &= pm[i].time == ps[i].time && pm[i].source_db == ps[i].source_db &&
                    pm[i].destination_db == ps[i].destination_db;
        }
        ++cells;
    }
    Outcome o;
    o.pass = same;
    o.detail = fmt("%d delay budgets compared bitwise", cells);
    return o;
}

Outcome dominance()
{
    int cells = 0, violations = 0;
    double min_ferry_gap = 1e300;
    for (int i = 0; i < 10; ++i) {
        const double v = 50.0 + 10.0 * i;
        for (int j = 0; j < 10; ++j) {
            const double delta = 20.0 + 10.0 * j;
            const double m = cycle(RelayStrategy::Mobile, v, delta).end_to_end_se;
            const double s = cycle(RelayStrategy::Static, v, delta).end_to_end_se;
            const double f = cycle(RelayStrategy::Ferry, v, delta).end_to_end_se;
            // Every cell has flight legs (R / v > 0), so the ferry gap is strict.
            if (!(m >= s) || !(m > f)) {
                ++violations;
            }
            min_ferry_gap = std::min(min_ferry_gap, m - f);
            ++cells;
        }
    }
    Outcome o;
    o.pass = violations == 0 && cells == 100;
    o.detail = fmt("%d cells, %d violations, smallest mobile-ferry gap %.4f bps/Hz", cells, violations, min_ferry_gap);
    return o;
}

Outcome buffer_tradeoff()
{
    bool ok = true;
    std::string worst;
    int cells = 0;
    for (double v : {10.0, 30.0, 100.0}) {
        for (double delta : {10.0, 20.0, 40.0}) {
            const auto g = mob::RelayGeometry::on_axis(1000.0, 100.0, v, delta);
            const auto ref = uavcomm::relay::midpoint_reference(g, 10.0);
            const double need = uavcomm::relay::buffer_requirement(RelayStrategy::Mobile, g, free_space, ref);
            const double unbounded = cycle(RelayStrategy::Mobile, v, delta).end_to_end_se;
            const double half = cycle(RelayStrategy::Mobile, v, delta, {need / 2.0}).end_to_end_se;
            const double exact = cycle(RelayStrategy::Mobile, v, delta, {need}).end_to_end_se;
            const double roomy = cycle(RelayStrategy::Mobile, v, delta, {need * 4.0}).end_to_end_se;
            ok &= half < unbounded && exact == unbounded && roomy == unbounded;
            ++cells;
            if (v == 100.0 && delta == 20.0) {
                worst = fmt("v=100, delay=20: need %.2f bits/Hz, SE %.4f -> %.4f at half", need, unbounded, half);
            }
        }
    }
    Outcome o;
    o.pass = ok;
    o.detail = fmt("%d cells; ", cells) + worst;
    return o;
}

Outcome dissemination_benefit()
{
    const auto dir = workdir("dissemination");
    const auto t0 = Clock::now();
    const auto m = ex::run(preset_into("dissemination", dir));
    const double elapsed = seconds_since(t0);

    const auto t = uavcomm::csv::read_table((dir / "dissemination_summary.csv").string());
    std::map<std::string, double> coded, base;
    bool all_success = true;
    for (const auto& row : t.rows) {
        const std::string id = row[t.column("seed")];
        const double n = std::stod(row[t.column("uav_transmissions")]);
        (row[t.column("scheme")] == "coded_d2d" ? coded : base)[id] = n;
        all_success &= row[t.column("success")] == "true";
    }
    int dominated = 0;
    double reduction_sum = 0.0;
    for (const auto& [id, c] : coded) {
        const double b = base.at(id);
        dominated += c <= b;
        reduction_sum += 1.0 - c / b;
    }
    const double mean_reduction = reduction_sum / static_cast<double>(coded.size());
    Outcome o;
    o.pass = coded.size() == 50 && base.size() == 50 && dominated == 50 && mean_reduction >= kMinReduction &&
             all_success && !m.any_failed() && elapsed < kDisseminationSeconds;
    o.detail = fmt("%zu seeds, coded <= baseline in %d, mean reduction %.1f%%, runtime %.3f s", coded.size(),
                   dominated, 100.0 * mean_reduction, elapsed);
    return o;
}

Outcome dissemination_conservation()
{
    const auto cfg = ex::load_preset("dissemination");
    const auto& p = cfg.dissemination();
    const auto flight = mob::overflight_trajectory({p.path_start_x, 0.0, p.altitude}, {p.path_end_x, 0.0, p.altitude},
                                                   p.speed, p.slot_duration);
    const auto file = dis::FileSpec::ideal(p.packets);
    const dis::ReceptionModel rx{p.coverage_radius, p.erasure_probability};
    std::size_t rounds_checked = 0, broken = 0;
    for (std::size_t run = 0; run < p.runs; ++run) {
        const std::uint64_t seed = uavcomm::derive_seed(cfg.master_seed, run);
        uavcomm::RandomStream r1(uavcomm::derive_seed(seed, 0));
        const auto p1 = dis::phase1_broadcast(flight, dis::nodes_on_line(p.node_count, p.field_length), file, rx,
                                              p.slot_duration, r1);
        const dis::D2dGraph graph(p1.nodes, p.d2d_range);
        const auto before = dis::summarize_components(p1.nodes, graph, file);
        dis::ExchangeOptions opt;
        opt.round_cap = p.round_cap;
        opt.observer = [&](std::size_t, const std::vector<dis::GroundNode>& now) {
            const auto after = dis::summarize_components(now, graph, file);
            for (std::size_t c = 0; c < before.size(); ++c) {
                broken += after[c].packet_union != before[c].packet_union;
            }
            ++rounds_checked;
        };
        uavcomm::RandomStream r2(uavcomm::derive_seed(seed, 1));
        dis::phase2_exchange(p1.nodes, graph, file, r2, opt);
    }
    Outcome o;
    o.pass = broken == 0 && rounds_checked > 0;
    o.detail = fmt("%zu runs, %zu rounds checked, %zu union changes", p.runs, rounds_checked, broken);
    return o;
}

Outcome coverage_interiority()
{
    const auto cfg = ex::load_preset("coverage_urban");
    const auto& c = cfg.coverage();
    const auto best = cov::optimal_altitude(c.altitude_min, c.altitude_max, c.max_path_loss, c.frequency, c.los,
                                            c.excess, c.resolution, true);
    const double low = cov::coverage_radius(c.altitude_min, c.max_path_loss, c.frequency, c.los, c.excess);
    const double high = cov::coverage_radius(c.altitude_max, c.max_path_loss, c.frequency, c.los, c.excess);
    const cov::ExcessLoss flat{c.excess.eta_los, c.excess.eta_los};
    const auto flat_best = cov::optimal_altitude(c.altitude_min, c.altitude_max, c.max_path_loss, c.frequency, c.los,
                                                 flat, c.resolution, true);
    Outcome o;
    o.pass = best.altitude > c.altitude_min && best.altitude < c.altitude_max && best.radius > low &&
             best.radius > high && flat_best.altitude == c.altitude_min;
    o.detail = fmt("optimum %.0f m (radius %.2f m; %.2f m at %.0f m, %.2f m at %.0f m); equal excess -> %.0f m",
                   best.altitude, best.radius, low, c.altitude_min, high, c.altitude_max, flat_best.altitude);
    return o;
}

Outcome convergence()
{
    const auto cfg = ex::load_preset("fig4_ferry");
    const auto& r = cfg.relay();
    double worst = 0.0;
    std::string where;
    int cells = 0;
    for (auto s : r.strategies) {
        uavcomm::relay::RelayOptions coarse, fine;
        coarse.time_step = 0.01;
        fine.time_step = 0.005;
        const auto a = uavcomm::relay::sweep_delay(s, r.geometry, r.delays, r.speeds, r.channel, r.reference_snr_db,
                                                   coarse, true);
        const auto b = uavcomm::relay::sweep_delay(s, r.geometry, r.delays, r.speeds, r.channel, r.reference_snr_db,
                                                   fine, true);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (!a[i].feasible) {
                continue;
            }
            ++cells;
            const double change = a[i].se == 0.0 ? std::abs(b[i].se) : std::abs(b[i].se - a[i].se) / a[i].se;
            if (change > worst) {
                worst = change;
                where = fmt("%s v=%g delay=%g", uavcomm::relay::to_string(s).c_str(), a[i].speed, a[i].delay);
            }
        }
    }
    Outcome o;
    o.pass = worst < kConvergenceRel && cells > 0;
    o.detail = fmt("%d cells, largest change %.4f%%", cells, 100.0 * worst) + (where.empty() ? "" : " at " + where);
    return o;
}

Outcome reproducibility()
{
    int configs = 0, files = 0, differing = 0;
    std::vector<std::pair<std::string, nlohmann::json>> docs;
    for (const auto& name : ex::preset_names()) {
        docs.emplace_back(name, ex::preset(name));
    }
    nlohmann::json faded = ex::preset("fig3");
    faded["relay"]["channel"] = {{"model", "rician"}, {"k_factor_db", 10.0}, {"base", "two_ray"}};
    faded["relay"]["terminal_height_m"] = 1.5;
    docs.emplace_back("fig3_rician", faded);
    for (const auto& [name, doc] : docs) {
        ex::ConfigOverrides oa, ob;
        oa.output_directory = workdir("repro-a-" + name);
        ob.output_directory = workdir("repro-b-" + name);
        oa.seed = ob.seed = 20240601;
        ex::run(ex::resolve_config(doc, oa));
        ex::run(ex::resolve_config(doc, ob));
        const auto a = csv_bodies(*oa.output_directory);
        const auto b = csv_bodies(*ob.output_directory);
        differing += a != b;
        files += static_cast<int>(a.size());
        ++configs;
    }
    Outcome o;
    o.pass = differing == 0 && configs > 0;
    o.detail = fmt("%d configs, %d CSV files, %d differing reruns", configs, files, differing);
    return o;
}

} // namespace

int main()
{
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"relay trace plateau and static gap", fig3_gap},
        {"static relay spectral efficiency", static_baseline},
        {"mobile/static ratio versus delay", fig4_ratio},
        {"zero-speed mobile equals static", degeneracy},
        {"mobile dominates static and ferry", dominance},
        {"buffer size tradeoff", buffer_tradeoff},
        {"coded D2D dissemination saves transmissions", dissemination_benefit},
        {"component packet unions conserved", dissemination_conservation},
        {"interior optimal altitude", coverage_interiority},
        {"time step convergence", convergence},
        {"byte-identical reruns", reproducibility},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failed += !o.pass;
        std::printf("%s  %2d  %s: %s\n", o.pass ? "PASS" : "FAIL", index, name, o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", index - failed, criteria.size());
    return failed;
}
