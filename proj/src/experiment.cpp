#include "uavcomm/experiment.hpp"

#include "uavcomm/channel.hpp"
#include "uavcomm/csv.hpp"
#include "uavcomm/dissemination.hpp"
#include "uavcomm/error.hpp"
#include "uavcomm/parallel.hpp"
#include "uavcomm/random.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>

namespace uavcomm::experiment {

using nlohmann::json;

namespace {

struct FileBody {
    OutputFile file;
    std::string body;
};

struct JobResult {
    RunRecord record;
    std::vector<FileBody> files;
    // Rows destined for a shared file, already formatted.
    std::string shared_rows;
};

struct ScenarioOutput {
    std::vector<JobResult> runs;
    std::vector<FileBody> shared; // files aggregated over all runs
};

std::string format_speed(double v) { return csv::format_number(v); }

std::string run_file_name(const char* stem, std::size_t index)
{
    std::ostringstream name;
    name << stem << std::setw(3) << std::setfill('0') << index << ".csv";
    return name.str();
}

// Runs `jobs` (possibly concurrently), converting exceptions to failed records.
template <typename Fn>
std::vector<JobResult> run_jobs(std::size_t count, bool parallel, Fn&& job,
                                const std::vector<std::string>& labels,
                                const std::vector<std::uint64_t>& seeds)
{
    return parallel_map(
        count,
        [&](std::size_t i) {
            JobResult result;
            try {
                result = job(i);
            } catch (const std::exception& e) {
                result = JobResult{};
                result.record.ok = false;
                result.record.error = e.what();
            }
            result.record.index = i;
            result.record.label = labels[i];
            result.record.seed = seeds[i];
            return result;
        },
        parallel);
}

std::vector<std::uint64_t> run_seeds(std::uint64_t master, std::size_t count)
{
    std::vector<std::uint64_t> seeds(count);
    for (std::size_t i = 0; i < count; ++i) {
        seeds[i] = derive_seed(master, i);
    }
    return seeds;
}

// ---- relay trace ---------------------------------------------------------

struct RelayJob {
    relay::RelayStrategy strategy;
    double speed;
};

std::vector<RelayJob> relay_jobs(const RelayParams& p)
{
    std::vector<RelayJob> jobs;
    for (auto s : p.strategies) {
        if (s == relay::RelayStrategy::Static) {
            jobs.push_back({s, 0.0});
        } else {
            for (double v : p.speeds) {
                jobs.push_back({s, v});
            }
        }
    }
    return jobs;
}

ScenarioOutput run_relay_trace(const ExperimentConfig& cfg, RunManifest& manifest)
{
    const RelayParams& p = cfg.relay();
    const auto jobs = relay_jobs(p);
    std::vector<std::string> labels;
    for (const auto& j : jobs) {
        labels.push_back(series_label(j.strategy, j.speed));
    }
    const auto seeds = run_seeds(cfg.master_seed, jobs.size());
    const channel::SnrReference ref = relay::midpoint_reference(p.geometry, p.reference_snr_db);

    auto results = run_jobs(
        jobs.size(), cfg.parallel,
        [&](std::size_t i) {
            mobility::RelayGeometry geom = p.geometry;
            geom.delay_budget = p.delays.front();
            geom.v_max = jobs[i].speed;
            relay::RelayOptions options{p.buffer_capacity, cfg.time_step, seeds[i]};
            const auto run = relay::simulate_cycle(jobs[i].strategy, geom, p.channel, ref, options);

            std::ostringstream trace;
            csv::Writer w(trace);
            w.header({"time_s", "pl_src_db", "pl_dst_db", "se_bpshz", "buffer_bits"});
            for (const auto& s : run.trace) {
                w.row(s.time, s.pl_src_db, s.pl_dst_db, s.se_bpshz, s.buffer_bits);
            }
            std::ostringstream row;
            csv::Writer(row).row(labels[i], relay::to_string(jobs[i].strategy), jobs[i].speed,
                                 geom.delay_budget, run.end_to_end_se, run.bits_received,
                                 run.bits_delivered, run.peak_occupancy);

            JobResult out;
            out.files.push_back({{"trace_" + labels[i] + ".csv", "trace", labels[i]}, trace.str()});
            out.shared_rows = row.str();
            return out;
        },
        labels, seeds);

    std::ostringstream summary;
    csv::Writer(summary).header({"series", "strategy", "v_mps", "delta_s", "se_bpshz",
                                 "bits_received", "bits_delivered", "peak_buffer_bits"});
    for (const auto& r : results) {
        summary << r.shared_rows;
    }
    ScenarioOutput out{std::move(results), {{{"relay_summary.csv", "relay_summary", ""}, summary.str()}}};
    manifest.summary["delay_s"] = p.delays.front();
    return out;
}

// ---- relay sweep ---------------------------------------------------------

ScenarioOutput run_relay_sweep(const ExperimentConfig& cfg, RunManifest& /*manifest*/)
{
    const RelayParams& p = cfg.relay();
    std::vector<std::string> labels;
    for (auto s : p.strategies) {
        labels.push_back(relay::to_string(s));
    }
    const auto seeds = run_seeds(cfg.master_seed, p.strategies.size());
    // Strategies run one after another; cells within a sweep run concurrently.
    auto results = run_jobs(
        p.strategies.size(), false,
        [&](std::size_t i) {
            relay::RelayOptions options{p.buffer_capacity, cfg.time_step, seeds[i]};
            const auto rows = relay::sweep_delay(p.strategies[i], p.geometry, p.delays, p.speeds,
                                                 p.channel, p.reference_snr_db, options,
                                                 cfg.parallel);
            std::ostringstream out;
            csv::Writer w(out);
            for (const auto& r : rows) {
                if (r.feasible) {
                    w.row(r.delay, r.speed, relay::to_string(r.strategy), r.se, r.peak_buffer);
                } else {
                    w.row(r.delay, r.speed, relay::to_string(r.strategy), "NA", "NA");
                }
            }
            JobResult job;
            job.shared_rows = out.str();
            return job;
        },
        labels, seeds);

    std::ostringstream table;
    csv::Writer(table).header({"delta_s", "v_mps", "strategy", "se_bpshz", "peak_buffer_bits"});
    for (const auto& r : results) {
        table << r.shared_rows;
    }
    ScenarioOutput out{std::move(results), {{{"sweep.csv", "sweep", ""}, table.str()}}};
    return out;
}

// ---- dissemination -------------------------------------------------------

ScenarioOutput run_dissemination(const ExperimentConfig& cfg, RunManifest& manifest)
{
    namespace dis = dissemination;
    const DisseminationParams& p = cfg.dissemination();
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < p.runs; ++i) {
        labels.push_back("run" + std::to_string(i));
    }
    const auto seeds = run_seeds(cfg.master_seed, p.runs);
    const auto traj = mobility::overflight_trajectory({p.path_start_x, 0.0, p.altitude},
                                                      {p.path_end_x, 0.0, p.altitude}, p.speed,
                                                      cfg.time_step);
    const dis::FileSpec file = dis::FileSpec::ideal(p.packets);
    const dis::ReceptionModel rx{p.coverage_radius, p.erasure_probability};

    auto results = run_jobs(
        p.runs, cfg.parallel,
        [&](std::size_t i) {
            RandomStream broadcast_rng(derive_seed(seeds[i], 0));
            RandomStream exchange_rng(derive_seed(seeds[i], 1));
            RandomStream baseline_rng(derive_seed(seeds[i], 2));

            const auto nodes = dis::nodes_on_line(p.node_count, p.field_length);
            auto phase1 = dis::phase1_broadcast(traj, nodes, file, rx, p.slot_duration, broadcast_rng);
            const dis::D2dGraph graph(phase1.nodes, p.d2d_range);
            dis::ExchangeOptions options;
            options.round_cap = p.round_cap;
            const auto phase2 = dis::phase2_exchange(phase1.nodes, graph, file, exchange_rng, options);
            const auto baseline =
                dis::run_baseline(traj, nodes, file, rx, p.slot_duration, baseline_rng, p.pass_cap);

            std::ostringstream rows;
            csv::Writer w(rows);
            w.row(cfg.name, seeds[i], "coded_d2d", phase1.uav_transmissions, phase2.rounds_used,
                  phase2.success);
            w.row(cfg.name, seeds[i], "baseline", baseline.uav_transmissions, std::size_t{0},
                  baseline.success);

            std::ostringstream detail;
            csv::Writer d(detail);
            d.header({"node_id", "packets_after_phase1", "decoded_after_phase2"});
            for (std::size_t n = 0; n < phase1.nodes.size(); ++n) {
                d.row(phase1.nodes[n].id, phase1.nodes[n].received_packets.size(),
                      file.decodes(phase2.nodes[n]));
            }

            JobResult out;
            out.shared_rows = rows.str();
            out.files.push_back({{run_file_name("nodes_run", i), "nodes", labels[i]}, detail.str()});
            if (!phase2.success) {
                out.record.ok = false;
                out.record.error = phase2.stalled ? "coded phase 2 stalled: a D2D component lacks "
                                                    "enough distinct packets"
                                                  : "coded phase 2 hit the round cap";
            } else if (!baseline.success) {
                out.record.ok = false;
                out.record.error = "baseline hit the pass cap";
            }
            return out;
        },
        labels, seeds);

    std::ostringstream summary;
    csv::Writer(summary).header(
        {"scenario_id", "seed", "scheme", "uav_transmissions", "d2d_rounds", "success"});
    for (const auto& r : results) {
        summary << r.shared_rows;
    }
    ScenarioOutput out{std::move(results), {{{"dissemination_summary.csv", "dissemination_summary", ""}, summary.str()}}};
    manifest.summary["uav_slots_per_pass"] = dis::slot_count(traj, p.slot_duration);
    return out;
}

// ---- coverage ------------------------------------------------------------

ScenarioOutput run_coverage(const ExperimentConfig& cfg, RunManifest& manifest)
{
    const CoverageParams& p = cfg.coverage();
    const auto seeds = run_seeds(cfg.master_seed, 1);
    auto results = run_jobs(
        1, false,
        [&](std::size_t) {
            const auto sweep =
                coverage::altitude_sweep(p.altitude_min, p.altitude_max, p.resolution,
                                         p.max_path_loss, p.frequency, p.los, p.excess, cfg.parallel);
            const auto best = coverage::best_point(sweep);
            std::ostringstream grid;
            csv::Writer w(grid);
            w.header({"altitude_m", "coverage_radius_m"});
            for (const auto& pt : sweep) {
                w.row(pt.altitude, pt.radius);
            }
            std::ostringstream optimum;
            csv::Writer o(optimum);
            o.header({"altitude_m", "coverage_radius_m", "radius_at_lower_m", "radius_at_upper_m"});
            o.row(best.altitude, best.radius, sweep.front().radius, sweep.back().radius);

            manifest.summary["optimal_altitude_m"] = best.altitude;
            manifest.summary["optimal_radius_m"] = best.radius;
            manifest.summary["interior"] =
                best.altitude > sweep.front().altitude && best.altitude < sweep.back().altitude;

            JobResult out;
            out.files.push_back({{"coverage.csv", "coverage", "coverage_radius"}, grid.str()});
            out.files.push_back({{"coverage_optimum.csv", "coverage_optimum", ""}, optimum.str()});
            return out;
        },
        {"coverage"}, seeds);
    return {std::move(results), {}};
}

// ---- channel probe -------------------------------------------------------

ScenarioOutput run_channel_probe(const ExperimentConfig& cfg, RunManifest& /*manifest*/)
{
    const ProbeParams& p = cfg.probe();
    const std::size_t count = 1 + p.k_factors_db.size();
    std::vector<std::string> labels{"links"};
    for (double k : p.k_factors_db) {
        labels.push_back("rician_k" + csv::format_number(k));
    }
    const auto seeds = run_seeds(cfg.master_seed, count);

    auto results = run_jobs(
        count, cfg.parallel,
        [&](std::size_t i) {
            JobResult out;
            if (i == 0) {
                const channel::ChannelModel free_space{channel::FreeSpace{}, p.frequency};
                const channel::SnrReference ref{p.reference_snr_db, p.reference_distance};
                std::ostringstream links;
                csv::Writer w(links);
                w.header({"ground_range_m", "slant_m", "fspl_db", "two_ray_db", "snr_db",
                          "se_bpshz"});
                for (double r : p.ground_ranges) {
                    const channel::LinkGeometry g{r, p.uav_altitude, p.terminal_height};
                    const double snr = channel::snr_at(g, free_space, ref);
                    w.row(r, g.slant_distance(), channel::free_space_path_loss(g, p.frequency),
                          channel::two_ray_path_loss(g, p.frequency, p.reflection_coefficient), snr,
                          channel::spectral_efficiency(snr));
                }
                std::ostringstream doppler;
                csv::Writer d(doppler);
                d.header({"relative_speed_mps", "doppler_hz"});
                for (double v : p.relative_speeds) {
                    d.row(v, channel::doppler_shift(v, p.frequency));
                }
                out.files.push_back({{"probe_links.csv", "probe_links", ""}, links.str()});
                out.files.push_back({{"probe_doppler.csv", "probe_doppler", ""}, doppler.str()});
                return out;
            }
            const double k_db = p.k_factors_db[i - 1];
            RandomStream rng(seeds[i]);
            std::vector<double> power(p.fading_samples);
            for (auto& v : power) {
                v = std::norm(channel::sample_rician_gain(k_db, rng));
            }
            double mean = 0.0;
            for (double v : power) {
                mean += v;
            }
            mean /= static_cast<double>(power.size());
            std::ostringstream row;
            csv::Writer(row).row(k_db, p.fading_samples, mean, channel::estimate_k_factor_db(power));
            out.shared_rows = row.str();
            return out;
        },
        labels, seeds);

    std::ostringstream fading;
    csv::Writer(fading).header({"k_factor_db", "samples", "mean_power", "k_estimate_db"});
    for (const auto& r : results) {
        fading << r.shared_rows;
    }
    ScenarioOutput out{std::move(results), {{{"probe_fading.csv", "probe_fading", ""}, fading.str()}}};
    return out;
}

void write_text(const std::filesystem::path& path, const std::string& body)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << body;
}

// ---- plot data -----------------------------------------------------------

double to_double(const std::string& s) { return std::stod(s); }

void plot_rows(const RunManifest& m, const OutputFile& f, const csv::Table& t, csv::Writer& w)
{
    if (f.role == "trace") {
        const double delay = m.summary.at("delay_s").get<double>();
        const auto tc = t.column("time_s");
        const auto src = t.column("pl_src_db");
        const auto dst = t.column("pl_dst_db");
        for (const auto& row : t.rows) {
            const double time = to_double(row[tc]);
            w.row(row[tc], f.series, time < delay ? row[src] : row[dst]);
        }
    } else if (f.role == "sweep") {
        const auto dc = t.column("delta_s");
        const auto vc = t.column("v_mps");
        const auto sc = t.column("strategy");
        const auto yc = t.column("se_bpshz");
        std::map<std::string, bool> static_done;
        for (const auto& row : t.rows) {
            if (row[yc] == "NA") {
                continue;
            }
            std::string series;
            if (row[sc] == "static") {
                if (static_done[row[dc]]) {
                    continue;
                }
                static_done[row[dc]] = true;
                series = "static";
            } else {
                series = row[sc] + "_v" + row[vc];
            }
            w.row(row[dc], series, row[yc]);
        }
    } else if (f.role == "coverage") {
        for (const auto& row : t.rows) {
            w.row(row[t.column("altitude_m")], f.series, row[t.column("coverage_radius_m")]);
        }
    } else if (f.role == "dissemination_summary") {
        const auto sc = t.column("scheme");
        const auto yc = t.column("uav_transmissions");
        std::map<std::string, std::size_t> run_index;
        for (const auto& row : t.rows) {
            w.row(run_index[row[sc]]++, row[sc], row[yc]);
        }
    } else if (f.role == "probe_links") {
        const auto xc = t.column("ground_range_m");
        for (const char* series : {"fspl_db", "two_ray_db", "snr_db", "se_bpshz"}) {
            const auto yc = t.column(series);
            for (const auto& row : t.rows) {
                w.row(row[xc], series, row[yc]);
            }
        }
    } else if (f.role == "probe_doppler") {
        for (const auto& row : t.rows) {
            w.row(row[t.column("relative_speed_mps")], "doppler_hz", row[t.column("doppler_hz")]);
        }
    }
}

} // namespace

std::string series_label(relay::RelayStrategy strategy, double speed)
{
    if (strategy == relay::RelayStrategy::Static) {
        return "static";
    }
    return relay::to_string(strategy) + "_v" + format_speed(speed);
}

std::string config_digest(const json& config)
{
    const std::string text = config.dump();
    unsigned char hash[EVP_MAX_MD_SIZE];
    unsigned int length = 0;
    if (EVP_Digest(text.data(), text.size(), hash, &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::ostringstream hex;
    for (unsigned int i = 0; i < length; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(hash[i]);
    }
    return hex.str();
}

bool RunManifest::any_failed() const
{
    return std::any_of(runs.begin(), runs.end(), [](const RunRecord& r) { return !r.ok; });
}

json RunManifest::to_json() const
{
    json j;
    j["config_digest"] = config_digest;
    j["tool_version"] = tool_version;
    j["scenario"] = scenario;
    j["name"] = name;
    j["master_seed"] = master_seed;
    j["output_directory"] = output_directory.string();
    j["runs"] = json::array();
    for (const auto& r : runs) {
        j["runs"].push_back({{"index", r.index},
                             {"label", r.label},
                             {"seed", r.seed},
                             {"ok", r.ok},
                             {"error", r.error}});
    }
    j["outputs"] = json::array();
    for (const auto& o : outputs) {
        j["outputs"].push_back({{"path", o.path}, {"role", o.role}, {"series", o.series}});
    }
    j["warnings"] = warnings;
    j["resolved_config"] = resolved_config;
    j["summary"] = summary;
    return j;
}

RunManifest RunManifest::from_json(const json& j)
{
    RunManifest m;
    m.config_digest = j.value("config_digest", "");
    m.tool_version = j.value("tool_version", "");
    m.scenario = j.value("scenario", "");
    m.name = j.value("name", "");
    m.master_seed = j.value("master_seed", std::uint64_t{0});
    m.output_directory = j.value("output_directory", "");
    for (const auto& r : j.value("runs", json::array())) {
        m.runs.push_back({r.at("index").get<std::size_t>(), r.at("label").get<std::string>(),
                          r.at("seed").get<std::uint64_t>(), r.at("ok").get<bool>(),
                          r.value("error", "")});
    }
    for (const auto& o : j.value("outputs", json::array())) {
        m.outputs.push_back({o.at("path").get<std::string>(), o.at("role").get<std::string>(),
                             o.value("series", "")});
    }
    m.warnings = j.value("warnings", std::vector<std::string>{});
    m.resolved_config = j.value("resolved_config", json::object());
    m.summary = j.value("summary", json::object());
    return m;
}

RunManifest read_manifest(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open manifest " + path.string());
    }
    RunManifest m = RunManifest::from_json(json::parse(in));
    return m;
}

void write_manifest(const RunManifest& manifest)
{
    write_text(manifest.output_directory / kManifestFile, manifest.to_json().dump(2) + "\n");
}

void emit_plot_data(RunManifest& manifest)
{
    std::vector<const OutputFile*> sources;
    for (const auto& o : manifest.outputs) {
        if (o.path != kPlotFile) {
            sources.push_back(&o);
        }
    }
    if (sources.empty()) {
        throw std::runtime_error("manifest lists no output files");
    }
    std::vector<std::string> missing;
    for (const auto* o : sources) {
        if (!std::filesystem::exists(manifest.output_directory / o->path)) {
            missing.push_back((manifest.output_directory / o->path).string());
        }
    }
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) {
            list += (list.empty() ? "" : ", ") + m;
        }
        throw std::runtime_error("missing output files: " + list);
    }

    std::ostringstream body;
    csv::Writer w(body);
    w.header({"x", "series", "y"});
    for (const auto* o : sources) {
        const auto table = csv::read_table((manifest.output_directory / o->path).string());
        plot_rows(manifest, *o, table, w);
    }
    write_text(manifest.output_directory / kPlotFile, body.str());
    if (std::none_of(manifest.outputs.begin(), manifest.outputs.end(),
                     [](const OutputFile& o) { return o.path == kPlotFile; })) {
        manifest.outputs.push_back({kPlotFile, "plot_data", ""});
    }
}

RunManifest run(const ExperimentConfig& config)
{
    RunManifest manifest;
    manifest.config_digest = config_digest(config.resolved);
    manifest.tool_version = kToolVersion;
    manifest.scenario = to_string(config.kind);
    manifest.name = config.name;
    manifest.master_seed = config.master_seed;
    manifest.output_directory = config.output_directory;
    manifest.warnings = config.warnings;
    manifest.resolved_config = config.resolved;

    ScenarioOutput results;
    switch (config.kind) {
    case ScenarioKind::RelayTrace:
        results = run_relay_trace(config, manifest);
        break;
    case ScenarioKind::RelaySweep:
        results = run_relay_sweep(config, manifest);
        break;
    case ScenarioKind::Disseminate:
        results = run_dissemination(config, manifest);
        break;
    case ScenarioKind::Coverage:
        results = run_coverage(config, manifest);
        break;
    case ScenarioKind::ChannelProbe:
        results = run_channel_probe(config, manifest);
        break;
    }

    std::filesystem::create_directories(config.output_directory);
    auto write = [&](const FileBody& f) {
        write_text(config.output_directory / f.file.path, f.body);
        manifest.outputs.push_back(f.file);
    };
    for (const auto& r : results.runs) {
        manifest.runs.push_back(r.record);
        for (const auto& f : r.files) {
            write(f);
        }
    }
    for (const auto& f : results.shared) {
        write(f);
    }
    emit_plot_data(manifest);
    write_manifest(manifest);
    return manifest;
}

} // namespace uavcomm::experiment
