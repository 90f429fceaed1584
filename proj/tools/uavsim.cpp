// uavsim: command-line front end for the UAV relaying, dissemination,
// coverage and channel simulators.
//
// Exit codes: 0 success, 1 at least one run failed, 2 configuration error.

#include "uavcomm/error.hpp"
#include "uavcomm/experiment.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <optional>
#include <string>

namespace {

using uavcomm::experiment::ScenarioKind;

struct CommonFlags {
    std::string config;
    std::string preset;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::optional<double> time_step;
    bool serial = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags)
{
    cmd->add_option("--config", flags.config, "JSON configuration file");
    cmd->add_option("--preset", flags.preset, "Built-in preset (applied under --config)");
    cmd->add_option("--seed", flags.seed, "Master seed (u64)");
    cmd->add_option("--out", flags.out, "Output directory");
    cmd->add_option("--time-step", flags.time_step, "Simulation time step in seconds");
    cmd->add_flag("--serial", flags.serial, "Run everything on the calling thread");
}

const char* default_preset(ScenarioKind kind)
{
    switch (kind) {
    case ScenarioKind::RelayTrace:
        return "fig3";
    case ScenarioKind::RelaySweep:
        return "fig4";
    case ScenarioKind::Disseminate:
        return "dissemination";
    case ScenarioKind::Coverage:
        return "coverage_urban";
    case ScenarioKind::ChannelProbe:
        return "channel_probe";
    }
    return "";
}

int execute(ScenarioKind kind, const CommonFlags& flags)
{
    namespace ex = uavcomm::experiment;
    ex::ExperimentConfig config;
    try {
        ex::ConfigOverrides overrides;
        overrides.seed = flags.seed;
        overrides.time_step = flags.time_step;
        if (!flags.out.empty()) {
            overrides.output_directory = flags.out;
        }
        if (flags.serial) {
            overrides.parallel = false;
        }
        if (!flags.preset.empty()) {
            overrides.preset = flags.preset;
        }
        if (!flags.config.empty()) {
            config = ex::load_config(flags.config, overrides);
        } else {
            if (!overrides.preset) {
                overrides.preset = default_preset(kind);
            }
            config = ex::resolve_config(nlohmann::json::object(), overrides);
        }
        if (config.kind != kind) {
            throw uavcomm::ConfigError("configuration describes scenario '" +
                                       ex::to_string(config.kind) + "' but the command runs '" +
                                       ex::to_string(kind) + "'");
        }
    } catch (const std::exception& e) {
        std::cerr << "uavsim: config error: " << e.what() << "\n";
        return 2;
    }

    for (const auto& w : config.warnings) {
        std::cerr << "uavsim: warning: " << w << "\n";
    }

    ex::RunManifest manifest;
    try {
        manifest = ex::run(config);
    } catch (const std::exception& e) {
        std::cerr << "uavsim: run error: " << e.what() << "\n";
        return 1;
    }
    for (const auto& r : manifest.runs) {
        if (!r.ok) {
            std::cerr << "uavsim: run " << r.index << " (" << r.label << ") failed: " << r.error
                      << "\n";
        }
    }
    std::cout << "wrote " << manifest.outputs.size() << " files to "
              << manifest.output_directory.string() << " (config " << manifest.config_digest.substr(0, 12)
              << ")\n";
    if (manifest.summary.contains("optimal_altitude_m")) {
        std::cout << "optimal altitude " << manifest.summary["optimal_altitude_m"] << " m, radius "
                  << manifest.summary["optimal_radius_m"] << " m\n";
    }
    return manifest.any_failed() ? 1 : 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"UAV-aided wireless communication simulator"};
    app.set_version_flag("--version", uavcomm::experiment::kToolVersion);
    app.require_subcommand(1);

    CommonFlags trace_flags, sweep_flags, dis_flags, cov_flags, probe_flags;

    auto* relay = app.add_subcommand("relay", "Static, mobile and ferry relaying");
    relay->require_subcommand(1);
    auto* trace = relay->add_subcommand("trace", "Per-step path-loss and buffer traces of one cycle");
    add_common(trace, trace_flags);
    auto* sweep = relay->add_subcommand("sweep", "End-to-end spectral efficiency versus delay budget");
    add_common(sweep, sweep_flags);

    auto* dis = app.add_subcommand("disseminate", "Coded broadcast with D2D exchange versus repeated broadcast");
    add_common(dis, dis_flags);

    auto* cov = app.add_subcommand("coverage", "Coverage radius versus altitude and the optimal altitude");
    add_common(cov, cov_flags);

    auto* chan = app.add_subcommand("channel", "Channel model diagnostics");
    chan->require_subcommand(1);
    auto* probe = chan->add_subcommand("probe", "Path loss, SNR, Doppler and Rician fading statistics");
    add_common(probe, probe_flags);

    auto* presets = app.add_subcommand("presets", "List built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (presets->parsed()) {
        for (const auto& name : uavcomm::experiment::preset_names()) {
            std::cout << name << "\n";
        }
        return 0;
    }
    if (trace->parsed()) {
        return execute(ScenarioKind::RelayTrace, trace_flags);
    }
    if (sweep->parsed()) {
        return execute(ScenarioKind::RelaySweep, sweep_flags);
    }
    if (dis->parsed()) {
        return execute(ScenarioKind::Disseminate, dis_flags);
    }
    if (cov->parsed()) {
        return execute(ScenarioKind::Coverage, cov_flags);
    }
    if (probe->parsed()) {
        return execute(ScenarioKind::ChannelProbe, probe_flags);
    }
    return 2;
}
