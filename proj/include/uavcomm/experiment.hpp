#ifndef UAVCOMM_EXPERIMENT_HPP
#define UAVCOMM_EXPERIMENT_HPP

#include "uavcomm/config.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace uavcomm::experiment {

inline constexpr const char* kToolVersion = UAVCOMM_VERSION;
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kPlotFile = "plot_data.csv";

struct RunRecord {
    std::size_t index = 0;
    std::string label;
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
};

struct OutputFile {
    std::string path; // relative to the output directory
    std::string role;
    std::string series;
};

struct RunManifest {
    std::string config_digest; // SHA-256 of the resolved config, hex
    std::string tool_version;
    std::string scenario;
    std::string name;
    std::uint64_t master_seed = 0;
    std::filesystem::path output_directory;
    std::vector<RunRecord> runs;
    std::vector<OutputFile> outputs;
    std::vector<std::string> warnings;
    nlohmann::json resolved_config;
    /// Scenario-level results (e.g. the optimal altitude).
    nlohmann::json summary = nlohmann::json::object();

    bool any_failed() const;
    nlohmann::json to_json() const;
    static RunManifest from_json(const nlohmann::json& j);
};

/// Hex SHA-256 of the canonical (sorted-key, compact) dump of `config`.
std::string config_digest(const nlohmann::json& config);

/// Executes every run of the scenario, writes the CSV outputs, the plot
/// data file and manifest.json into the output directory. Per-run seeds are
/// derive_seed(master_seed, run index). Run failures are recorded in the
/// manifest, not thrown.
RunManifest run(const ExperimentConfig& config);

/// Writes plot_data.csv (columns x,series,y) from the scenario outputs and
/// appends it to `manifest.outputs`. Throws std::runtime_error listing any
/// output that is missing, or when the manifest lists no outputs.
void emit_plot_data(RunManifest& manifest);

RunManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const RunManifest& manifest);

/// Label used for relay series: "static", "mobile_v100", ...
std::string series_label(relay::RelayStrategy strategy, double speed);

} // namespace uavcomm::experiment

#endif
