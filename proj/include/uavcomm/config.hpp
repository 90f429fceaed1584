#ifndef UAVCOMM_CONFIG_HPP
#define UAVCOMM_CONFIG_HPP

#include "uavcomm/channel.hpp"
#include "uavcomm/coverage.hpp"
#include "uavcomm/mobility.hpp"
#include "uavcomm/relay.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace uavcomm::experiment {

enum class ScenarioKind { RelayTrace, RelaySweep, Disseminate, Coverage, ChannelProbe };

std::string to_string(ScenarioKind kind);
ScenarioKind parse_scenario(std::string_view name);

struct FrequencyBand {
    double low_hz;
    double high_hz;

    bool contains(double f) const noexcept { return f >= low_hz && f <= high_hz; }
};

/// Spectrum protected for control and non-payload communication links.
struct BandConstants {
    static constexpr FrequencyBand cnpc_l_band{960e6, 977e6};
    static constexpr FrequencyBand cnpc_c_band{5030e6, 5091e6};
};

/// Empty when `frequency` is clear of both bands, otherwise a warning text.
std::optional<std::string> protected_band_warning(double frequency);

struct RelayParams {
    /// v_max and delay_budget are per-run; the template carries the rest.
    mobility::RelayGeometry geometry;
    std::vector<double> delays;
    std::vector<double> speeds;
    std::vector<relay::RelayStrategy> strategies;
    double reference_snr_db = 10.0;
    channel::ChannelModel channel;
    std::optional<double> buffer_capacity;
};

struct DisseminationParams {
    std::size_t node_count = 20;
    double field_length = 1000.0;
    double altitude = 100.0;
    double speed = 20.0;
    double path_start_x = 0.0;
    double path_end_x = 1000.0;
    double coverage_radius = 300.0;
    double erasure_probability = 0.3;
    std::size_t packets = 50;
    double slot_duration = 0.5;
    double d2d_range = 120.0;
    std::size_t runs = 50;
    std::size_t round_cap = 10000;
    std::size_t pass_cap = 1000;
};

struct CoverageParams {
    coverage::LosProbabilityModel los;
    coverage::ExcessLoss excess;
    double frequency = 2e9;
    double max_path_loss = 110.0;
    double altitude_min = 10.0;
    double altitude_max = 3000.0;
    double resolution = 1.0;
};

struct ProbeParams {
    double frequency = 5e9;
    double uav_altitude = 100.0;
    double terminal_height = 1.5;
    std::vector<double> ground_ranges;
    double reference_snr_db = 10.0;
    double reference_distance = 509.90;
    double reflection_coefficient = -1.0;
    std::vector<double> k_factors_db;
    std::size_t fading_samples = 100000;
    std::vector<double> relative_speeds;
};

struct ExperimentConfig {
    ScenarioKind kind = ScenarioKind::RelayTrace;
    std::string name;
    std::uint64_t master_seed = 1;
    std::filesystem::path output_directory;
    double time_step = 0.01;
    bool parallel = true;
    std::variant<RelayParams, DisseminationParams, CoverageParams, ProbeParams> params;
    std::vector<std::string> warnings;
    /// The full configuration after presets, overrides and defaults.
    nlohmann::json resolved;

    const RelayParams& relay() const { return std::get<RelayParams>(params); }
    const DisseminationParams& dissemination() const { return std::get<DisseminationParams>(params); }
    const CoverageParams& coverage() const { return std::get<CoverageParams>(params); }
    const ProbeParams& probe() const { return std::get<ProbeParams>(params); }
};

/// Command-line values that take precedence over the file.
struct ConfigOverrides {
    std::optional<std::string> preset;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output_directory;
    std::optional<double> time_step;
    std::optional<bool> parallel;
};

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "UAVSIM_OUT_DIR";

std::vector<std::string> preset_names();
/// Raw JSON of a built-in preset; throws ConfigError for unknown names.
nlohmann::json preset(std::string_view name);

/// Applies presets, overrides and defaults, then validates every parameter
/// block. Throws ConfigError naming the offending field.
ExperimentConfig resolve_config(nlohmann::json doc, const ConfigOverrides& overrides = {});

/// Reads a JSON config file. Syntax errors report line and column.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const ConfigOverrides& overrides = {});

/// Resolves a preset by name.
ExperimentConfig load_preset(std::string_view name, const ConfigOverrides& overrides = {});

} // namespace uavcomm::experiment

#endif
