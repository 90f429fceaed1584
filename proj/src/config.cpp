#include "uavcomm/config.hpp"

#include "uavcomm/dissemination.hpp"
#include "uavcomm/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace uavcomm::experiment {

using nlohmann::json;

namespace {

// Typed access to one JSON object. Defaults are written back into the
// object so the resolved config echoes every value actually used; keys
// never read are rejected by finish().
class Block {
public:
    Block(json& node, std::string path) : node_(node), path_(std::move(path))
    {
        if (!node_.is_object()) {
            fail_type("", "an object");
        }
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt)
    {
        json& v = fetch(key, opt(fallback));
        if (!v.is_number()) {
            fail_type(key, "a number");
        }
        return v.get<double>();
    }

    std::uint64_t unsigned_integer(const std::string& key,
                                   std::optional<std::uint64_t> fallback = std::nullopt)
    {
        json& v = fetch(key, opt(fallback));
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0)) {
            fail_type(key, "a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback)
    {
        json& v = fetch(key, json(fallback));
        if (!v.is_boolean()) {
            fail_type(key, "true or false");
        }
        return v.get<bool>();
    }

    std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt)
    {
        json& v = fetch(key, opt(fallback));
        if (!v.is_string()) {
            fail_type(key, "a string");
        }
        return v.get<std::string>();
    }

    std::vector<double> numbers(const std::string& key,
                                std::optional<std::vector<double>> fallback = std::nullopt)
    {
        json& v = fetch(key, opt(fallback));
        if (!v.is_array() || v.empty()) {
            fail_type(key, "a non-empty array of numbers");
        }
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) {
                fail_type(key, "a non-empty array of numbers");
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<std::string> strings(const std::string& key,
                                     std::optional<std::vector<std::string>> fallback)
    {
        json& v = fetch(key, opt(fallback));
        if (!v.is_array() || v.empty()) {
            fail_type(key, "a non-empty array of strings");
        }
        std::vector<std::string> out;
        for (const auto& e : v) {
            if (!e.is_string()) {
                fail_type(key, "a non-empty array of strings");
            }
            out.push_back(e.get<std::string>());
        }
        return out;
    }

    /// Optional number where JSON null means "absent".
    std::optional<double> nullable_number(const std::string& key)
    {
        json& v = fetch(key, json(nullptr));
        if (v.is_null()) {
            return std::nullopt;
        }
        if (!v.is_number()) {
            fail_type(key, "a number or null");
        }
        return v.get<double>();
    }

    bool has(const std::string& key) const { return node_.contains(key); }

    Block child(const std::string& key, bool required)
    {
        if (!node_.contains(key)) {
            if (required) {
                throw ConfigError("missing required field '" + qualified(key) + "'");
            }
            node_[key] = json::object();
        }
        seen_.insert(key);
        return Block(node_[key], qualified(key));
    }

    void finish() const
    {
        for (const auto& [key, _] : node_.items()) {
            if (!seen_.contains(key)) {
                throw ConfigError("unknown field '" + qualified(key) + "'");
            }
        }
    }

    std::string qualified(const std::string& key) const
    {
        if (key.empty()) {
            return path_;
        }
        return path_.empty() ? key : path_ + "." + key;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& message) const
    {
        throw ConfigError("field '" + qualified(key) + "': " + message);
    }

private:
    template <typename T>
    static std::optional<json> opt(const std::optional<T>& value)
    {
        return value ? std::optional<json>(json(*value)) : std::nullopt;
    }

    // An empty fallback makes the field required.
    json& fetch(const std::string& key, std::optional<json> fallback)
    {
        seen_.insert(key);
        if (!node_.contains(key)) {
            if (!fallback) {
                throw ConfigError("missing required field '" + qualified(key) + "'");
            }
            node_[key] = std::move(*fallback);
        }
        return node_[key];
    }

    [[noreturn]] void fail_type(const std::string& key, const std::string& expected) const
    {
        if (key.empty()) {
            throw ConfigError("'" + path_ + "' must be " + expected);
        }
        throw ConfigError("field '" + qualified(key) + "' must be " + expected);
    }

    json& node_;
    std::string path_;
    std::set<std::string> seen_;
};

// Wraps a module precondition failure into a ConfigError naming the field.
template <typename Fn>
void check(const Block& block, const std::string& key, Fn&& fn)
{
    try {
        fn();
    } catch (const InfeasibleError& e) {
        block.fail(key, e.what());
    } catch (const DomainError& e) {
        block.fail(key, e.what());
    } catch (const ConfigError& e) {
        block.fail(key, e.what());
    }
}

void warn_band(double frequency, std::vector<std::string>& warnings)
{
    if (auto w = protected_band_warning(frequency)) {
        warnings.push_back(*w);
    }
}

channel::MeanModel parse_mean_model(Block& b, const std::string& key)
{
    const std::string model = b.string(key, "free_space");
    if (model == "free_space") {
        return channel::FreeSpace{};
    }
    if (model == "two_ray") {
        return channel::TwoRay{b.number("reflection_coefficient", -1.0)};
    }
    b.fail(key, "expected free_space or two_ray, got '" + model + "'");
}

channel::ChannelModel parse_channel(Block& b, double carrier)
{
    channel::ChannelModel model;
    model.carrier_frequency = carrier;
    const std::string kind = b.string("model", "free_space");
    if (kind == "rician") {
        channel::Rician rician;
        rician.k_factor_db = b.number("k_factor_db", 15.0);
        rician.base = parse_mean_model(b, "base");
        model.variant = rician;
    } else if (kind == "two_ray") {
        model.variant = channel::TwoRay{b.number("reflection_coefficient", -1.0)};
    } else if (kind == "free_space") {
        model.variant = channel::FreeSpace{};
    } else {
        b.fail("model", "expected free_space, two_ray or rician, got '" + kind + "'");
    }
    check(b, "", [&] { model.validate(); });
    b.finish();
    return model;
}

RelayParams parse_relay(Block& root, ScenarioKind kind, double time_step,
                        std::vector<std::string>& warnings)
{
    Block b = root.child("relay", true);
    RelayParams p;
    const double separation = b.number("separation_m");
    const double altitude = b.number("altitude_m");
    const double carrier = b.number("carrier_hz");
    p.geometry = mobility::RelayGeometry::on_axis(separation, altitude, 0.0, 1.0);
    p.geometry.terminal_height = b.number("terminal_height_m", 0.0);
    p.reference_snr_db = b.number("reference_snr_db", 10.0);
    if (kind == ScenarioKind::RelayTrace) {
        p.delays = {b.number("delay_s")};
    } else {
        p.delays = b.numbers("delays_s");
    }
    p.speeds = b.numbers("speeds_mps");
    for (const auto& s : b.strings("strategies", std::vector<std::string>{"static", "mobile"})) {
        check(b, "strategies", [&] { p.strategies.push_back(relay::parse_strategy(s)); });
    }
    p.buffer_capacity = b.nullable_number("buffer_capacity_bits");
    if (p.buffer_capacity && !(*p.buffer_capacity >= 0.0)) {
        b.fail("buffer_capacity_bits", "must be non-negative or null");
    }
    Block ch = b.child("channel", false);
    p.channel = parse_channel(ch, carrier);
    b.finish();

    check(b, "carrier_hz", [&] { require_positive(carrier, "carrier frequency"); });
    check(b, "separation_m", [&] { require_positive(separation, "separation"); });
    check(b, "altitude_m", [&] { require_positive(altitude, "UAV altitude"); });
    check(b, "terminal_height_m", [&] { require_non_negative(p.geometry.terminal_height, "terminal height"); });
    for (double delay : p.delays) {
        check(b, kind == ScenarioKind::RelayTrace ? "delay_s" : "delays_s", [&] {
            require_positive(delay, "delay budget");
            mobility::steps_in(delay, time_step);
        });
        for (double v : p.speeds) {
            mobility::RelayGeometry cell = p.geometry;
            cell.delay_budget = delay;
            cell.v_max = v;
            check(b, "speeds_mps", [&] { cell.validate(); });
            const bool has_ferry = std::find(p.strategies.begin(), p.strategies.end(),
                                             relay::RelayStrategy::Ferry) != p.strategies.end();
            if (kind == ScenarioKind::RelayTrace && has_ferry) {
                check(b, "speeds_mps", [&] { mobility::ferry_hover_duration(cell); });
            }
        }
    }
    warn_band(carrier, warnings);
    return p;
}

DisseminationParams parse_dissemination(Block& root)
{
    Block b = root.child("dissemination", true);
    DisseminationParams p;
    p.node_count = b.unsigned_integer("node_count");
    p.field_length = b.number("field_length_m", 1000.0);
    p.altitude = b.number("altitude_m", 100.0);
    p.speed = b.number("speed_mps", 20.0);
    p.path_start_x = b.number("path_start_x_m", 0.0);
    p.path_end_x = b.number("path_end_x_m", p.field_length);
    p.coverage_radius = b.number("coverage_radius_m");
    p.erasure_probability = b.number("erasure_probability");
    p.packets = b.unsigned_integer("packets");
    p.slot_duration = b.number("slot_s", 0.5);
    p.d2d_range = b.number("d2d_range_m", 120.0);
    p.runs = b.unsigned_integer("runs", 50);
    p.round_cap = b.unsigned_integer("round_cap", 10000);
    p.pass_cap = b.unsigned_integer("pass_cap", 1000);
    b.finish();

    if (p.node_count == 0) {
        b.fail("node_count", "must be at least 1");
    }
    if (p.packets == 0) {
        b.fail("packets", "must be at least 1");
    }
    if (p.runs == 0) {
        b.fail("runs", "must be at least 1");
    }
    check(b, "field_length_m", [&] { require_positive(p.field_length, "field length"); });
    check(b, "altitude_m", [&] { require_positive(p.altitude, "altitude"); });
    check(b, "speed_mps", [&] { require_positive(p.speed, "speed"); });
    check(b, "slot_s", [&] { require_positive(p.slot_duration, "slot duration"); });
    check(b, "d2d_range_m", [&] { require_non_negative(p.d2d_range, "D2D range"); });
    check(b, "coverage_radius_m", [&] {
        dissemination::ReceptionModel{p.coverage_radius, 0.0}.validate();
    });
    check(b, "erasure_probability", [&] {
        dissemination::ReceptionModel{1.0, p.erasure_probability}.validate();
    });
    return p;
}

CoverageParams parse_coverage(Block& root, std::vector<std::string>& warnings)
{
    Block b = root.child("coverage", true);
    CoverageParams p;
    const std::string env_name = b.string("environment", "urban");
    const auto env = coverage::find_environment(env_name);
    if (!env) {
        b.fail("environment", "unknown environment '" + env_name + "'");
    }
    p.los.s_curve_a = b.number("s_curve_a", env->los.s_curve_a);
    p.los.s_curve_b = b.number("s_curve_b", env->los.s_curve_b);
    p.excess.eta_los = b.number("eta_los_db", env->excess.eta_los);
    p.excess.eta_nlos = b.number("eta_nlos_db", env->excess.eta_nlos);
    p.frequency = b.number("carrier_hz");
    p.max_path_loss = b.number("max_path_loss_db");
    p.altitude_min = b.number("altitude_min_m", 10.0);
    p.altitude_max = b.number("altitude_max_m", 3000.0);
    p.resolution = b.number("resolution_m", 1.0);
    b.finish();

    check(b, "s_curve_a", [&] { p.los.validate(); });
    check(b, "eta_nlos_db", [&] { p.excess.validate(); });
    check(b, "carrier_hz", [&] { require_positive(p.frequency, "carrier frequency"); });
    check(b, "altitude_min_m", [&] { require_positive(p.altitude_min, "lower altitude bound"); });
    check(b, "resolution_m", [&] { require_positive(p.resolution, "altitude resolution"); });
    if (!(p.altitude_max >= p.altitude_min)) {
        b.fail("altitude_max_m", "must not be below altitude_min_m");
    }
    warn_band(p.frequency, warnings);
    return p;
}

ProbeParams parse_probe(Block& root, std::vector<std::string>& warnings)
{
    Block b = root.child("channel_probe", true);
    ProbeParams p;
    p.frequency = b.number("carrier_hz");
    p.uav_altitude = b.number("uav_altitude_m", 100.0);
    p.terminal_height = b.number("terminal_height_m", 1.5);
    p.ground_ranges = b.numbers(
        "ground_ranges_m",
        std::vector<double>{0, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000, 20000});
    p.reference_snr_db = b.number("reference_snr_db", 10.0);
    p.reference_distance = b.number("reference_distance_m", 509.90);
    p.reflection_coefficient = b.number("reflection_coefficient", -1.0);
    p.k_factors_db = b.numbers("k_factors_db", std::vector<double>{0, 5, 15, 28});
    p.fading_samples = b.unsigned_integer("fading_samples", 100000);
    p.relative_speeds = b.numbers("relative_speeds_mps", std::vector<double>{0, 10, 50, 100, 200});
    b.finish();

    check(b, "carrier_hz", [&] { require_positive(p.frequency, "carrier frequency"); });
    check(b, "uav_altitude_m", [&] { require_positive(p.uav_altitude, "UAV altitude"); });
    check(b, "terminal_height_m", [&] { require_non_negative(p.terminal_height, "terminal height"); });
    check(b, "reference_distance_m", [&] {
        require_positive(p.reference_distance, "reference distance");
        if (p.reference_distance < std::abs(p.uav_altitude - p.terminal_height)) {
            throw DomainError("reference distance is shorter than the height difference");
        }
    });
    check(b, "reflection_coefficient", [&] {
        channel::ChannelModel m{channel::TwoRay{p.reflection_coefficient}, p.frequency};
        m.validate();
    });
    for (double r : p.ground_ranges) {
        check(b, "ground_ranges_m", [&] { require_non_negative(r, "ground range"); });
    }
    for (double k : p.k_factors_db) {
        if (!std::isfinite(k)) {
            b.fail("k_factors_db", "K-factors must be finite");
        }
    }
    for (double v : p.relative_speeds) {
        check(b, "relative_speeds_mps", [&] { require_non_negative(v, "relative speed"); });
    }
    if (p.fading_samples < 2) {
        b.fail("fading_samples", "must be at least 2");
    }
    warn_band(p.frequency, warnings);
    return p;
}

const std::map<std::string, json, std::less<>>& presets()
{
    static const std::map<std::string, json, std::less<>> table{
        {"fig3", json{
                     {"scenario", "relay_trace"},
                     {"name", "fig3"},
                     {"relay",
                      {{"separation_m", 1000.0},
                       {"altitude_m", 100.0},
                       {"carrier_hz", 5e9},
                       {"delay_s", 20.0},
                       {"speeds_mps", {10.0, 30.0, 100.0}},
                       {"strategies", {"static", "mobile"}},
                       {"reference_snr_db", 10.0}}},
                 }},
        {"fig4", json{
                     {"scenario", "relay_sweep"},
                     {"name", "fig4"},
                     {"relay",
                      {{"separation_m", 1000.0},
                       {"altitude_m", 100.0},
                       {"carrier_hz", 5e9},
                       {"delays_s", {5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0}},
                       {"speeds_mps", {10.0, 30.0, 100.0}},
                       {"strategies", {"static", "mobile"}},
                       {"reference_snr_db", 10.0}}},
                 }},
        {"fig4_ferry", json{
                           {"scenario", "relay_sweep"},
                           {"name", "fig4_ferry"},
                           {"relay",
                            {{"separation_m", 1000.0},
                             {"altitude_m", 100.0},
                             {"carrier_hz", 5e9},
                             {"delays_s", {5.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0, 70.0, 80.0, 90.0, 100.0}},
                             {"speeds_mps", {10.0, 30.0, 100.0}},
                             {"strategies", {"static", "mobile", "ferry"}},
                             {"reference_snr_db", 10.0}}},
                       }},
        {"dissemination", json{
                              {"scenario", "disseminate"},
                              {"name", "dissemination"},
                              {"dissemination",
                               {{"node_count", 20},
                                {"field_length_m", 1000.0},
                                {"altitude_m", 100.0},
                                {"speed_mps", 20.0},
                                {"coverage_radius_m", 300.0},
                                {"erasure_probability", 0.3},
                                {"packets", 50},
                                {"slot_s", 0.5},
                                {"d2d_range_m", 120.0},
                                {"runs", 50}}},
                          }},
        {"coverage_urban", json{
                               {"scenario", "coverage"},
                               {"name", "coverage_urban"},
                               {"coverage",
                                {{"environment", "urban"},
                                 {"carrier_hz", 2e9},
                                 {"max_path_loss_db", 110.0},
                                 {"altitude_min_m", 10.0},
                                 {"altitude_max_m", 3000.0},
                                 {"resolution_m", 1.0}}},
                           }},
        {"channel_probe", json{
                              {"scenario", "channel_probe"},
                              {"name", "channel_probe"},
                              {"channel_probe", {{"carrier_hz", 5e9}}},
                          }},
    };
    return table;
}

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return {line, column};
}

} // namespace

std::string to_string(ScenarioKind kind)
{
    switch (kind) {
    case ScenarioKind::RelayTrace:
        return "relay_trace";
    case ScenarioKind::RelaySweep:
        return "relay_sweep";
    case ScenarioKind::Disseminate:
        return "disseminate";
    case ScenarioKind::Coverage:
        return "coverage";
    case ScenarioKind::ChannelProbe:
        return "channel_probe";
    }
    return "unknown";
}

ScenarioKind parse_scenario(std::string_view name)
{
    for (auto kind : {ScenarioKind::RelayTrace, ScenarioKind::RelaySweep, ScenarioKind::Disseminate,
                      ScenarioKind::Coverage, ScenarioKind::ChannelProbe}) {
        if (to_string(kind) == name) {
            return kind;
        }
    }
    throw ConfigError("unknown scenario '" + std::string(name) + "'");
}

std::optional<std::string> protected_band_warning(double frequency)
{
    auto describe = [&](const char* band) {
        std::ostringstream msg;
        msg << "carrier frequency " << frequency / 1e6 << " MHz lies inside the protected CNPC "
            << band;
        return msg.str();
    };
    if (BandConstants::cnpc_l_band.contains(frequency)) {
        return describe("L-band (960-977 MHz)");
    }
    if (BandConstants::cnpc_c_band.contains(frequency)) {
        return describe("C-band (5030-5091 MHz)");
    }
    return std::nullopt;
}

std::vector<std::string> preset_names()
{
    std::vector<std::string> names;
    for (const auto& [name, _] : presets()) {
        names.push_back(name);
    }
    return names;
}

json preset(std::string_view name)
{
    const auto& table = presets();
    const auto it = table.find(name);
    if (it == table.end()) {
        std::string known;
        for (const auto& n : preset_names()) {
            known += (known.empty() ? "" : ", ") + n;
        }
        throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
    }
    return it->second;
}

ExperimentConfig resolve_config(json doc, const ConfigOverrides& overrides)
{
    if (!doc.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    std::optional<std::string> preset_name = overrides.preset;
    if (!preset_name && doc.contains("preset")) {
        if (!doc["preset"].is_string()) {
            throw ConfigError("field 'preset' must be a string");
        }
        preset_name = doc["preset"].get<std::string>();
    }
    if (preset_name) {
        json base = preset(*preset_name);
        base.merge_patch(doc);
        doc = std::move(base);
        doc["preset"] = *preset_name;
    }
    if (overrides.seed) {
        doc["master_seed"] = *overrides.seed;
    }
    if (overrides.output_directory) {
        doc["output_directory"] = overrides.output_directory->string();
    }
    if (overrides.time_step) {
        doc["time_step"] = *overrides.time_step;
    }
    if (overrides.parallel) {
        doc["parallel"] = *overrides.parallel;
    }
    if (!doc.contains("output_directory")) {
        const char* env = std::getenv(kOutputDirEnv);
        doc["output_directory"] = (env && *env) ? std::string(env) : std::string("uavsim-out");
    }

    ExperimentConfig cfg;
    Block root(doc, "");
    if (root.has("preset")) {
        root.string("preset");
    }
    const std::string scenario = root.string("scenario");
    try {
        cfg.kind = parse_scenario(scenario);
    } catch (const ConfigError& e) {
        root.fail("scenario", e.what());
    }
    cfg.name = root.string("name", preset_name.value_or(scenario));
    cfg.master_seed = root.unsigned_integer("master_seed", 1);
    cfg.output_directory = root.string("output_directory");
    cfg.time_step = root.number("time_step", 0.01);
    cfg.parallel = root.boolean("parallel", true);
    check(root, "time_step", [&] { require_positive(cfg.time_step, "time step"); });
    if (cfg.output_directory.empty()) {
        root.fail("output_directory", "must not be empty");
    }

    switch (cfg.kind) {
    case ScenarioKind::RelayTrace:
    case ScenarioKind::RelaySweep:
        cfg.params = parse_relay(root, cfg.kind, cfg.time_step, cfg.warnings);
        break;
    case ScenarioKind::Disseminate:
        cfg.params = parse_dissemination(root);
        break;
    case ScenarioKind::Coverage:
        cfg.params = parse_coverage(root, cfg.warnings);
        break;
    case ScenarioKind::ChannelProbe:
        cfg.params = parse_probe(root, cfg.warnings);
        break;
    }
    root.finish();
    cfg.resolved = std::move(doc);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ConfigOverrides& overrides)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto [line, column] = line_and_column(text, e.byte);
        std::ostringstream msg;
        msg << path.string() << ":" << line << ":" << column << ": parse error: " << e.what();
        throw ConfigError(msg.str());
    }
    return resolve_config(std::move(doc), overrides);
}

ExperimentConfig load_preset(std::string_view name, const ConfigOverrides& overrides)
{
    ConfigOverrides o = overrides;
    o.preset = std::string(name);
    return resolve_config(json::object(), o);
}

} // namespace uavcomm::experiment
