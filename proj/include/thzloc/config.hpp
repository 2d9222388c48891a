#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "thzloc/errors.hpp"
#include "thzloc/simulator.hpp"

namespace thzloc {

using json = nlohmann::json;

namespace detail {

struct ConfigField {
    std::string name;
    std::function<void(SimConfig&, const json&)> set;
    std::function<json(const SimConfig&)> get;
};

inline double as_number(const json& v, const std::string& name) {
    if (!v.is_number()) throw ConfigError(name, "expected a number");
    return v.get<double>();
}

inline long long as_integer(const json& v, const std::string& name) {
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (d == std::floor(d) && std::abs(d) < 9e15) return static_cast<long long>(d);
    }
    throw ConfigError(name, "expected an integer");
}

template <class T>
ConfigField number(const char* name, T SimConfig::*member) {
    return {name, [=](SimConfig& c, const json& v) { c.*member = as_number(v, name); },
            [=](const SimConfig& c) { return json(c.*member); }};
}

template <class T>
ConfigField count(const char* name, T SimConfig::*member) {
    return {name,
            [=](SimConfig& c, const json& v) {
                const auto n = as_integer(v, name);
                if (n < 0) throw ConfigError(name, "must be >= 0");
                c.*member = static_cast<T>(n);
            },
            [=](const SimConfig& c) { return json(c.*member); }};
}

inline ConfigField boolean(const char* name, bool SimConfig::*member) {
    return {name,
            [=](SimConfig& c, const json& v) {
                if (!v.is_boolean()) throw ConfigError(name, "expected true or false");
                c.*member = v.get<bool>();
            },
            [=](const SimConfig& c) { return json(c.*member); }};
}

inline ConfigField optional_number(const char* name, std::optional<double> SimConfig::*member) {
    return {name,
            [=](SimConfig& c, const json& v) {
                if (v.is_null())
                    c.*member = std::nullopt;
                else
                    c.*member = as_number(v, name);
            },
            [=](const SimConfig& c) { return (c.*member) ? json(*(c.*member)) : json(nullptr); }};
}

template <class Enum>
ConfigField enumeration(const char* name, Enum SimConfig::*member, std::initializer_list<Enum> options) {
    std::vector<Enum> opts(options);
    return {name,
            [=](SimConfig& c, const json& v) {
                bool found = false;
                if (v.is_string())
                    for (Enum e : opts)
                        if (to_string(e) == v.get<std::string>()) c.*member = e, found = true;
                if (!found) {
                    std::string allowed;
                    for (Enum e : opts) allowed += (allowed.empty() ? "" : ", ") + std::string(to_string(e));
                    throw ConfigError(name, "expected one of: " + allowed);
                }
            },
            [=](const SimConfig& c) { return json(std::string(to_string(c.*member))); }};
}

inline const std::vector<ConfigField>& config_fields() {
    static const std::vector<ConfigField> fields = [] {
        std::vector<ConfigField> f;
        f.push_back(count("grid_rows", &SimConfig::grid_rows));
        f.push_back(count("grid_cols", &SimConfig::grid_cols));
        f.push_back(number("spacing", &SimConfig::spacing));
        f.push_back(count("anchor_count", &SimConfig::anchor_count));
        f.push_back(enumeration("anchor_scheme", &SimConfig::anchor_scheme, {AnchorScheme::corners}));
        f.push_back(enumeration("mobility", &SimConfig::mobility,
                                {MobilityPattern::none, MobilityPattern::random_box, MobilityPattern::half_sphere,
                                 MobilityPattern::half_cylinder}));
        f.push_back(number("anchor_error_sigma", &SimConfig::anchor_error_sigma));
        f.push_back(number("generator_voltage", &SimConfig::generator_voltage));
        f.push_back(number("e_rx_pulse", &SimConfig::e_rx_pulse));
        f.push_back(number("e_tx_pulse", &SimConfig::e_tx_pulse));
        f.push_back(number("e_max", &SimConfig::e_max));
        f.push_back(number("turn_off_threshold", &SimConfig::turn_off_threshold));
        f.push_back(number("turn_on_threshold", &SimConfig::turn_on_threshold));
        f.push_back(enumeration("harvester_source", &SimConfig::harvester_source,
                                {HarvesterSource::air_vibration, HarvesterSource::rf_power}));
        f.push_back(optional_number("t_cycle", &SimConfig::t_cycle));
        f.push_back(number("delta_q_mean", &SimConfig::delta_q_mean));
        f.push_back(number("delta_q_std", &SimConfig::delta_q_std));
        f.push_back(enumeration("consumption_profile", &SimConfig::consumption_profile,
                                {ProfileKind::receive_only, ProfileKind::transmit_only, ProfileKind::transmit_sensing,
                                 ProfileKind::transmit_actuation}));
        f.push_back(count("packet_bits", &SimConfig::packet_bits));
        f.push_back(optional_number("initial_energy", &SimConfig::initial_energy));
        f.push_back(boolean("harvesting_enabled", &SimConfig::harvesting_enabled));
        f.push_back(boolean("energy_accounting", &SimConfig::energy_accounting));
        f.push_back(number("p_tx", &SimConfig::p_tx));
        f.push_back(number("sensitivity", &SimConfig::sensitivity));
        f.push_back(number("frequency", &SimConfig::frequency));
        f.push_back(number("bandwidth", &SimConfig::bandwidth));
        f.push_back(number("a_env", &SimConfig::a_env));
        f.push_back(count("n_subbands", &SimConfig::n_subbands));
        f.push_back({"absorption_table",
                     [](SimConfig& c, const json& v) {
                         if (v.is_null() || (v.is_string() && v.get<std::string>().empty())) {
                             c.absorption = {};
                             c.absorption_table.clear();
                             return;
                         }
                         if (!v.is_string()) throw ConfigError("absorption_table", "expected a file path");
                         c.absorption_table = v.get<std::string>();
                         c.absorption = load_absorption_table(c.absorption_table);
                     },
                     [](const SimConfig& c) { return json(c.absorption_table); }});
        f.push_back(enumeration("method", &SimConfig::method,
                                {LocalizationMethod::tof, LocalizationMethod::aoa, LocalizationMethod::rss}));
        f.push_back(count("k_pulses", &SimConfig::k_pulses));
        f.push_back(boolean("ranging_noise", &SimConfig::ranging_noise));
        f.push_back(number("pulse_duration", &SimConfig::pulse_duration));
        f.push_back(number("beta", &SimConfig::beta));
        f.push_back(number("aoa_sigma_deg", &SimConfig::aoa_sigma_deg));
        f.push_back(number("rss_sigma_db", &SimConfig::rss_sigma_db));
        f.push_back(number("t_tr", &SimConfig::t_tr));
        f.push_back(count("iterations", &SimConfig::iterations));
        f.push_back(number("update_period", &SimConfig::update_period));
        f.push_back({"master_seed",
                     [](SimConfig& c, const json& v) {
                         if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0))
                             c.master_seed = v.get<std::uint64_t>();
                         else
                             throw ConfigError("master_seed", "expected a non-negative integer");
                     },
                     [](const SimConfig& c) { return json(c.master_seed); }});
        return f;
    }();
    return fields;
}

}  // namespace detail

/// Names accepted in config files and as sweep axes.
inline std::vector<std::string> config_field_names() {
    std::vector<std::string> names;
    for (const auto& f : detail::config_fields()) names.push_back(f.name);
    return names;
}

/// Sets one field by name. Unknown names are rejected.
inline void apply_field(SimConfig& config, std::string_view name, const json& value) {
    for (const auto& f : detail::config_fields())
        if (f.name == name) {
            try {
                f.set(config, value);
            } catch (const json::exception& e) {
                throw ConfigError(std::string(name), e.what());
            }
            return;
        }
    throw ConfigError(std::string(name), "unknown key");
}

inline json to_json(const SimConfig& config) {
    json j = json::object();
    for (const auto& f : detail::config_fields()) j[f.name] = f.get(config);
    return j;
}

/// Applies every key of a JSON object on top of `base`, then validates.
inline SimConfig config_from_json(const json& doc, SimConfig base = {}) {
    if (!doc.is_object()) throw ConfigError("", "config must be a JSON object");
    for (const auto& [key, value] : doc.items()) apply_field(base, key, value);
    validate(base);
    return base;
}

inline SimConfig parse_config(std::string_view text, SimConfig base = {}) {
    if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
        validate(base);
        return base;
    }
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("malformed config: ") + e.what());
    }
    return config_from_json(doc, std::move(base));
}

/// Reads a JSON config; absent keys keep their defaults. A relative
/// absorption_table path is resolved against the config file's directory.
inline SimConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) return parse_config(text);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", "malformed config '" + path + "': " + e.what());
    }
    if (doc.is_object() && doc.contains("absorption_table") && doc["absorption_table"].is_string()) {
        std::filesystem::path table = doc["absorption_table"].get<std::string>();
        if (!table.empty() && table.is_relative())
            doc["absorption_table"] = (std::filesystem::path(path).parent_path() / table).string();
    }
    return config_from_json(doc);
}

/// Interprets a command-line token as JSON when possible (numbers, booleans,
/// null), otherwise as a bare string.
inline json parse_value_token(const std::string& token) {
    try {
        return json::parse(token);
    } catch (const json::parse_error&) {
        return json(token);
    }
}

}  // namespace thzloc
