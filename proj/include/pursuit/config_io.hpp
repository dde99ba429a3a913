#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "pursuit/simulator.hpp"

namespace pursuit {

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& node, const std::string& scope,
                                std::initializer_list<const char*> allowed) {
    for (auto it = node.begin(); it != node.end(); ++it) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return it.key() == k; });
        if (!known) {
            throw std::invalid_argument("unknown config field: " + scope + "." + it.key());
        }
    }
}

template <typename T>
void read_field(const nlohmann::json& node, const std::string& scope, const char* key, T& out) {
    if (!node.contains(key)) return;
    try {
        node.at(key).get_to(out);
    } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument("config field has the wrong type: " + scope + "." + key);
    }
}

}  // namespace detail

// Applies a JSON document on top of the default race configuration. Missing
// fields keep their defaults; a rider whose mass is overridden without an
// explicit energy gets the mass * 5 W/kg * 210 s budget; unknown fields are
// rejected by name.
inline RaceConfig race_config_from_json(const nlohmann::json& root) {
    if (!root.is_object()) throw std::invalid_argument("config root must be a JSON object");
    detail::reject_unknown_keys(root, "config",
                                {"environment", "riders", "bike", "model", "track", "race", "penalty"});
    RaceConfig config = default_race_config();

    if (root.contains("environment")) {
        const auto& node = root.at("environment");
        detail::reject_unknown_keys(node, "environment",
                                    {"temperature_c", "air_pressure_hpa", "relative_humidity", "gravity_ms2"});
        double t = config.environment.temperature_c();
        double p = config.environment.air_pressure_hpa();
        double h = config.environment.relative_humidity();
        double g = config.environment.gravity();
        detail::read_field(node, "environment", "temperature_c", t);
        detail::read_field(node, "environment", "air_pressure_hpa", p);
        detail::read_field(node, "environment", "relative_humidity", h);
        detail::read_field(node, "environment", "gravity_ms2", g);
        config.environment = Environment(t, p, h, g);
    }
    if (root.contains("riders")) {
        const auto& riders = root.at("riders");
        detail::reject_unknown_keys(riders, "riders", {"A", "B", "C"});
        for (const char* name : {"A", "B", "C"}) {
            if (!riders.contains(name)) continue;
            const auto& node = riders.at(name);
            const std::string scope = std::string("riders.") + name;
            detail::reject_unknown_keys(node, scope, {"mass_kg", "cda_m2", "available_energy_j"});
            RiderParams& rider =
                config.riders[static_cast<std::size_t>(name[0] - 'A')];
            const double old_mass = rider.mass_kg;
            detail::read_field(node, scope, "mass_kg", rider.mass_kg);
            detail::read_field(node, scope, "cda_m2", rider.cda_m2);
            if (node.contains("available_energy_j")) {
                detail::read_field(node, scope, "available_energy_j", rider.available_energy_j);
            } else if (rider.mass_kg != old_mass) {
                rider.available_energy_j = rider.mass_kg * 5.0 * 210.0;
            }
        }
    }
    if (root.contains("bike")) {
        const auto& node = root.at("bike");
        detail::reject_unknown_keys(node, "bike", {"mass_kg"});
        detail::read_field(node, "bike", "mass_kg", config.bike.mass_kg);
    }
    if (root.contains("model")) {
        const auto& node = root.at("model");
        detail::reject_unknown_keys(node, "model",
                                    {"mechanical_efficiency", "global_friction", "draft_coeff_second",
                                     "draft_coeff_third", "dt_s"});
        detail::read_field(node, "model", "mechanical_efficiency", config.constants.mechanical_efficiency);
        detail::read_field(node, "model", "global_friction", config.constants.global_friction);
        detail::read_field(node, "model", "draft_coeff_second", config.constants.draft_coeff_second);
        detail::read_field(node, "model", "draft_coeff_third", config.constants.draft_coeff_third);
        detail::read_field(node, "model", "dt_s", config.constants.dt_s);
    }
    if (root.contains("track")) {
        const auto& node = root.at("track");
        detail::reject_unknown_keys(node, "track", {"lap_length_m", "laps"});
        detail::read_field(node, "track", "lap_length_m", config.geometry.lap_length_m);
        detail::read_field(node, "track", "laps", config.geometry.laps);
    }
    if (root.contains("race")) {
        const auto& node = root.at("race");
        detail::reject_unknown_keys(node, "race",
                                    {"max_half_laps", "power_min_w", "power_max_w", "transition_time_s"});
        detail::read_field(node, "race", "max_half_laps", config.max_hl);
        detail::read_field(node, "race", "power_min_w", config.power_min_w);
        detail::read_field(node, "race", "power_max_w", config.power_max_w);
        detail::read_field(node, "race", "transition_time_s", config.transition_time_s);
    }
    if (root.contains("penalty")) {
        const auto& node = root.at("penalty");
        detail::reject_unknown_keys(node, "penalty",
                                    {"base_penalty_s", "energy_deficit_weight_s_per_j",
                                     "power_violation_weight_s_per_w"});
        detail::read_field(node, "penalty", "base_penalty_s", config.penalty.base_penalty_s);
        detail::read_field(node, "penalty", "energy_deficit_weight_s_per_j",
                           config.penalty.energy_deficit_weight_s_per_j);
        detail::read_field(node, "penalty", "power_violation_weight_s_per_w",
                           config.penalty.power_violation_weight_s_per_w);
    }

    config.validate();
    return config;
}

inline nlohmann::json race_config_to_json(const RaceConfig& c) {
    nlohmann::json j;
    j["environment"] = {{"temperature_c", c.environment.temperature_c()},
                        {"air_pressure_hpa", c.environment.air_pressure_hpa()},
                        {"relative_humidity", c.environment.relative_humidity()},
                        {"gravity_ms2", c.environment.gravity()}};
    for (int r = 0; r < 3; ++r) {
        const std::string name(1, static_cast<char>('A' + r));
        j["riders"][name] = {{"mass_kg", c.riders[static_cast<std::size_t>(r)].mass_kg},
                             {"cda_m2", c.riders[static_cast<std::size_t>(r)].cda_m2},
                             {"available_energy_j", c.riders[static_cast<std::size_t>(r)].available_energy_j}};
    }
    j["bike"] = {{"mass_kg", c.bike.mass_kg}};
    j["model"] = {{"mechanical_efficiency", c.constants.mechanical_efficiency},
                  {"global_friction", c.constants.global_friction},
                  {"draft_coeff_second", c.constants.draft_coeff_second},
                  {"draft_coeff_third", c.constants.draft_coeff_third},
                  {"dt_s", c.constants.dt_s}};
    j["track"] = {{"lap_length_m", c.geometry.lap_length_m}, {"laps", c.geometry.laps}};
    j["race"] = {{"max_half_laps", c.max_hl},
                 {"power_min_w", c.power_min_w},
                 {"power_max_w", c.power_max_w},
                 {"transition_time_s", c.transition_time_s}};
    j["penalty"] = {{"base_penalty_s", c.penalty.base_penalty_s},
                    {"energy_deficit_weight_s_per_j", c.penalty.energy_deficit_weight_s_per_j},
                    {"power_violation_weight_s_per_w", c.penalty.power_violation_weight_s_per_w}};
    return j;
}

// Load a race configuration. An empty (or all-whitespace) file yields the
// full default configuration.
inline RaceConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        return default_race_config();
    }
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::invalid_argument("config file " + path.string() + " is not valid JSON: " + e.what());
    }
    return race_config_from_json(root);
}

}  // namespace pursuit
