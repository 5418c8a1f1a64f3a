#pragma once

/**
 * @file config.hpp
 * @brief JSON material/scenario/solver configuration.
 *
 * Files are strictly SI (temperatures in K, rates in K/s). Layout:
 *
 *   {
 *     "materials": { "<name>": { "thermal": {...}, "kinetics": {...} } },
 *     "scenario":  { "part_thickness": ..., "cycle": {...}, "part": "<name>", ... },
 *     "solver":    { "dx": ..., "dt": ..., "output_interval": ..., "initial_cure": ... }
 *   }
 *
 * Every section is optional; materials given in a file are merged over the
 * built-in library.
 */

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "tgml/error.hpp"
#include "tgml/materials.hpp"
#include "tgml/solver.hpp"

namespace tgml {

using MaterialLibrary = std::map<std::string, Material>;

inline constexpr const char* kCuringEpoxy = "representative_toughened_epoxy";
inline constexpr const char* kInvar = "invar";
inline constexpr const char* kCompositeTool = "composite_tool";

/// Representative toughened-epoxy prepreg (V_f = 0.57). Cure onset is near
/// 130 C at 2 C/min and a 2 h hold at 180 C cures past 0.9.
inline CureKinetics representative_epoxy_kinetics() {
    CureKinetics k;
    k.pre_exponential = 1.53e5;
    k.activation_energy = 6.65e4;
    k.exponent_m = 0.5;
    k.exponent_n = 1.6;
    k.diffusion_coefficient = 1.0e3;
    k.diffusion_B = 1.5;
    k.diffusion_a_f = 2.5e-3;
    k.diffusion_b_f = 0.1;
    k.total_heat_of_reaction = 5.74e5;
    k.resin_density = 1300.0;
    k.fiber_volume_fraction = 0.57;
    k.tg_uncured = 268.0;
    k.tg_cured = 490.0;
    k.tg_lambda = 0.4;
    return k;
}

inline MaterialLibrary default_material_library() {
    MaterialLibrary lib;
    lib[kCuringEpoxy] = Material{kCuringEpoxy, ThermalProps{1580.0, 1100.0, 0.45},
                                 representative_epoxy_kinetics()};
    lib[kInvar] = Material{kInvar, ThermalProps{8100.0, 515.0, 13.0}, std::nullopt};
    // k = 0.5 W/(m K), diffusivity 0.5e-6 m^2/s
    lib[kCompositeTool] = Material{kCompositeTool, ThermalProps{1600.0, 625.0, 0.5}, std::nullopt};
    return lib;
}

namespace detail {

inline double require_number(const nlohmann::json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) {
        throw ParseError(where + ": missing field '" + key + "'");
    }
    const auto& v = j.at(key);
    if (!v.is_number()) {
        throw ParseError(where + ": field '" + key + "' must be a number");
    }
    return v.get<double>();
}

inline double optional_number(const nlohmann::json& j, const char* key, double fallback,
                              const std::string& where) {
    if (!j.contains(key)) {
        return fallback;
    }
    return require_number(j, key, where);
}

}  // namespace detail

inline ThermalProps parse_thermal(const nlohmann::json& j, const std::string& where) {
    ThermalProps p;
    p.density = detail::require_number(j, "density", where);
    p.specific_heat = detail::require_number(j, "specific_heat", where);
    p.conductivity = detail::require_number(j, "conductivity", where);
    return p;
}

inline CureKinetics parse_kinetics(const nlohmann::json& j, const std::string& where) {
    using detail::require_number;
    CureKinetics k;
    k.pre_exponential = require_number(j, "pre_exponential", where);
    k.activation_energy = require_number(j, "activation_energy", where);
    k.exponent_m = require_number(j, "exponent_m", where);
    k.exponent_n = require_number(j, "exponent_n", where);
    k.diffusion_coefficient = require_number(j, "diffusion_coefficient", where);
    k.diffusion_B = require_number(j, "diffusion_B", where);
    k.diffusion_a_f = require_number(j, "diffusion_a_f", where);
    k.diffusion_b_f = require_number(j, "diffusion_b_f", where);
    k.total_heat_of_reaction = require_number(j, "total_heat_of_reaction", where);
    k.resin_density = require_number(j, "resin_density", where);
    k.fiber_volume_fraction = require_number(j, "fiber_volume_fraction", where);
    k.tg_uncured = require_number(j, "tg_uncured", where);
    k.tg_cured = require_number(j, "tg_cured", where);
    k.tg_lambda = require_number(j, "tg_lambda", where);
    return k;
}

inline nlohmann::json to_json(const Material& m) {
    nlohmann::json j;
    j["thermal"] = {{"density", m.thermal.density},
                    {"specific_heat", m.thermal.specific_heat},
                    {"conductivity", m.thermal.conductivity}};
    if (m.kinetics) {
        const CureKinetics& k = *m.kinetics;
        j["kinetics"] = {{"pre_exponential", k.pre_exponential},
                         {"activation_energy", k.activation_energy},
                         {"exponent_m", k.exponent_m},
                         {"exponent_n", k.exponent_n},
                         {"diffusion_coefficient", k.diffusion_coefficient},
                         {"diffusion_B", k.diffusion_B},
                         {"diffusion_a_f", k.diffusion_a_f},
                         {"diffusion_b_f", k.diffusion_b_f},
                         {"total_heat_of_reaction", k.total_heat_of_reaction},
                         {"resin_density", k.resin_density},
                         {"fiber_volume_fraction", k.fiber_volume_fraction},
                         {"tg_uncured", k.tg_uncured},
                         {"tg_cured", k.tg_cured},
                         {"tg_lambda", k.tg_lambda}};
    }
    return j;
}

inline Material parse_material(const std::string& name, const nlohmann::json& j) {
    const std::string where = "material '" + name + "'";
    if (!j.is_object() || !j.contains("thermal")) {
        throw ParseError(where + ": missing section 'thermal'");
    }
    Material m{name, parse_thermal(j.at("thermal"), where + ".thermal"), std::nullopt};
    validate(m.thermal);
    if (j.contains("kinetics")) {
        m.kinetics = parse_kinetics(j.at("kinetics"), where + ".kinetics");
        validate(*m.kinetics);
    }
    return m;
}

inline ThermalCycle parse_cycle(const nlohmann::json& j) {
    using detail::optional_number;
    ThermalCycle c;
    const std::string where = "scenario.cycle";
    c.initial_temperature = optional_number(j, "initial_temperature", c.initial_temperature, where);
    c.heating_rate = optional_number(j, "heating_rate", c.heating_rate, where);
    c.hold_temperature = optional_number(j, "hold_temperature", c.hold_temperature, where);
    c.hold_duration = optional_number(j, "hold_duration", c.hold_duration, where);
    c.cool_rate = optional_number(j, "cool_rate", c.cool_rate, where);
    validate(c);
    return c;
}

inline const Material& lookup_material(const MaterialLibrary& lib, const std::string& name) {
    auto it = lib.find(name);
    if (it == lib.end()) {
        throw ParseError("unknown material '" + name + "'");
    }
    return it->second;
}

inline Scenario parse_scenario(const nlohmann::json& j, const MaterialLibrary& lib) {
    const std::string where = "scenario";
    Scenario s;
    s.part_thickness = detail::require_number(j, "part_thickness", where);
    s.tool_thickness = detail::optional_number(j, "tool_thickness", 0.0, where);
    s.h_top = detail::require_number(j, "h_top", where);
    s.h_bottom = detail::require_number(j, "h_bottom", where);
    if (j.contains("cycle")) {
        s.cycle = parse_cycle(j.at("cycle"));
    }
    if (!j.contains("part") || !j.at("part").is_string()) {
        throw ParseError("scenario: missing material name 'part'");
    }
    s.part = lookup_material(lib, j.at("part").get<std::string>());
    if (s.tool_thickness > 0.0) {
        if (!j.contains("tool") || !j.at("tool").is_string()) {
            throw ParseError("scenario: tool_thickness > 0 requires material name 'tool'");
        }
        s.tool = lookup_material(lib, j.at("tool").get<std::string>());
    }
    s.inert = j.value("inert", false);
    validate(s);
    return s;
}

inline SolverSettings parse_solver(const nlohmann::json& j) {
    using detail::optional_number;
    SolverSettings st;
    st.dx = optional_number(j, "dx", st.dx, "solver");
    st.dt = optional_number(j, "dt", st.dt, "solver");
    st.output_interval = optional_number(j, "output_interval", st.output_interval, "solver");
    st.initial_cure = optional_number(j, "initial_cure", st.initial_cure, "solver");
    st.max_cure_increment =
        optional_number(j, "max_cure_increment", st.max_cure_increment, "solver");
    return st;
}

struct ConfigFile {
    MaterialLibrary materials = default_material_library();
    std::optional<Scenario> scenario;
    SolverSettings solver;
};

inline ConfigFile parse_config(const nlohmann::json& j) {
    if (!j.is_object()) {
        throw ParseError("config root must be an object");
    }
    ConfigFile cfg;
    if (j.contains("materials")) {
        for (const auto& [name, body] : j.at("materials").items()) {
            cfg.materials[name] = parse_material(name, body);
        }
    }
    if (j.contains("solver")) {
        cfg.solver = parse_solver(j.at("solver"));
    }
    if (j.contains("scenario")) {
        cfg.scenario = parse_scenario(j.at("scenario"), cfg.materials);
    }
    return cfg;
}

inline ConfigFile load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("config not found: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("config " + path.string() + ": " + e.what());
    }
    return parse_config(j);
}

}  // namespace tgml
