#pragma once

/**
 * @file solver.hpp
 * @brief 1D through-thickness heat transfer with exothermic cure.
 *
 * A part (top, exposed to h_top) sits on an optional tool (bottom, exposed to
 * h_bottom). Space is discretized with vertex-centred finite volumes on a
 * per-layer uniform mesh whose part/tool interface is a shared node (perfect
 * contact). Time integration is backward Euler with a direct tridiagonal
 * solve. Cure is advanced by first-order operator splitting: each step first
 * integrates the degree of cure at the step-start temperature with explicit
 * sub-steps bounded by `max_cure_increment`, then conducts heat with the
 * released enthalpy as a source.
 *
 * The discretization is exactly conservative: the stored enthalpy change
 * equals boundary heat plus released reaction heat to round-off.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "tgml/error.hpp"
#include "tgml/materials.hpp"
#include "tgml/tridiagonal.hpp"

namespace tgml {

/// One-hold cure cycle: linear ramp, hold, linear cool back to the start temperature.
struct ThermalCycle {
    double initial_temperature = 293.15;  // K
    double heating_rate = 2.0 / 60.0;     // K/s
    double hold_temperature = 453.15;     // K
    double hold_duration = 7200.0;        // s
    double cool_rate = 2.0 / 60.0;        // K/s, magnitude

    double ramp_end() const {
        return (hold_temperature - initial_temperature) / heating_rate;
    }
    double hold_end() const { return ramp_end() + hold_duration; }
    double end_time() const {
        return hold_end() + (hold_temperature - initial_temperature) / std::abs(cool_rate);
    }
};

inline void validate(const ThermalCycle& c) {
    // A hold equal to the start temperature is accepted as an isothermal cycle.
    if (!(c.hold_temperature >= c.initial_temperature) || !(c.initial_temperature > 0.0)) {
        throw std::invalid_argument("hold temperature must not be below the start temperature");
    }
    if (!(c.heating_rate > 0.0)) {
        throw std::invalid_argument("heating rate must be positive");
    }
    if (!(c.hold_duration >= 0.0)) {
        throw std::invalid_argument("hold duration must be non-negative");
    }
    if (!(std::abs(c.cool_rate) > 0.0)) {
        throw std::invalid_argument("cool rate must be non-zero");
    }
}

/// Piecewise-linear air temperature of the cycle; continuous, clamps to T0 after cool-down.
inline double air_temperature(const ThermalCycle& c, double t) {
    if (t <= 0.0) {
        return c.initial_temperature;
    }
    const double t_ramp = c.ramp_end();
    if (t < t_ramp) {
        return c.initial_temperature + c.heating_rate * t;
    }
    const double t_hold = c.hold_end();
    if (t <= t_hold) {
        return c.hold_temperature;
    }
    return std::max(c.initial_temperature,
                    c.hold_temperature - std::abs(c.cool_rate) * (t - t_hold));
}

struct Scenario {
    double part_thickness = 0.0;  // m
    double tool_thickness = 0.0;  // m, 0 for a tool-less slab
    double h_top = 0.0;           // W/(m^2 K), exposed part face
    double h_bottom = 0.0;        // W/(m^2 K), exposed tool face (or slab bottom)
    ThermalCycle cycle;
    Material part;
    Material tool;
    bool inert = false;

    bool has_tool() const { return tool_thickness > 0.0; }
};

inline void validate(const Scenario& s) {
    if (!(s.part_thickness > 0.0)) {
        throw std::invalid_argument("part thickness must be positive");
    }
    if (!(s.tool_thickness >= 0.0)) {
        throw std::invalid_argument("tool thickness must be non-negative");
    }
    if (!(s.h_top > 0.0) || !(s.h_bottom > 0.0)) {
        throw std::invalid_argument("heat transfer coefficients must be positive");
    }
    validate(s.cycle);
    validate(s.part.thermal);
    if (s.has_tool()) {
        validate(s.tool.thermal);
    }
    if (!s.inert) {
        if (!s.part.kinetics) {
            throw std::invalid_argument("curing part material '" + s.part.name + "' has no kinetics");
        }
        validate(*s.part.kinetics);
    }
}

enum class Layer { Part, Tool };

struct Mesh {
    std::vector<double> positions;  // m, from the exposed part face downward
    std::vector<Layer> layer;       // interface node is tagged Part
    std::size_t interface_index = 0;  // last part node

    std::size_t size() const { return positions.size(); }
    std::size_t part_node_count() const { return interface_index + 1; }
};

inline constexpr std::size_t kMinIntervalsPerLayer = 4;  // 5 nodes
inline constexpr std::size_t kDefaultIntervalsPerLayer = 40;

inline Mesh build_mesh_intervals(double part_thickness, std::size_t part_intervals,
                                 double tool_thickness, std::size_t tool_intervals) {
    if (!(part_thickness > 0.0) || !(tool_thickness >= 0.0)) {
        throw std::invalid_argument("invalid layer geometry");
    }
    if (part_intervals < kMinIntervalsPerLayer ||
        (tool_thickness > 0.0 && tool_intervals < kMinIntervalsPerLayer)) {
        throw std::invalid_argument("each layer needs at least 5 nodes");
    }
    Mesh mesh;
    const double dz_part = part_thickness / static_cast<double>(part_intervals);
    for (std::size_t i = 0; i <= part_intervals; ++i) {
        mesh.positions.push_back(i == part_intervals ? part_thickness
                                                     : dz_part * static_cast<double>(i));
        mesh.layer.push_back(Layer::Part);
    }
    mesh.interface_index = part_intervals;
    if (tool_thickness > 0.0) {
        const double dz_tool = tool_thickness / static_cast<double>(tool_intervals);
        for (std::size_t i = 1; i <= tool_intervals; ++i) {
            mesh.positions.push_back(i == tool_intervals
                                         ? part_thickness + tool_thickness
                                         : part_thickness + dz_tool * static_cast<double>(i));
            mesh.layer.push_back(Layer::Tool);
        }
    }
    return mesh;
}

/// Uniform spacing per layer no finer than dx_target (floor rule), at least 5 nodes per layer.
inline Mesh build_mesh(const Scenario& s, double dx_target) {
    if (!(dx_target > 0.0)) {
        throw std::invalid_argument("dx must be positive");
    }
    if (!(s.part_thickness > 0.0) || !(s.tool_thickness >= 0.0)) {
        throw std::invalid_argument("invalid layer geometry");
    }
    auto intervals = [dx_target](double length) {
        const auto n = static_cast<std::size_t>(std::floor(length / dx_target + 1e-9));
        return std::max(n, kMinIntervalsPerLayer);
    };
    return build_mesh_intervals(s.part_thickness, intervals(s.part_thickness), s.tool_thickness,
                                s.has_tool() ? intervals(s.tool_thickness) : 0);
}

/// Default mesh: each layer split into 40 equal intervals.
inline Mesh build_default_mesh(const Scenario& s) {
    return build_mesh_intervals(s.part_thickness, kDefaultIntervalsPerLayer, s.tool_thickness,
                                s.has_tool() ? kDefaultIntervalsPerLayer : 0);
}

struct SolverSettings {
    double dx = 0.0;  // m; 0 selects 40 intervals per layer
    double dt = 1.0;  // s
    double output_interval = 1.0;  // s
    double initial_cure = kDefaultInitialCure;
    double max_cure_increment = 0.01;
    bool store_fields = true;  // keep the full nodal matrices
    double end_time = 0.0;     // s; 0 integrates the full cycle, otherwise stop early
};

struct SolverState {
    double time = 0.0;
    std::vector<double> temperature;  // K
    std::vector<double> cure;         // tool nodes stay at the initial value
};

/// Heat exchanged during one step, J/m^2 (positive into the stack).
struct StepFluxes {
    double boundary_heat = 0.0;
    double source_heat = 0.0;
};

namespace detail {

/// Per-node control-volume lengths split by layer, and per-segment conductances.
struct Discretization {
    std::vector<double> part_length;
    std::vector<double> tool_length;
    std::vector<double> capacity;     // J/(m^2 K)
    std::vector<double> conductance;  // W/(m^2 K), segment i joins nodes i and i+1

    Discretization(const Mesh& mesh, const Scenario& s) {
        const std::size_t n = mesh.size();
        part_length.assign(n, 0.0);
        tool_length.assign(n, 0.0);
        capacity.assign(n, 0.0);
        conductance.assign(n > 0 ? n - 1 : 0, 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double dz = mesh.positions[i + 1] - mesh.positions[i];
            if (!(dz > 0.0)) {
                throw std::invalid_argument("mesh positions must be strictly increasing");
            }
            const bool in_part = i < mesh.interface_index;
            const ThermalProps& props = in_part ? s.part.thermal : s.tool.thermal;
            conductance[i] = props.conductivity / dz;
            auto& half = in_part ? part_length : tool_length;
            half[i] += 0.5 * dz;
            half[i + 1] += 0.5 * dz;
        }
        for (std::size_t i = 0; i < n; ++i) {
            capacity[i] = s.part.thermal.volumetric_heat_capacity() * part_length[i];
            if (tool_length[i] > 0.0) {
                capacity[i] += s.tool.thermal.volumetric_heat_capacity() * tool_length[i];
            }
        }
    }
};

/// Advance one node's cure over dt at fixed temperature; returns the new degree of cure.
inline double advance_cure(double chi, double T, double dt, double max_increment,
                           const CureKinetics& kin) {
    double remaining = dt;
    while (remaining > 0.0 && chi < 1.0) {
        const double rate = combined_cure_rate(T, cure_state(chi, kin), kin);
        if (!(rate > 0.0)) {
            break;
        }
        const double h = std::min(remaining, max_increment / rate);
        chi += rate * h;
        remaining -= h;
        if (chi >= 1.0) {
            chi = 1.0;
        }
    }
    return chi;
}

inline void step_impl(SolverState& state, double dt, const Mesh& mesh, const Scenario& s,
                      const Discretization& disc, double max_cure_increment, StepFluxes* fluxes) {
    const std::size_t n = mesh.size();
    if (state.temperature.size() != n || state.cure.size() != n) {
        throw std::invalid_argument("solver state does not match mesh");
    }
    if (!(dt > 0.0)) {
        throw std::invalid_argument("dt must be positive");
    }

    // Cure sub-step at the step-start temperature; enthalpy enters as a source.
    std::vector<double> source(n, 0.0);  // W/m^2 per node
    double source_total = 0.0;
    if (!s.inert) {
        const CureKinetics& kin = *s.part.kinetics;
        for (std::size_t i = 0; i < n; ++i) {
            if (mesh.layer[i] != Layer::Part) {
                continue;
            }
            const double chi_old = state.cure[i];
            const double chi_new =
                advance_cure(chi_old, state.temperature[i], dt, max_cure_increment, kin);
            state.cure[i] = chi_new;
            source[i] = heat_generation((chi_new - chi_old) / dt, kin) * disc.part_length[i];
            source_total += source[i];
        }
    }

    const double t_new = state.time + dt;
    const double T_air = air_temperature(s.cycle, t_new);

    std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double c_dt = disc.capacity[i] / dt;
        diag[i] = c_dt;
        rhs[i] = c_dt * state.temperature[i] + source[i];
        if (i > 0) {
            lower[i] = -disc.conductance[i - 1];
            diag[i] += disc.conductance[i - 1];
        }
        if (i + 1 < n) {
            upper[i] = -disc.conductance[i];
            diag[i] += disc.conductance[i];
        }
    }
    diag[0] += s.h_top;
    rhs[0] += s.h_top * T_air;
    diag[n - 1] += s.h_bottom;
    rhs[n - 1] += s.h_bottom * T_air;

    std::vector<double> T_new;
    try {
        T_new = solve_tridiagonal(lower, diag, upper, rhs);
    } catch (const std::runtime_error& e) {
        throw SolverError(std::string("linear solve failed: ") + e.what(), t_new);
    }
    for (double T : T_new) {
        if (!std::isfinite(T) || !(T > 0.0)) {
            throw SolverError("non-finite or non-positive temperature", t_new);
        }
    }
    if (fluxes != nullptr) {
        fluxes->boundary_heat =
            dt * (s.h_top * (T_air - T_new.front()) + s.h_bottom * (T_air - T_new.back()));
        fluxes->source_heat = dt * source_total;
    }
    state.temperature = std::move(T_new);
    state.time = t_new;
}

}  // namespace detail

/// Uniform state at the cycle start temperature.
inline SolverState initial_state(const Mesh& mesh, const Scenario& s,
                                 double initial_cure = kDefaultInitialCure) {
    SolverState st;
    st.temperature.assign(mesh.size(), s.cycle.initial_temperature);
    st.cure.assign(mesh.size(), initial_cure);
    return st;
}

/// Stored enthalpy per unit area (J/m^2) relative to 0 K.
inline double enthalpy(const SolverState& state, const Mesh& mesh, const Scenario& s) {
    const detail::Discretization disc(mesh, s);
    double sum = 0.0;
    for (std::size_t i = 0; i < mesh.size(); ++i) {
        sum += disc.capacity[i] * state.temperature[i];
    }
    return sum;
}

/// One backward-Euler conduction step preceded by an explicit cure update.
inline SolverState step(SolverState state, double dt, const Mesh& mesh, const Scenario& s,
                        StepFluxes* fluxes = nullptr, double max_cure_increment = 0.01) {
    const detail::Discretization disc(mesh, s);
    detail::step_impl(state, dt, mesh, s, disc, max_cure_increment, fluxes);
    return state;
}

struct Kpis {
    double steady_state_lag = 0.0;  // K, air minus part centre over the late ramp
    bool steady_state_reached = false;
    double steady_state_slope = 0.0;  // K/s, drift of that lag over the averaging window
    double max_transient_lag = 0.0;   // K, air minus coldest part node during the ramp
    double exotherm = 0.0;            // K, hottest part node above air, floored at 0
};

struct EnergyLedger {
    double initial_enthalpy = 0.0;  // J/m^2
    double final_enthalpy = 0.0;
    double boundary_heat = 0.0;
    double source_heat = 0.0;

    double imbalance() const {
        return (final_enthalpy - initial_enthalpy) - (boundary_heat + source_heat);
    }
};

struct SimulationResult {
    Mesh mesh;
    std::vector<double> time;             // s
    std::vector<double> air_temperature;  // K
    std::vector<double> part_min;         // K, coldest part node per sample
    std::vector<double> part_max;         // K, hottest part node per sample
    std::vector<double> part_center;      // K, mid-thickness of the part
    std::vector<std::vector<double>> temperature;  // [sample][node], when stored
    std::vector<std::vector<double>> cure;         // [sample][node], when stored
    SolverState final_state;
    EnergyLedger energy;
    Kpis kpis;

    std::size_t sample_count() const { return time.size(); }
    double final_min_part_cure() const {
        double m = 1.0;
        for (std::size_t i = 0; i <= mesh.interface_index; ++i) {
            m = std::min(m, final_state.cure[i]);
        }
        return m;
    }
};

inline constexpr double kSteadyStateWindow = 0.1;      // fraction of ramp
inline constexpr double kSteadyStateMaxSlope = 1e-4;  // K/s
inline constexpr double kKpiNoiseFloor = 1e-9;        // K; round-off below this reads as 0

/// Lag and exotherm KPIs from the sampled part statistics of a run.
inline Kpis extract_kpis(const SimulationResult& r, const ThermalCycle& cycle) {
    const std::size_t m = r.time.size();
    if (m == 0 || r.air_temperature.size() != m || r.part_min.size() != m ||
        r.part_max.size() != m || r.part_center.size() != m) {
        throw std::invalid_argument("simulation result series are inconsistent");
    }
    const double t_ramp = cycle.ramp_end();
    if (r.time.back() < t_ramp * (1.0 - 1e-12)) {
        throw std::invalid_argument("simulation result does not cover the heating ramp");
    }
    if (std::abs(r.air_temperature.front() - air_temperature(cycle, r.time.front())) > 1e-6) {
        throw std::invalid_argument("simulation result does not belong to this cycle");
    }
    const double tol = 1e-9 * std::max(1.0, t_ramp);

    Kpis k;
    double sum = 0.0;
    std::size_t count = 0;
    std::size_t first = m, last = m;
    const double window_start = (1.0 - kSteadyStateWindow) * t_ramp;
    for (std::size_t i = 0; i < m; ++i) {
        const double t = r.time[i];
        if (t_ramp > 0.0 && t >= window_start - tol && t <= t_ramp + tol) {
            sum += r.air_temperature[i] - r.part_center[i];
            ++count;
            if (first == m) {
                first = i;
            }
            last = i;
        }
        if (t <= t_ramp + tol) {
            k.max_transient_lag = std::max(k.max_transient_lag, r.air_temperature[i] - r.part_min[i]);
        }
        if (t <= cycle.hold_end() + tol) {
            k.exotherm = std::max(k.exotherm, r.part_max[i] - r.air_temperature[i]);
        }
    }
    if (k.max_transient_lag < kKpiNoiseFloor) k.max_transient_lag = 0.0;
    if (k.exotherm < kKpiNoiseFloor) k.exotherm = 0.0;
    if (count > 0) {
        k.steady_state_lag = sum / static_cast<double>(count);
    }
    if (count >= 2 && r.time[last] > r.time[first]) {
        const double lag_first = r.air_temperature[first] - r.part_center[first];
        const double lag_last = r.air_temperature[last] - r.part_center[last];
        k.steady_state_slope = (lag_last - lag_first) / (r.time[last] - r.time[first]);
        k.steady_state_reached = std::abs(k.steady_state_slope) < kSteadyStateMaxSlope;
    }
    return k;
}

/// Full-cycle integration. Steps are clipped so ramp and hold ends fall on step
/// boundaries; samples are taken every `output_interval` and at those breakpoints.
inline SimulationResult simulate(const Scenario& s, const SolverSettings& settings = {}) {
    validate(s);
    if (!(settings.dt > 0.0) || !(settings.output_interval > 0.0) || settings.dx < 0.0) {
        throw std::invalid_argument("dt and output interval must be positive, dx non-negative");
    }
    if (settings.end_time > 0.0 && settings.end_time < s.cycle.ramp_end()) {
        throw std::invalid_argument("simulation must cover at least the heating ramp");
    }
    if (!(settings.initial_cure >= 0.0 && settings.initial_cure <= 1.0)) {
        throw std::invalid_argument("initial cure must lie in [0, 1]");
    }
    SimulationResult r;
    r.mesh = settings.dx > 0.0 ? build_mesh(s, settings.dx) : build_default_mesh(s);
    const Mesh& mesh = r.mesh;
    const detail::Discretization disc(mesh, s);
    SolverState state = initial_state(mesh, s, settings.initial_cure);

    const std::size_t n_part = mesh.part_node_count();
    const double z_center = 0.5 * s.part_thickness;
    std::size_t center_hi = 1;
    while (center_hi < n_part - 1 && mesh.positions[center_hi] < z_center) {
        ++center_hi;
    }
    const double z_lo = mesh.positions[center_hi - 1];
    const double z_hi = mesh.positions[center_hi];
    const double w_center = (z_center - z_lo) / (z_hi - z_lo);

    auto record = [&](const SolverState& st) {
        r.time.push_back(st.time);
        r.air_temperature.push_back(air_temperature(s.cycle, st.time));
        const auto part_T = std::span<const double>(st.temperature).first(n_part);
        r.part_min.push_back(*std::min_element(part_T.begin(), part_T.end()));
        r.part_max.push_back(*std::max_element(part_T.begin(), part_T.end()));
        r.part_center.push_back((1.0 - w_center) * st.temperature[center_hi - 1] +
                                w_center * st.temperature[center_hi]);
        if (settings.store_fields) {
            r.temperature.push_back(st.temperature);
            r.cure.push_back(st.cure);
        }
    };

    for (std::size_t i = 0; i < mesh.size(); ++i) {
        r.energy.initial_enthalpy += disc.capacity[i] * state.temperature[i];
    }

    const double t_end = settings.end_time > 0.0 ? std::min(settings.end_time, s.cycle.end_time())
                                                 : s.cycle.end_time();
    const double breakpoints[] = {std::min(s.cycle.ramp_end(), t_end),
                                  std::min(s.cycle.hold_end(), t_end), t_end};
    const double snap = 1e-9 * std::max(1.0, settings.dt);

    record(state);
    double next_output = settings.output_interval;
    std::size_t bp = 0;
    while (state.time < t_end - snap) {
        while (bp < 3 && breakpoints[bp] <= state.time + snap) {
            ++bp;
        }
        const double target = bp < 3 ? breakpoints[bp] : t_end;
        double h = settings.dt;
        bool at_breakpoint = false;
        if (state.time + h >= target - snap) {
            h = target - state.time;
            at_breakpoint = true;
        }
        StepFluxes fluxes;
        detail::step_impl(state, h, mesh, s, disc, settings.max_cure_increment, &fluxes);
        if (at_breakpoint) {
            state.time = target;
        }
        r.energy.boundary_heat += fluxes.boundary_heat;
        r.energy.source_heat += fluxes.source_heat;

        bool due = at_breakpoint;
        while (next_output <= state.time + snap) {
            due = true;
            next_output += settings.output_interval;
        }
        if (due) {
            record(state);
        }
    }

    for (std::size_t i = 0; i < mesh.size(); ++i) {
        r.energy.final_enthalpy += disc.capacity[i] * state.temperature[i];
    }
    r.final_state = std::move(state);
    r.kpis = extract_kpis(r, s.cycle);
    return r;
}

inline SimulationResult simulate(const Scenario& s, double dx, double dt) {
    SolverSettings settings;
    settings.dx = dx;
    settings.dt = dt;
    return simulate(s, settings);
}

/// Temperature/cure history as CSV with 9 significant digits. Requires stored fields.
inline void write_history_csv(std::ostream& out, const SimulationResult& r) {
    if (r.temperature.size() != r.time.size() || r.cure.size() != r.time.size()) {
        throw std::invalid_argument("result was simulated without stored fields");
    }
    const std::size_t n = r.mesh.size();
    out << "t,T_air";
    for (std::size_t i = 0; i < n; ++i) {
        out << ",T_node_" << i;
    }
    for (std::size_t i = 0; i < n; ++i) {
        out << ",chi_node_" << i;
    }
    out << '\n';
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.9g", v);
        out << buf;
    };
    for (std::size_t k = 0; k < r.time.size(); ++k) {
        put(r.time[k]);
        out << ',';
        put(r.air_temperature[k]);
        for (double T : r.temperature[k]) {
            out << ',';
            put(T);
        }
        for (double c : r.cure[k]) {
            out << ',';
            put(c);
        }
        out << '\n';
    }
}

}  // namespace tgml
