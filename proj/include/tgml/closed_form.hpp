#pragma once

/**
 * @file closed_form.hpp
 * @brief Approximate thermal-lag solutions and physics-based feature transforms.
 *
 * Heating rates are in K/s except for heating_rate_transform, which takes
 * C/min because its constants were fitted in those units.
 */

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tgml/materials.hpp"
#include "tgml/solver.hpp"

namespace tgml::closed_form {

/// Quasi-steady lag at the centre of a slab of thickness L heated on both
/// faces with coefficient h while the air ramps at `heating_rate`:
/// T' (rho c_p L / (2 h) + L^2 / (8 a)).
inline double steady_state_lag(double L, double h, double heating_rate, const ThermalProps& props) {
    if (!(L > 0.0) || !(h > 0.0) || !(heating_rate >= 0.0)) {
        throw std::invalid_argument("steady_state_lag: L, h must be positive and T' non-negative");
    }
    validate(props);
    return heating_rate * (props.volumetric_heat_capacity() * L / (2.0 * h) +
                           L * L / (8.0 * props.diffusivity()));
}

/// Lag at the end of a ramp of amplitude (T_hold - T0) for a lumped mass whose
/// quasi-steady lag is `steady_lag`: dT_ss (1 - exp(-(T_hold - T0) / dT_ss)).
inline double lumped_transient_lag(double steady_lag, double hold_temperature,
                                   double initial_temperature) {
    const double amplitude = hold_temperature - initial_temperature;
    if (!(steady_lag >= 0.0) || !(amplitude > 0.0)) {
        throw std::invalid_argument("lumped_transient_lag: need dT_ss >= 0 and T_hold > T0");
    }
    if (steady_lag == 0.0) {
        return 0.0;
    }
    return -steady_lag * std::expm1(-amplitude / steady_lag);
}

struct NondimensionalFeatures {
    double rate_length_per_h = 0.0;  // T' L / h, proportional to 1/(Bi Fo)
    double rate_length_sq = 0.0;     // T' L^2, proportional to 1/Fo
};

inline NondimensionalFeatures nondimensional_features(double L, double h, double heating_rate) {
    if (!(L > 0.0) || !(h > 0.0) || !(heating_rate >= 0.0)) {
        throw std::invalid_argument("nondimensional_features: L, h must be positive and T' non-negative");
    }
    return {heating_rate * L / h, heating_rate * L * L};
}

/// Shifted sigmoid 1/(1 + exp(-T')) - 0.6 of a heating rate in C/min.
inline double heating_rate_transform(double heating_rate_c_per_min) {
    return 1.0 / (1.0 + std::exp(-heating_rate_c_per_min)) - 0.6;
}

/**
 * @brief Quasi-steady lag of the coldest part point for a part on a lumped tool.
 *
 * The tool is taken as isothermal (it is metallic) and the part conducts with
 * its own diffusivity. Balancing ramp heating of both layers against the two
 * convective faces gives the tool lag
 *
 *   lag_tool (1 + h2/h1 + h2 L1/k1) = T' ((M1 + M2)/h1 + M2 L1/k1 + L1^2/(2 a1)),
 *
 * with M = rho c_p L per layer; the quadratic through-part profile then gives
 * the coldest point. Without a tool (M2 = 0) and with h1 = h2 this reduces to
 * steady_state_lag. Reaction heat is ignored.
 */
inline double stack_steady_state_lag(const Scenario& s) {
    const double rate = s.cycle.heating_rate;
    const ThermalProps& p = s.part.thermal;
    const double rho_c1 = p.volumetric_heat_capacity();
    const double L1 = s.part_thickness;
    const double k1 = p.conductivity;
    const double M1 = rho_c1 * L1;
    const double M2 = s.has_tool() ? s.tool.thermal.volumetric_heat_capacity() * s.tool_thickness : 0.0;
    const double h1 = s.h_top;
    const double h2 = s.h_bottom;
    if (!(rate > 0.0)) {
        return 0.0;
    }

    const double tool_lag = rate * ((M1 + M2) / h1 + M2 * L1 / k1 + L1 * L1 * rho_c1 / (2.0 * k1)) /
                            (1.0 + h2 / h1 + h2 * L1 / k1);
    const double top_flux = rate * (M1 + M2) - h2 * tool_lag;  // into the exposed part face
    const double z_min = std::clamp(top_flux / (rho_c1 * rate), 0.0, L1);
    return top_flux / h1 + (top_flux * z_min - 0.5 * rho_c1 * rate * z_min * z_min) / k1;
}

/// Maximum ramp lag estimate for a curing part on a tool: the lumped
/// transient response driven by the stack's quasi-steady lag.
inline double approximate_case2_lag(const Scenario& s) {
    validate(s);
    const double steady = stack_steady_state_lag(s);
    if (s.cycle.hold_temperature <= s.cycle.initial_temperature) {
        return 0.0;
    }
    return lumped_transient_lag(steady, s.cycle.hold_temperature, s.cycle.initial_temperature);
}

}  // namespace tgml::closed_form
