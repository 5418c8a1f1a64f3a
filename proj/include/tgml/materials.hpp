#pragma once

/**
 * @file materials.hpp
 * @brief Thermal constants and thermoset cure kinetics.
 *
 * Cure rate is a harmonic combination of an Arrhenius kinetic term and a
 * free-volume diffusion term; the diffusion term is driven by the glass
 * transition temperature, which develops with cure (DiBenedetto).
 * All functions are pure and thread-safe.
 */

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "tgml/error.hpp"

namespace tgml {

/// Universal gas constant, J/(mol K).
inline constexpr double kGasConstant = 8.314;

/// Diffusion-law denominators at or below this value mean the resin is vitrified.
inline constexpr double kDenominatorFloor = 1e-6;

/// Default initial degree of cure; exactly zero would stall the autocatalytic term.
inline constexpr double kDefaultInitialCure = 1e-3;

struct ThermalProps {
    double density = 0.0;        // kg/m^3
    double specific_heat = 0.0;  // J/(kg K)
    double conductivity = 0.0;   // W/(m K)

    double volumetric_heat_capacity() const { return density * specific_heat; }
    double diffusivity() const { return conductivity / (density * specific_heat); }
};

inline void validate(const ThermalProps& p) {
    if (!(p.density > 0.0) || !(p.specific_heat > 0.0) || !(p.conductivity > 0.0)) {
        throw std::invalid_argument("thermal properties must be strictly positive");
    }
}

struct CureKinetics {
    double pre_exponential = 0.0;        // A, 1/s
    double activation_energy = 0.0;      // dE, J/mol
    double exponent_m = 0.0;
    double exponent_n = 0.0;
    double diffusion_coefficient = 0.0;  // k_d, 1/s
    double diffusion_B = 0.0;
    double diffusion_a_f = 0.0;          // 1/K
    double diffusion_b_f = 0.0;
    double total_heat_of_reaction = 0.0; // H_R, J/kg
    double resin_density = 0.0;          // kg/m^3
    double fiber_volume_fraction = 0.0;
    double tg_uncured = 0.0;             // K
    double tg_cured = 0.0;               // K
    double tg_lambda = 1.0;
};

inline void validate(const CureKinetics& k) {
    if (!(k.pre_exponential > 0.0) || !(k.activation_energy > 0.0) ||
        !(k.diffusion_coefficient > 0.0) || !(k.total_heat_of_reaction > 0.0) ||
        !(k.resin_density > 0.0)) {
        throw std::invalid_argument("A, activation energy, k_d, H_R and resin density must be positive");
    }
    if (!(k.fiber_volume_fraction >= 0.0 && k.fiber_volume_fraction < 1.0)) {
        throw std::invalid_argument("fiber volume fraction must lie in [0, 1)");
    }
    if (!(k.exponent_m >= 0.0) || !(k.exponent_n >= 0.0)) {
        throw std::invalid_argument("reaction exponents must be non-negative");
    }
    if (!(k.tg_cured > k.tg_uncured)) {
        throw std::invalid_argument("tg_cured must exceed tg_uncured");
    }
    if (!(k.tg_lambda > 0.0 && k.tg_lambda <= 1.0)) {
        throw std::invalid_argument("tg_lambda must lie in (0, 1]");
    }
}

struct CureState {
    double degree_of_cure = kDefaultInitialCure;
    double glass_transition = 0.0;  // K
};

/// A named material. Tooling materials carry no kinetics.
struct Material {
    std::string name;
    ThermalProps thermal;
    std::optional<CureKinetics> kinetics;
};

namespace detail {
inline void check_cure(double chi) {
    if (!(chi >= 0.0 && chi <= 1.0)) {
        throw DomainError("degree of cure must lie in [0, 1]");
    }
}
inline void check_temperature(double T) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw DomainError("absolute temperature must be positive and finite");
    }
}
}  // namespace detail

/// Arrhenius autocatalytic rate A exp(-dE/RT) chi^m (1-chi)^n.
inline double kinetic_cure_rate(double T, double chi, const CureKinetics& kin) {
    detail::check_temperature(T);
    detail::check_cure(chi);
    return kin.pre_exponential * std::exp(-kin.activation_energy / (kGasConstant * T)) *
           std::pow(chi, kin.exponent_m) * std::pow(1.0 - chi, kin.exponent_n);
}

/// a_f (T - Tg) + b_f, the free-volume denominator of the diffusion law.
inline double diffusion_denominator(double T, double Tg, const CureKinetics& kin) {
    return kin.diffusion_a_f * (T - Tg) + kin.diffusion_b_f;
}

/// Diffusion-controlled rate k_d exp(-B / (a_f (T - Tg) + b_f)).
/// Throws SingularityError when the denominator is at or below kDenominatorFloor;
/// the coupled model treats that regime as vitrified (see combined_cure_rate).
inline double diffusion_cure_rate(double T, double Tg, const CureKinetics& kin) {
    detail::check_temperature(T);
    const double denom = diffusion_denominator(T, Tg, kin);
    if (!(denom > kDenominatorFloor)) {
        throw SingularityError("diffusion denominator below floor (vitrified resin)");
    }
    return kin.diffusion_coefficient * std::exp(-kin.diffusion_B / denom);
}

/// Harmonic combination of two rates; zero when either mechanism is stalled.
inline double harmonic_rate(double kinetic, double diffusion) {
    if (kinetic <= 0.0 || diffusion <= 0.0) {
        return 0.0;
    }
    return 1.0 / (1.0 / kinetic + 1.0 / diffusion);
}

inline double combined_cure_rate(double T, const CureState& state, const CureKinetics& kin) {
    const double r_kin = kinetic_cure_rate(T, state.degree_of_cure, kin);
    if (!(diffusion_denominator(T, state.glass_transition, kin) > kDenominatorFloor)) {
        return 0.0;
    }
    return harmonic_rate(r_kin, diffusion_cure_rate(T, state.glass_transition, kin));
}

/// DiBenedetto: Tg = Tg0 + (Tg_inf - Tg0) lambda chi / (1 - (1 - lambda) chi).
inline double glass_transition(double chi, const CureKinetics& kin) {
    detail::check_cure(chi);
    const double lambda = kin.tg_lambda;
    return kin.tg_uncured +
           (kin.tg_cured - kin.tg_uncured) * lambda * chi / (1.0 - (1.0 - lambda) * chi);
}

inline CureState cure_state(double chi, const CureKinetics& kin) {
    return CureState{chi, glass_transition(chi, kin)};
}

/// Volumetric heat release (W/m^3) of the composite for a given cure rate.
inline double heat_generation(double cure_rate, const CureKinetics& kin) {
    return cure_rate * (1.0 - kin.fiber_volume_fraction) * kin.resin_density *
           kin.total_heat_of_reaction;
}

/// Enthalpy released per unit composite volume for a full cure, J/m^3.
inline double heat_of_reaction_per_volume(const CureKinetics& kin) {
    return heat_generation(1.0, kin);
}

}  // namespace tgml
