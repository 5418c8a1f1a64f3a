#pragma once

/**
 * @file optimizer.hpp
 * @brief First-order optimizers over a flat parameter vector.
 *
 * Proximal variants take a plain gradient (or Adagrad) step and then apply
 * the regularizer's proximal operator with the same per-parameter step size:
 * soft-thresholding for LASSO, multiplicative shrink for ridge.
 */

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tgml::nn {

enum class OptimizerKind { GD, Adagrad, ProximalAdagrad, Adam };
enum class Regularization { None, Lasso, Ridge };

inline OptimizerKind parse_optimizer(std::string_view s) {
    if (s == "gd") return OptimizerKind::GD;
    if (s == "adagrad") return OptimizerKind::Adagrad;
    if (s == "proximal_adagrad" || s == "pag") return OptimizerKind::ProximalAdagrad;
    if (s == "adam") return OptimizerKind::Adam;
    throw std::invalid_argument("unknown optimizer '" + std::string(s) + "'");
}

inline std::string to_string(OptimizerKind k) {
    switch (k) {
        case OptimizerKind::GD: return "gd";
        case OptimizerKind::Adagrad: return "adagrad";
        case OptimizerKind::ProximalAdagrad: return "proximal_adagrad";
        case OptimizerKind::Adam: return "adam";
    }
    return "?";
}

inline Regularization parse_regularization(std::string_view s) {
    if (s == "none") return Regularization::None;
    if (s == "lasso" || s == "l1") return Regularization::Lasso;
    if (s == "ridge" || s == "l2") return Regularization::Ridge;
    throw std::invalid_argument("unknown regularization '" + std::string(s) + "'");
}

inline std::string to_string(Regularization r) {
    switch (r) {
        case Regularization::None: return "none";
        case Regularization::Lasso: return "lasso";
        case Regularization::Ridge: return "ridge";
    }
    return "?";
}

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::GD;
    double learning_rate = 1e-3;
    Regularization regularization = Regularization::None;
    double regularization_strength = 0.0;
};

inline constexpr double kAdagradEpsilon = 1e-8;
inline constexpr double kAdagradInitialAccumulator = 0.1;
inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

inline void validate(const OptimizerConfig& c) {
    if (!(c.learning_rate > 0.0)) {
        throw std::invalid_argument("learning rate must be positive");
    }
    if (!(c.regularization_strength >= 0.0)) {
        throw std::invalid_argument("regularization strength must be non-negative");
    }
    if (c.regularization != Regularization::None &&
        (c.kind == OptimizerKind::Adagrad || c.kind == OptimizerKind::Adam)) {
        throw std::invalid_argument(to_string(c.kind) +
                                    " has no proximal step; use gd or proximal_adagrad for " +
                                    to_string(c.regularization));
    }
}

struct OptimizerState {
    std::vector<double> accumulator;  // Adagrad sum of squared gradients
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::size_t steps = 0;

    static OptimizerState for_parameters(std::size_t n, OptimizerKind kind) {
        OptimizerState s;
        if (kind == OptimizerKind::Adagrad || kind == OptimizerKind::ProximalAdagrad) {
            s.accumulator.assign(n, kAdagradInitialAccumulator);
        } else if (kind == OptimizerKind::Adam) {
            s.first_moment.assign(n, 0.0);
            s.second_moment.assign(n, 0.0);
        }
        return s;
    }
};

namespace detail {

inline double proximal(double p, double step, Regularization reg, double strength) {
    switch (reg) {
        case Regularization::None: return p;
        case Regularization::Lasso: {
            const double threshold = strength * step;
            if (p > threshold) return p - threshold;
            if (p < -threshold) return p + threshold;
            return 0.0;
        }
        case Regularization::Ridge: return p / (1.0 + strength * step);
    }
    return p;
}

}  // namespace detail

inline void optimizer_step(std::span<double> params, std::span<const double> grads,
                           OptimizerState& state, const OptimizerConfig& config) {
    const std::size_t n = params.size();
    if (grads.size() != n) {
        throw std::invalid_argument("optimizer_step: gradient size mismatch");
    }
    const double lr = config.learning_rate;
    ++state.steps;
    switch (config.kind) {
        case OptimizerKind::GD:
            for (std::size_t i = 0; i < n; ++i) {
                params[i] = detail::proximal(params[i] - lr * grads[i], lr, config.regularization,
                                             config.regularization_strength);
            }
            break;
        case OptimizerKind::Adagrad:
        case OptimizerKind::ProximalAdagrad: {
            if (state.accumulator.size() != n) {
                throw std::invalid_argument("optimizer_step: state does not match parameters");
            }
            for (std::size_t i = 0; i < n; ++i) {
                state.accumulator[i] += grads[i] * grads[i];
                const double step = lr / std::sqrt(state.accumulator[i] + kAdagradEpsilon);
                params[i] = detail::proximal(params[i] - step * grads[i], step,
                                             config.regularization, config.regularization_strength);
            }
            break;
        }
        case OptimizerKind::Adam: {
            if (state.first_moment.size() != n || state.second_moment.size() != n) {
                throw std::invalid_argument("optimizer_step: state does not match parameters");
            }
            const double t = static_cast<double>(state.steps);
            const double c1 = 1.0 - std::pow(kAdamBeta1, t);
            const double c2 = 1.0 - std::pow(kAdamBeta2, t);
            for (std::size_t i = 0; i < n; ++i) {
                double& m = state.first_moment[i];
                double& v = state.second_moment[i];
                m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grads[i];
                v = kAdamBeta2 * v + (1.0 - kAdamBeta2) * grads[i] * grads[i];
                params[i] -= lr * (m / c1) / (std::sqrt(v / c2) + kAdamEpsilon);
            }
            break;
        }
    }
}

}  // namespace tgml::nn
