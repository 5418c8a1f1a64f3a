#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

#include "tgml/error.hpp"

namespace tgml::nn {

/// Regression error summary in target units.
struct EvalReport {
    double rmse = 0.0;
    double nrmse = 0.0;      // rmse / (t_max - t_min) of the evaluated targets
    double max_error = 0.0;  // max |target - prediction|
    std::size_t n = 0;
    double t_min = 0.0;
    double t_max = 0.0;
};

inline EvalReport metrics(std::span<const double> targets, std::span<const double> predictions) {
    if (targets.size() != predictions.size()) {
        throw std::invalid_argument("metrics: target/prediction length mismatch");
    }
    if (targets.empty()) {
        throw std::invalid_argument("metrics: empty set");
    }
    EvalReport r;
    r.n = targets.size();
    const auto [lo, hi] = std::minmax_element(targets.begin(), targets.end());
    r.t_min = *lo;
    r.t_max = *hi;
    if (!(r.t_max > r.t_min)) {
        throw DomainError("metrics: NRMSE undefined for a zero target range");
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < r.n; ++i) {
        const double e = targets[i] - predictions[i];
        sq += e * e;
        r.max_error = std::max(r.max_error, std::abs(e));
    }
    r.rmse = std::sqrt(sq / static_cast<double>(r.n));
    r.nrmse = r.rmse / (r.t_max - r.t_min);
    return r;
}

}  // namespace tgml::nn
