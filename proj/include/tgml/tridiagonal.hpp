#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace tgml {

/**
 * @brief Thomas algorithm for a tridiagonal system.
 *
 * Row i reads lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i];
 * lower[0] and upper[n-1] are ignored. No pivoting, so the matrix should be
 * diagonally dominant (always true for the conduction operator).
 *
 * @throws std::runtime_error on a zero or non-finite pivot.
 */
inline std::vector<double> solve_tridiagonal(std::span<const double> lower,
                                             std::span<const double> diag,
                                             std::span<const double> upper,
                                             std::span<const double> rhs) {
    const std::size_t n = diag.size();
    if (lower.size() != n || upper.size() != n || rhs.size() != n) {
        throw std::invalid_argument("tridiagonal bands must have equal length");
    }
    std::vector<double> x(n);
    if (n == 0) {
        return x;
    }
    std::vector<double> c_star(n);

    double pivot = diag[0];
    if (pivot == 0.0 || !std::isfinite(pivot)) {
        throw std::runtime_error("singular tridiagonal system");
    }
    c_star[0] = upper[0] / pivot;
    x[0] = rhs[0] / pivot;
    for (std::size_t i = 1; i < n; ++i) {
        pivot = diag[i] - lower[i] * c_star[i - 1];
        if (pivot == 0.0 || !std::isfinite(pivot)) {
            throw std::runtime_error("singular tridiagonal system");
        }
        c_star[i] = upper[i] / pivot;
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] -= c_star[i] * x[i + 1];
    }
    return x;
}

}  // namespace tgml
