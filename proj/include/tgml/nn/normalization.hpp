#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace tgml::nn {

/// Per-feature range used to map raw values onto [-1, 1].
class NormStats {
public:
    NormStats() = default;

    NormStats(std::vector<double> x_min, std::vector<double> x_max)
        : x_min_(std::move(x_min)), x_max_(std::move(x_max)) {
        if (x_min_.size() != x_max_.size() || x_min_.empty()) {
            throw std::invalid_argument("NormStats: min/max size mismatch");
        }
        for (std::size_t i = 0; i < x_min_.size(); ++i) {
            if (!(x_max_[i] > x_min_[i])) {
                throw std::invalid_argument("NormStats: degenerate feature " + std::to_string(i) +
                                            " (x_max must exceed x_min)");
            }
        }
    }

    /// Column-wise range of a row-major matrix with `cols` columns.
    static NormStats from_rows(std::span<const double> data, std::size_t cols) {
        if (cols == 0 || data.empty() || data.size() % cols != 0) {
            throw std::invalid_argument("NormStats: empty or ragged data");
        }
        std::vector<double> lo(data.begin(), data.begin() + static_cast<std::ptrdiff_t>(cols));
        std::vector<double> hi = lo;
        for (std::size_t k = cols; k < data.size(); ++k) {
            const std::size_t c = k % cols;
            lo[c] = std::min(lo[c], data[k]);
            hi[c] = std::max(hi[c], data[k]);
        }
        return NormStats(std::move(lo), std::move(hi));
    }

    std::size_t size() const { return x_min_.size(); }
    bool empty() const { return x_min_.empty(); }
    const std::vector<double>& x_min() const { return x_min_; }
    const std::vector<double>& x_max() const { return x_max_; }

    double normalize(double x, std::size_t i) const {
        return 2.0 * (x - x_min_[i]) / (x_max_[i] - x_min_[i]) - 1.0;
    }
    double denormalize(double x, std::size_t i) const {
        return x_min_[i] + 0.5 * (x + 1.0) * (x_max_[i] - x_min_[i]);
    }
    /// Scale factor from normalized to raw units, (x_max - x_min) / 2.
    double half_range(std::size_t i) const { return 0.5 * (x_max_[i] - x_min_[i]); }

    bool operator==(const NormStats&) const = default;

private:
    std::vector<double> x_min_;
    std::vector<double> x_max_;
};

inline std::vector<double> normalize(std::span<const double> x, const NormStats& stats) {
    if (x.size() != stats.size()) {
        throw std::invalid_argument("normalize: feature count mismatch");
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = stats.normalize(x[i], i);
    }
    return out;
}

inline std::vector<double> denormalize(std::span<const double> x, const NormStats& stats) {
    if (x.size() != stats.size()) {
        throw std::invalid_argument("denormalize: feature count mismatch");
    }
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = stats.denormalize(x[i], i);
    }
    return out;
}

}  // namespace tgml::nn
