#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "tgml/error.hpp"
#include "tgml/nn/network.hpp"
#include "tgml/nn/optimizer.hpp"

namespace tgml::nn {

/// How per-sample losses of a mini-batch are combined before the update.
/// Sum matches estimator-style regression heads; Mean divides by the batch size.
enum class LossReduction { Sum, Mean };

struct TrainingConfig {
    OptimizerConfig optimizer;
    std::size_t iterations = 50000;  // mini-batch steps, not epochs
    std::size_t batch_size = 50;
    Initializer initializer = Initializer::Xavier;
    Loss loss = Loss::MSE;
    LossReduction reduction = LossReduction::Sum;
    std::uint64_t seed = 42;
    std::size_t history_interval = 1000;
};

inline void validate(const TrainingConfig& c) {
    validate(c.optimizer);
    if (c.batch_size == 0) {
        throw std::invalid_argument("batch size must be at least 1");
    }
    if (c.history_interval == 0) {
        throw std::invalid_argument("history interval must be at least 1");
    }
}

struct HistoryPoint {
    std::size_t iteration = 0;
    double train_rmse = 0.0;  // target units when the model carries output normalization
    double val_rmse = 0.0;
};

struct TrainResult {
    NetworkModel model;
    std::vector<HistoryPoint> history;
};

/// Network with freshly initialized parameters.
inline NetworkModel make_network(std::vector<std::size_t> sizes, Activation act, Initializer init,
                                 std::uint64_t seed) {
    NetworkModel net(std::move(sizes), act);
    net.params = initialize(net.layer_sizes, init, seed);
    return net;
}

/// RMSE of normalized predictions against normalized targets, in target units
/// when the model has output normalization.
inline double rmse(const NetworkModel& net, const Samples& data) {
    if (data.size() == 0) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    double sq = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = forward(net, data.row(i))[0] - data.y[i];
        sq += r * r;
    }
    const double scale = net.output_norm.size() == 1 ? net.output_norm.half_range(0) : 1.0;
    return std::sqrt(sq / static_cast<double>(data.size())) * scale;
}

/// Mini-batch training on normalized data. Batches are drawn from a fresh
/// seeded permutation each epoch; a trailing partial batch is skipped.
/// Deterministic for a fixed seed. Zero iterations returns the input model.
inline TrainResult train(NetworkModel net, const Samples& train_set, const Samples& val_set,
                         const TrainingConfig& config) {
    validate(config);
    if (train_set.size() == 0) {
        throw std::invalid_argument("train: empty training set");
    }
    if (train_set.cols != net.input_size() || (val_set.size() > 0 && val_set.cols != net.input_size())) {
        throw std::invalid_argument("train: feature count does not match network input");
    }
    TrainResult result;
    const std::size_t n = train_set.size();
    const std::size_t batch = std::min(config.batch_size, n);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed),
                      static_cast<std::uint32_t>(config.seed >> 32), 0x5eedu};
    std::mt19937_64 rng(seq);
    std::size_t cursor = n;  // forces a shuffle on the first step

    OptimizerState state = OptimizerState::for_parameters(net.params.size(), config.optimizer.kind);
    detail::Backprop bp(net);
    std::vector<double> grad(net.params.size());
    const double scale = config.reduction == LossReduction::Sum ? 1.0 : 1.0 / static_cast<double>(batch);

    for (std::size_t it = 1; it <= config.iterations; ++it) {
        if (cursor + batch > n) {
            std::shuffle(order.begin(), order.end(), rng);
            cursor = 0;
        }
        std::fill(grad.begin(), grad.end(), 0.0);
        double loss = 0.0;
        for (std::size_t b = 0; b < batch; ++b) {
            const std::size_t idx = order[cursor + b];
            loss += bp.accumulate(net, train_set.row(idx), train_set.y[idx], config.loss, scale, grad);
        }
        cursor += batch;
        if (!std::isfinite(loss)) {
            throw DivergenceError("training diverged at iteration " + std::to_string(it));
        }
        optimizer_step(net.params, grad, state, config.optimizer);

        if (it % config.history_interval == 0 || it == config.iterations) {
            result.history.push_back({it, rmse(net, train_set), rmse(net, val_set)});
        }
    }
    result.model = std::move(net);
    return result;
}

}  // namespace tgml::nn
