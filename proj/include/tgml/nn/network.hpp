#pragma once

/**
 * @file network.hpp
 * @brief Dense feed-forward regression network with hand-written backprop.
 *
 * Hidden layers share one activation; the output layer is linear. All
 * parameters live in one flat vector laid out as [W0, b0, W1, b1, ...] with
 * each W_l stored row-major as (fan_out x fan_in). Gradients and optimizer
 * state use the same layout.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tgml/nn/activation.hpp"
#include "tgml/nn/normalization.hpp"

namespace tgml::nn {

struct NetworkModel {
    std::vector<std::size_t> layer_sizes;  // input, hidden..., output
    Activation activation = Activation::Tanh;
    std::vector<double> params;
    NormStats input_norm;
    NormStats output_norm;
    std::vector<std::string> feature_recipe;

    NetworkModel() = default;
    NetworkModel(std::vector<std::size_t> sizes, Activation act)
        : layer_sizes(std::move(sizes)), activation(act) {
        if (layer_sizes.size() < 2) {
            throw std::invalid_argument("network needs at least input and output layers");
        }
        for (std::size_t s : layer_sizes) {
            if (s == 0) {
                throw std::invalid_argument("layer sizes must be positive");
            }
        }
        params.assign(parameter_count(layer_sizes), 0.0);
    }

    static std::size_t parameter_count(std::span<const std::size_t> sizes) {
        std::size_t n = 0;
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
            n += sizes[l + 1] * (sizes[l] + 1);
        }
        return n;
    }

    std::size_t layer_count() const { return layer_sizes.size() - 1; }
    std::size_t input_size() const { return layer_sizes.front(); }
    std::size_t output_size() const { return layer_sizes.back(); }
    std::size_t fan_in(std::size_t l) const { return layer_sizes[l]; }
    std::size_t fan_out(std::size_t l) const { return layer_sizes[l + 1]; }

    std::size_t weight_offset(std::size_t l) const {
        std::size_t off = 0;
        for (std::size_t k = 0; k < l; ++k) {
            off += layer_sizes[k + 1] * (layer_sizes[k] + 1);
        }
        return off;
    }
    std::size_t bias_offset(std::size_t l) const {
        return weight_offset(l) + fan_out(l) * fan_in(l);
    }

    double& weight(std::size_t l, std::size_t out, std::size_t in) {
        return params[weight_offset(l) + out * fan_in(l) + in];
    }
    double weight(std::size_t l, std::size_t out, std::size_t in) const {
        return params[weight_offset(l) + out * fan_in(l) + in];
    }
    double& bias(std::size_t l, std::size_t out) { return params[bias_offset(l) + out]; }
    double bias(std::size_t l, std::size_t out) const { return params[bias_offset(l) + out]; }

    bool has_normalization() const {
        return input_norm.size() == input_size() && output_norm.size() == output_size();
    }
};

/// Parse an architecture string "LxN": L hidden layers of N nodes.
inline std::vector<std::size_t> parse_architecture(std::string_view arch, std::size_t inputs,
                                                   std::size_t outputs = 1) {
    const auto x = arch.find('x');
    if (x == std::string_view::npos || x == 0 || x + 1 == arch.size()) {
        throw std::invalid_argument("architecture must look like LxN, e.g. 3x5");
    }
    std::size_t layers = 0, nodes = 0;
    try {
        std::size_t used = 0;
        layers = std::stoul(std::string(arch.substr(0, x)), &used);
        if (used != x) throw std::invalid_argument("");
        const std::string tail(arch.substr(x + 1));
        nodes = std::stoul(tail, &used);
        if (used != tail.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw std::invalid_argument("architecture must look like LxN, e.g. 3x5");
    }
    if (layers == 0 || nodes == 0) {
        throw std::invalid_argument("architecture needs at least one hidden layer and node");
    }
    std::vector<std::size_t> sizes{inputs};
    sizes.insert(sizes.end(), layers, nodes);
    sizes.push_back(outputs);
    return sizes;
}

enum class Initializer { RandomNormal, He, Xavier, Pretrained };

inline Initializer parse_initializer(std::string_view s) {
    if (s == "random_normal") return Initializer::RandomNormal;
    if (s == "he") return Initializer::He;
    if (s == "xavier") return Initializer::Xavier;
    if (s == "pretrained") return Initializer::Pretrained;
    throw std::invalid_argument("unknown initializer '" + std::string(s) + "'");
}

/// Fresh parameters for `sizes`; biases are zero. Pretrained weights come
/// from an existing model, not from here.
inline std::vector<double> initialize(std::span<const std::size_t> sizes, Initializer tag,
                                      std::uint64_t seed) {
    if (tag == Initializer::Pretrained) {
        throw std::invalid_argument("pretrained initialization needs a source model");
    }
    if (sizes.size() < 2) {
        throw std::invalid_argument("network needs at least input and output layers");
    }
    std::vector<double> params(NetworkModel::parameter_count(sizes), 0.0);
    std::mt19937_64 rng(seed);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const std::size_t fi = sizes[l];
        const std::size_t fo = sizes[l + 1];
        const std::size_t nw = fi * fo;
        switch (tag) {
            case Initializer::Xavier: {
                const double limit = std::sqrt(6.0 / static_cast<double>(fi + fo));
                std::uniform_real_distribution<double> dist(-limit, limit);
                for (std::size_t k = 0; k < nw; ++k) params[off + k] = dist(rng);
                break;
            }
            case Initializer::He: {
                std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / static_cast<double>(fi)));
                for (std::size_t k = 0; k < nw; ++k) params[off + k] = dist(rng);
                break;
            }
            case Initializer::RandomNormal: {
                std::normal_distribution<double> dist(0.0, 0.1);
                for (std::size_t k = 0; k < nw; ++k) params[off + k] = dist(rng);
                break;
            }
            case Initializer::Pretrained: break;
        }
        off += nw + fo;
    }
    return params;
}

/// Pre-activations (z) and activations (a) of every layer for one input.
/// a[0] is the input; z[l] and a[l + 1] belong to layer l.
struct ForwardCache {
    std::vector<std::vector<double>> z;
    std::vector<std::vector<double>> a;
};

inline std::vector<double> forward(const NetworkModel& net, std::span<const double> x,
                                   ForwardCache* cache = nullptr) {
    if (x.size() != net.input_size()) {
        throw std::invalid_argument("forward: input has " + std::to_string(x.size()) +
                                    " features, network expects " +
                                    std::to_string(net.input_size()));
    }
    std::vector<double> current(x.begin(), x.end());
    if (cache != nullptr) {
        cache->z.clear();
        cache->a.assign(1, current);
    }
    const std::size_t L = net.layer_count();
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t fi = net.fan_in(l), fo = net.fan_out(l);
        const double* W = net.params.data() + net.weight_offset(l);
        const double* b = net.params.data() + net.bias_offset(l);
        std::vector<double> z(fo);
        for (std::size_t o = 0; o < fo; ++o) {
            double s = b[o];
            const double* row = W + o * fi;
            for (std::size_t i = 0; i < fi; ++i) s += row[i] * current[i];
            z[o] = s;
        }
        std::vector<double> a = z;
        if (l + 1 < L) {
            for (double& v : a) v = activation(v, net.activation);
        }
        if (cache != nullptr) {
            cache->z.push_back(z);
            cache->a.push_back(a);
        }
        current = std::move(a);
    }
    return current;
}

/// Raw-unit prediction: normalizes inputs and denormalizes the output.
inline std::vector<double> predict(const NetworkModel& net, std::span<const double> raw_x) {
    if (!net.has_normalization()) {
        throw std::invalid_argument("predict: model has no normalization statistics");
    }
    const auto y = forward(net, normalize(raw_x, net.input_norm));
    return denormalize(y, net.output_norm);
}

/// Row-major feature matrix with a scalar target per row.
struct Samples {
    std::size_t cols = 0;
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return y.size(); }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(x).subspan(i * cols, cols);
    }
};

enum class Loss { MSE, MAE };

inline Loss parse_loss(std::string_view s) {
    if (s == "mse") return Loss::MSE;
    if (s == "mae") return Loss::MAE;
    throw std::invalid_argument("unknown loss '" + std::string(s) + "'");
}

struct LossGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

namespace detail {

/// Preallocated buffers for repeated batch backprop on one network shape.
class Backprop {
public:
    explicit Backprop(const NetworkModel& net) {
        const std::size_t L = net.layer_count();
        z_.resize(L);
        a_.resize(L + 1);
        delta_.resize(L);
        a_[0].resize(net.input_size());
        for (std::size_t l = 0; l < L; ++l) {
            z_[l].resize(net.fan_out(l));
            a_[l + 1].resize(net.fan_out(l));
            delta_[l].resize(net.fan_out(l));
        }
    }

    /// Adds the gradient of sum-over-batch loss to `grad` and returns the summed loss.
    double accumulate(const NetworkModel& net, std::span<const double> x, double target,
                      Loss loss, double scale, std::span<double> grad) {
        const std::size_t L = net.layer_count();
        const double* P = net.params.data();
        std::copy(x.begin(), x.end(), a_[0].begin());
        for (std::size_t l = 0; l < L; ++l) {
            const std::size_t fi = net.fan_in(l), fo = net.fan_out(l);
            const double* W = P + net.weight_offset(l);
            const double* b = P + net.bias_offset(l);
            const double* in = a_[l].data();
            for (std::size_t o = 0; o < fo; ++o) {
                double s = b[o];
                const double* row = W + o * fi;
                for (std::size_t i = 0; i < fi; ++i) s += row[i] * in[i];
                z_[l][o] = s;
                a_[l + 1][o] = (l + 1 < L) ? activation(s, net.activation) : s;
            }
        }
        double sample_loss = 0.0;
        for (std::size_t o = 0; o < net.output_size(); ++o) {
            const double r = a_[L][o] - target;
            if (loss == Loss::MSE) {
                sample_loss += r * r;
                delta_[L - 1][o] = 2.0 * r * scale;
            } else {
                sample_loss += std::abs(r);
                delta_[L - 1][o] = (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0)) * scale;
            }
        }
        for (std::size_t l = L; l-- > 0;) {
            const std::size_t fi = net.fan_in(l), fo = net.fan_out(l);
            double* gW = grad.data() + net.weight_offset(l);
            double* gb = grad.data() + net.bias_offset(l);
            const double* in = a_[l].data();
            const double* d = delta_[l].data();
            for (std::size_t o = 0; o < fo; ++o) {
                gb[o] += d[o];
                double* grow = gW + o * fi;
                for (std::size_t i = 0; i < fi; ++i) grow[i] += d[o] * in[i];
            }
            if (l > 0) {
                const double* W = P + net.weight_offset(l);
                for (std::size_t i = 0; i < fi; ++i) {
                    double s = 0.0;
                    for (std::size_t o = 0; o < fo; ++o) s += W[o * fi + i] * d[o];
                    delta_[l - 1][i] = s * activation_grad(z_[l - 1][i], net.activation);
                }
            }
        }
        return sample_loss;
    }

private:
    std::vector<std::vector<double>> z_, a_, delta_;
};

}  // namespace detail

/// Mean loss over `indices` of `data` and its gradient w.r.t. every parameter.
/// MAE uses subgradient 0 at an exactly zero residual.
inline LossGrad loss_and_grad(const NetworkModel& net, const Samples& data,
                              std::span<const std::size_t> indices, Loss loss) {
    if (indices.empty()) {
        throw std::invalid_argument("loss_and_grad: empty batch");
    }
    if (data.cols != net.input_size() || net.output_size() != 1) {
        throw std::invalid_argument("loss_and_grad: data shape does not match network");
    }
    LossGrad out;
    out.grad.assign(net.params.size(), 0.0);
    detail::Backprop bp(net);
    const double scale = 1.0 / static_cast<double>(indices.size());
    double total = 0.0;
    for (std::size_t idx : indices) {
        total += bp.accumulate(net, data.row(idx), data.y[idx], loss, scale, out.grad);
    }
    out.loss = total * scale;
    return out;
}

inline LossGrad loss_and_grad(const NetworkModel& net, const Samples& data, Loss loss) {
    std::vector<std::size_t> all(data.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    return loss_and_grad(net, data, all, loss);
}

}  // namespace tgml::nn
