#pragma once

/**
 * @file model_io.hpp
 * @brief JSON model files.
 *
 *   format_version  1
 *   layer_sizes     [in, hidden..., out]
 *   activation      "relu" | "tanh" | "sigmoid"  (hidden layers; output is linear)
 *   weights         one row-major (fan_out x fan_in) array per layer
 *   biases          one array per layer
 *   input_norm      { x_min: [...], x_max: [...] }
 *   output_norm     { x_min, x_max }
 *   feature_recipe  [tag, ...]
 *
 * Doubles are written in shortest round-trip form, so a reloaded model
 * reproduces predictions bit for bit.
 */

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "tgml/error.hpp"
#include "tgml/nn/network.hpp"

namespace tgml::nn {

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json model_to_json(const NetworkModel& net) {
    if (!net.has_normalization()) {
        throw std::invalid_argument("model without normalization statistics cannot be saved");
    }
    nlohmann::json j;
    j["format_version"] = kModelFormatVersion;
    j["layer_sizes"] = net.layer_sizes;
    j["activation"] = to_string(net.activation);
    j["output_activation"] = "linear";
    auto weights = nlohmann::json::array();
    auto biases = nlohmann::json::array();
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto w0 = net.params.begin() + static_cast<std::ptrdiff_t>(net.weight_offset(l));
        const auto b0 = net.params.begin() + static_cast<std::ptrdiff_t>(net.bias_offset(l));
        weights.push_back(std::vector<double>(
            w0, w0 + static_cast<std::ptrdiff_t>(net.fan_in(l) * net.fan_out(l))));
        biases.push_back(std::vector<double>(b0, b0 + static_cast<std::ptrdiff_t>(net.fan_out(l))));
    }
    j["weights"] = std::move(weights);
    j["biases"] = std::move(biases);
    j["input_norm"] = {{"x_min", net.input_norm.x_min()}, {"x_max", net.input_norm.x_max()}};
    if (net.output_size() == 1) {
        j["output_norm"] = {{"x_min", net.output_norm.x_min()[0]},
                            {"x_max", net.output_norm.x_max()[0]}};
    } else {
        j["output_norm"] = {{"x_min", net.output_norm.x_min()}, {"x_max", net.output_norm.x_max()}};
    }
    j["feature_recipe"] = net.feature_recipe;
    return j;
}

namespace detail {

inline std::vector<double> as_vector(const nlohmann::json& v) {
    if (v.is_number()) {
        return {v.get<double>()};
    }
    return v.get<std::vector<double>>();
}

inline NormStats parse_norm(const nlohmann::json& j, const char* name) {
    if (!j.contains(name)) {
        throw ParseError(std::string("model file: missing ") + name +
                         " (a model is only valid with its normalization)");
    }
    const auto& n = j.at(name);
    if (!n.contains("x_min") || !n.contains("x_max")) {
        throw ParseError(std::string("model file: ") + name + " needs x_min and x_max");
    }
    try {
        return NormStats(as_vector(n.at("x_min")), as_vector(n.at("x_max")));
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("model file: ") + name + ": " + e.what());
    }
}

}  // namespace detail

inline NetworkModel model_from_json(const nlohmann::json& j) {
    try {
        if (!j.is_object() || !j.contains("format_version")) {
            throw ParseError("model file: missing format_version");
        }
        if (j.at("format_version").get<int>() != kModelFormatVersion) {
            throw ParseError("model file: unsupported format_version " +
                             j.at("format_version").dump());
        }
        NetworkModel net(j.at("layer_sizes").get<std::vector<std::size_t>>(),
                         parse_activation(j.at("activation").get<std::string>()));
        const auto& weights = j.at("weights");
        const auto& biases = j.at("biases");
        if (weights.size() != net.layer_count() || biases.size() != net.layer_count()) {
            throw ParseError("model file: weights/biases do not match layer_sizes");
        }
        for (std::size_t l = 0; l < net.layer_count(); ++l) {
            const auto w = weights.at(l).get<std::vector<double>>();
            const auto b = biases.at(l).get<std::vector<double>>();
            if (w.size() != net.fan_in(l) * net.fan_out(l) || b.size() != net.fan_out(l)) {
                throw ParseError("model file: layer " + std::to_string(l) + " has wrong shape");
            }
            std::copy(w.begin(), w.end(),
                      net.params.begin() + static_cast<std::ptrdiff_t>(net.weight_offset(l)));
            std::copy(b.begin(), b.end(),
                      net.params.begin() + static_cast<std::ptrdiff_t>(net.bias_offset(l)));
        }
        for (double p : net.params) {
            if (!std::isfinite(p)) {
                throw ParseError("model file: non-finite parameter");
            }
        }
        net.input_norm = detail::parse_norm(j, "input_norm");
        net.output_norm = detail::parse_norm(j, "output_norm");
        if (!net.has_normalization()) {
            throw ParseError("model file: normalization does not match layer sizes");
        }
        if (j.contains("feature_recipe")) {
            net.feature_recipe = j.at("feature_recipe").get<std::vector<std::string>>();
        }
        return net;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("model file: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("model file: ") + e.what());
    }
}

inline void save_model(const NetworkModel& net, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write model file " + path.string());
    }
    out << model_to_json(net).dump(2) << '\n';
}

inline NetworkModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("model file not found: " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("model file " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

}  // namespace tgml::nn
