#pragma once

/**
 * @file pipeline.hpp
 * @brief Case-study orchestration: datasets, feature recipes, variant training,
 *        approximate-solution pre-training, extrapolation sweeps, benchmark.
 *
 * Case 1: steady ramp lag at the centre of an inert composite tool slab.
 * Case 2: maximum ramp lag of a curing part on an Invar tool.
 * Case 3: exotherm of the same part/tool stack.
 *
 * Dataset inputs are SI (m, W/(m^2 K), K/s); targets are K. Every random
 * stream is derived from the caller's seed, so results are independent of the
 * number of worker threads.
 */

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "tgml/closed_form.hpp"
#include "tgml/config.hpp"
#include "tgml/error.hpp"
#include "tgml/neural.hpp"
#include "tgml/solver.hpp"

namespace tgml::pipeline {

enum class Target { SteadyLag, TransientLag, Exotherm };
enum class Recipe { Raw, Nondimensional, HrTransform };

inline std::string to_string(Target t) {
    switch (t) {
        case Target::SteadyLag: return "steady_lag";
        case Target::TransientLag: return "transient_lag";
        case Target::Exotherm: return "exotherm";
    }
    return "?";
}

inline std::string to_string(Recipe r) {
    switch (r) {
        case Recipe::Raw: return "raw";
        case Recipe::Nondimensional: return "nondimensional";
        case Recipe::HrTransform: return "hr_transform";
    }
    return "?";
}

inline Recipe parse_recipe(std::string_view s) {
    if (s == "raw") return Recipe::Raw;
    if (s == "nondimensional") return Recipe::Nondimensional;
    if (s == "hr_transform") return Recipe::HrTransform;
    throw std::invalid_argument("unknown feature recipe '" + std::string(s) + "'");
}

inline constexpr double kStartTemperature = 293.15;  // 20 C
inline constexpr double kHoldTemperature = 453.15;   // 180 C
inline constexpr double kHoldDuration = 7200.0;      // 2 h
inline constexpr double kCoolRate = 2.0 / 60.0;      // 2 C/min
inline constexpr double kDatasetDx = 5e-4;           // m
inline constexpr double kDatasetDt = 1.0;            // s
inline constexpr double kMaxSaneTarget = 200.0;      // K
inline constexpr double kOverfitThreshold = 0.02;
inline constexpr double kTrainFraction = 0.7;

struct Range {
    double min = 0.0;
    double max = 0.0;
    bool contains(double v) const { return v >= min && v <= max; }
};

struct InputVariable {
    std::string name;
    Range range;
};

struct CaseSpec {
    int case_id = 1;
    std::vector<InputVariable> inputs;
    Target target = Target::SteadyLag;
    Recipe recipe = Recipe::Raw;
    std::size_t size = 1;
    std::uint64_t seed = 42;
    double solver_dx = kDatasetDx;
    double solver_dt = kDatasetDt;

    std::vector<std::string> input_names() const {
        std::vector<std::string> names;
        for (const auto& v : inputs) names.push_back(v.name);
        return names;
    }
    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < inputs.size(); ++i) {
            if (inputs[i].name == name) return i;
        }
        throw std::invalid_argument("case " + std::to_string(case_id) + " has no input '" + name + "'");
    }
};

inline constexpr double per_minute(double c_per_min) { return c_per_min / 60.0; }

/// Input ranges and target of each case study.
inline CaseSpec case_spec(int case_id, std::size_t size, std::uint64_t seed) {
    CaseSpec spec;
    spec.case_id = case_id;
    spec.size = size;
    spec.seed = seed;
    const Range heating{per_minute(1.0), per_minute(5.0)};
    switch (case_id) {
        case 1:
            spec.inputs = {{"part_thickness", {0.002, 0.020}}, {"h", {20.0, 100.0}},
                           {"heating_rate", heating}};
            spec.target = Target::SteadyLag;
            break;
        case 2:
        case 3:
            spec.inputs = {{"part_thickness", {0.002, 0.020}}, {"tool_thickness", {0.008, 0.020}},
                           {"h_top", {20.0, 100.0}},           {"h_bottom", {20.0, 100.0}},
                           {"heating_rate", heating}};
            spec.target = case_id == 2 ? Target::TransientLag : Target::Exotherm;
            break;
        default:
            throw std::invalid_argument("case must be 1, 2 or 3");
    }
    if (size == 0) {
        throw std::invalid_argument("dataset size must be at least 1");
    }
    return spec;
}

struct Dataset {
    CaseSpec spec;
    std::vector<std::string> feature_names;
    std::string target_name;
    nn::Samples data;  // raw inputs (SI) and targets (K)
    bool approximate_labels = false;
    std::size_t regenerated_rows = 0;

    std::size_t size() const { return data.size(); }
    nn::NormStats norm_stats() const { return nn::NormStats::from_rows(data.x, data.cols); }
};

/// Solver scenario for one input row of a case.
inline Scenario scenario_for(const CaseSpec& spec, std::span<const double> row,
                             const MaterialLibrary& lib = default_material_library()) {
    auto value = [&](const char* name) { return row[spec.column(name)]; };
    Scenario s;
    s.cycle.initial_temperature = kStartTemperature;
    s.cycle.heating_rate = value("heating_rate");
    if (spec.case_id == 1) {
        // Inert tool slab with the same h on both faces. The ramp is stretched to
        // twelve lag time constants so the quasi-steady state is reached; with
        // no reaction the ramp end temperature has no other effect.
        s.part = lookup_material(lib, kCompositeTool);
        s.inert = true;
        s.part_thickness = value("part_thickness");
        s.h_top = s.h_bottom = value("h");
        const double tau = closed_form::steady_state_lag(s.part_thickness, s.h_top, 1.0,
                                                         s.part.thermal);
        const double ramp = std::max(600.0, 12.0 * tau);
        s.cycle.hold_temperature = kStartTemperature + s.cycle.heating_rate * ramp;
        s.cycle.hold_duration = 0.0;
        s.cycle.cool_rate = s.cycle.heating_rate;
    } else {
        s.part = lookup_material(lib, kCuringEpoxy);
        s.tool = lookup_material(lib, kInvar);
        s.part_thickness = value("part_thickness");
        s.tool_thickness = value("tool_thickness");
        s.h_top = value("h_top");
        s.h_bottom = value("h_bottom");
        s.cycle.hold_temperature = kHoldTemperature;
        s.cycle.hold_duration = kHoldDuration;
        s.cycle.cool_rate = kCoolRate;
    }
    return s;
}

/// Solver horizon that covers the KPI of the case.
inline double target_horizon(const CaseSpec& spec, const Scenario& s) {
    switch (spec.target) {
        case Target::SteadyLag:
        case Target::TransientLag: return s.cycle.ramp_end();
        case Target::Exotherm: return s.cycle.hold_end();
    }
    return 0.0;
}

/// Solver-computed target for one row. Throws SolverError when the run fails
/// or does not yield a usable KPI.
inline double solver_target(const CaseSpec& spec, std::span<const double> row,
                            const MaterialLibrary& lib = default_material_library()) {
    const Scenario s = scenario_for(spec, row, lib);
    SolverSettings settings;
    settings.dx = spec.solver_dx;
    settings.dt = spec.solver_dt;
    settings.store_fields = false;
    settings.end_time = target_horizon(spec, s);
    const SimulationResult r = simulate(s, settings);
    double value = 0.0;
    switch (spec.target) {
        case Target::SteadyLag:
            if (!r.kpis.steady_state_reached) {
                throw SolverError("quasi-steady state not reached", r.time.back());
            }
            value = r.kpis.steady_state_lag;
            break;
        case Target::TransientLag: value = r.kpis.max_transient_lag; break;
        case Target::Exotherm: value = r.kpis.exotherm; break;
    }
    if (!std::isfinite(value) || value < 0.0 || value > kMaxSaneTarget) {
        throw SolverError("target outside physical bounds", r.time.back());
    }
    return value;
}

/// Closed-form approximate target (Case 2 lag only).
inline double approximate_target(const CaseSpec& spec, std::span<const double> row,
                                 const MaterialLibrary& lib = default_material_library()) {
    if (spec.target != Target::TransientLag) {
        throw std::invalid_argument("closed-form labels exist only for the transient lag case");
    }
    return closed_form::approximate_case2_lag(scenario_for(spec, row, lib));
}

/// Run fn(i) for i in [0, n) on up to `jobs` threads; rethrows the first failure.
template <class Fn>
void parallel_for(std::size_t n, unsigned jobs, Fn&& fn) {
    if (jobs == 0) {
        jobs = std::max(1u, std::thread::hardware_concurrency());
    }
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> workers;
    for (unsigned w = 0; w < jobs; ++w) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : workers) t.join();
    if (error) std::rethrow_exception(error);
}

namespace detail {

inline std::mt19937_64 stream(std::uint64_t seed, std::uint32_t a, std::uint32_t b = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), a, b};
    return std::mt19937_64(seq);
}

inline std::vector<double> draw_row(const CaseSpec& spec, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> row;
    for (const auto& v : spec.inputs) {
        row.push_back(v.range.min + (v.range.max - v.range.min) * unit(rng));
    }
    return row;
}

inline constexpr std::uint32_t kExactStream = 0xE8AC7u;
inline constexpr std::uint32_t kApproxStream = 0xA9920u;

}  // namespace detail

/**
 * @brief Solver-labelled dataset of `spec.size` rows drawn uniformly from the case ranges.
 *
 * Rows whose simulation fails are redrawn (in row order, from the same
 * stream) so the input distribution stays uniform; the count is recorded in
 * `regenerated_rows`.
 */
inline Dataset generate_dataset(const CaseSpec& spec, unsigned jobs = 0,
                                const MaterialLibrary& lib = default_material_library()) {
    Dataset ds;
    ds.spec = spec;
    ds.feature_names = spec.input_names();
    ds.target_name = to_string(spec.target);
    ds.data.cols = spec.inputs.size();

    auto rng = detail::stream(spec.seed, detail::kExactStream, static_cast<std::uint32_t>(spec.case_id));
    std::vector<std::vector<double>> rows(spec.size);
    for (auto& r : rows) r = detail::draw_row(spec, rng);
    std::vector<double> targets(spec.size, 0.0);
    std::vector<char> ok(spec.size, 0);

    std::vector<std::size_t> pending(spec.size);
    std::iota(pending.begin(), pending.end(), 0);
    constexpr int kMaxRounds = 100;
    for (int round = 0; !pending.empty(); ++round) {
        if (round == kMaxRounds) {
            throw SolverError("dataset generation: too many failed simulations", 0.0);
        }
        parallel_for(pending.size(), jobs, [&](std::size_t k) {
            const std::size_t i = pending[k];
            try {
                targets[i] = solver_target(spec, rows[i], lib);
                ok[i] = 1;
            } catch (const SolverError&) {
                ok[i] = 0;
            }
        });
        std::vector<std::size_t> failed;
        for (std::size_t i : pending) {
            if (!ok[i]) {
                rows[i] = detail::draw_row(spec, rng);
                failed.push_back(i);
            }
        }
        ds.regenerated_rows += failed.size();
        pending = std::move(failed);
    }
    if (ds.regenerated_rows > 0) {
        std::cerr << "generate_dataset: redrew " << ds.regenerated_rows << " failed rows\n";
    }
    for (std::size_t i = 0; i < spec.size; ++i) {
        ds.data.x.insert(ds.data.x.end(), rows[i].begin(), rows[i].end());
        ds.data.y.push_back(targets[i]);
    }
    return ds;
}

/// Case 2 inputs labelled by the closed-form lag. Drawn from a stream disjoint
/// from generate_dataset's so approximate and exact rows never coincide.
inline Dataset generate_approximate_dataset(const CaseSpec& spec,
                                            const MaterialLibrary& lib = default_material_library()) {
    if (spec.target != Target::TransientLag) {
        throw std::invalid_argument("approximate labels exist only for case 2");
    }
    Dataset ds;
    ds.spec = spec;
    ds.feature_names = spec.input_names();
    ds.target_name = to_string(spec.target);
    ds.data.cols = spec.inputs.size();
    ds.approximate_labels = true;
    auto rng = detail::stream(spec.seed, detail::kApproxStream, static_cast<std::uint32_t>(spec.case_id));
    for (std::size_t i = 0; i < spec.size; ++i) {
        const auto row = detail::draw_row(spec, rng);
        ds.data.x.insert(ds.data.x.end(), row.begin(), row.end());
        ds.data.y.push_back(approximate_target(spec, row, lib));
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Feature recipes

inline std::vector<std::string> recipe_feature_names(const CaseSpec& spec, Recipe recipe) {
    switch (recipe) {
        case Recipe::Raw: return spec.input_names();
        case Recipe::Nondimensional:
            if (spec.case_id != 1) {
                throw std::invalid_argument("nondimensional features apply only to case 1 (got case " +
                                            std::to_string(spec.case_id) + ")");
            }
            return {"rate_length_per_h", "rate_length_sq"};
        case Recipe::HrTransform: {
            auto names = spec.input_names();
            names[spec.column("heating_rate")] = "heating_rate_transform";
            return names;
        }
    }
    return {};
}

/// Feature row for one raw input row.
inline std::vector<double> feature_row(const CaseSpec& spec, Recipe recipe, std::span<const double> raw) {
    switch (recipe) {
        case Recipe::Raw: return {raw.begin(), raw.end()};
        case Recipe::Nondimensional: {
            recipe_feature_names(spec, recipe);  // validates the case
            const auto f = closed_form::nondimensional_features(
                raw[spec.column("part_thickness")], raw[spec.column("h")],
                raw[spec.column("heating_rate")]);
            return {f.rate_length_per_h, f.rate_length_sq};
        }
        case Recipe::HrTransform: {
            std::vector<double> out(raw.begin(), raw.end());
            const std::size_t c = spec.column("heating_rate");
            out[c] = closed_form::heating_rate_transform(raw[c] * 60.0);
            return out;
        }
    }
    return {};
}

/// Feature matrix of a dataset under a recipe; targets are carried over.
inline nn::Samples apply_features(const Dataset& ds, Recipe recipe) {
    nn::Samples out;
    out.cols = recipe_feature_names(ds.spec, recipe).size();
    out.y = ds.data.y;
    out.x.reserve(out.cols * ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto f = feature_row(ds.spec, recipe, ds.data.row(i));
        out.x.insert(out.x.end(), f.begin(), f.end());
    }
    return out;
}

// ---------------------------------------------------------------------------
// Split and normalization

struct Partition {
    std::vector<std::size_t> train_index;
    std::vector<std::size_t> val_index;
    nn::Samples train;  // raw features
    nn::Samples val;
    nn::NormStats input_norm;   // from the training partition only
    nn::NormStats output_norm;
    nn::Samples train_norm;
    nn::Samples val_norm;
};

inline nn::Samples subset(const nn::Samples& s, std::span<const std::size_t> index) {
    nn::Samples out;
    out.cols = s.cols;
    for (std::size_t i : index) {
        const auto r = s.row(i);
        out.x.insert(out.x.end(), r.begin(), r.end());
        out.y.push_back(s.y[i]);
    }
    return out;
}

inline nn::Samples normalize_samples(const nn::Samples& s, const nn::NormStats& in,
                                     const nn::NormStats& out) {
    nn::Samples n;
    n.cols = s.cols;
    n.x.resize(s.x.size());
    for (std::size_t k = 0; k < s.x.size(); ++k) {
        n.x[k] = in.normalize(s.x[k], k % s.cols);
    }
    n.y.resize(s.y.size());
    for (std::size_t k = 0; k < s.y.size(); ++k) {
        n.y[k] = out.normalize(s.y[k], 0);
    }
    return n;
}

/// Seeded disjoint split. `norm_override` reuses existing statistics (fine-tuning
/// a pre-trained model must keep the statistics it was trained with).
inline Partition split(const nn::Samples& data, double train_fraction, std::uint64_t seed,
                       const std::optional<std::pair<nn::NormStats, nn::NormStats>>& norm_override =
                           std::nullopt) {
    const std::size_t n = data.size();
    if (n < 10) {
        throw std::invalid_argument("split: need at least 10 rows (got " + std::to_string(n) + ")");
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("split: train fraction must lie in (0, 1)");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    auto rng = detail::stream(seed, 0x5B117u);
    std::shuffle(order.begin(), order.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));

    Partition p;
    p.train_index.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    p.val_index.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    p.train = subset(data, p.train_index);
    p.val = subset(data, p.val_index);
    if (norm_override) {
        p.input_norm = norm_override->first;
        p.output_norm = norm_override->second;
    } else {
        p.input_norm = nn::NormStats::from_rows(p.train.x, p.train.cols);
        p.output_norm = nn::NormStats::from_rows(p.train.y, 1);
    }
    p.train_norm = normalize_samples(p.train, p.input_norm, p.output_norm);
    p.val_norm = normalize_samples(p.val, p.input_norm, p.output_norm);
    return p;
}

/// Accept unless validation NRMSE exceeds training NRMSE by more than 0.02.
inline bool reject_overfit(double train_nrmse, double val_nrmse) {
    return !(val_nrmse - train_nrmse > kOverfitThreshold);
}

// ---------------------------------------------------------------------------
// Variants

struct Variant {
    std::string name;
    std::size_t hidden_layers = 3;
    std::size_t nodes = 5;
    nn::Activation activation = nn::Activation::ReLU;
    Recipe recipe = Recipe::Raw;
    nn::TrainingConfig training;
    bool pretrained = false;

    std::string optimizer_label() const {
        std::ostringstream os;
        os << (training.optimizer.kind == nn::OptimizerKind::ProximalAdagrad ? "PAG" : "GD")
           << " (rate=" << training.optimizer.learning_rate << ") " << training.iterations / 1000
           << "K iterations";
        return os.str();
    }
};

/// Table-style variant matrix of each case.
inline std::vector<Variant> case_variants(int case_id) {
    auto gd = [](double lr, std::size_t iters) {
        nn::TrainingConfig c;
        c.optimizer = {nn::OptimizerKind::GD, lr, nn::Regularization::None, 0.0};
        c.iterations = iters;
        return c;
    };
    auto pag = [](double lr, std::size_t iters, nn::Regularization reg, double strength) {
        nn::TrainingConfig c;
        c.optimizer = {nn::OptimizerKind::ProximalAdagrad, lr, reg, strength};
        c.iterations = iters;
        return c;
    };
    using nn::Activation;
    switch (case_id) {
        case 1:
            return {
                {"small_nn", 3, 5, Activation::ReLU, Recipe::Raw, gd(1e-3, 50000), false},
                {"medium_nn", 4, 10, Activation::ReLU, Recipe::Raw, gd(1e-3, 100000), false},
                {"large_nn", 5, 25, Activation::ReLU, Recipe::Raw, gd(1e-3, 200000), false},
                {"small_nn_physics_features", 3, 5, Activation::ReLU, Recipe::Nondimensional,
                 gd(1e-3, 50000), false},
            };
        case 2: {
            const auto p = pag(0.04, 25000, nn::Regularization::Lasso, 1e-3);
            return {
                {"relu", 4, 10, Activation::ReLU, Recipe::Raw, p, false},
                {"tanh", 4, 10, Activation::Tanh, Recipe::Raw, p, false},
                {"pretrained_tanh", 4, 10, Activation::Tanh, Recipe::Raw, gd(1e-3, 25000), true},
            };
        }
        case 3:
            return {
                {"relu", 4, 10, Activation::ReLU, Recipe::Raw, gd(1e-3, 100000), false},
                {"tanh", 4, 10, Activation::Tanh, Recipe::Raw, gd(1e-3, 100000), false},
                {"tanh_hr_transform", 4, 10, Activation::Tanh, Recipe::HrTransform,
                 gd(1e-3, 100000), false},
                {"tanh_hr_transform_pag", 4, 10, Activation::Tanh, Recipe::HrTransform,
                 pag(0.06, 100000, nn::Regularization::None, 0.0), false},
            };
        default: throw std::invalid_argument("case must be 1, 2 or 3");
    }
}

/// Feature-recipe tags stored in model files: {recipe, "case=<id>"}.
inline std::vector<std::string> recipe_tags(const CaseSpec& spec, Recipe recipe) {
    return {to_string(recipe), "case=" + std::to_string(spec.case_id)};
}

inline std::pair<int, Recipe> parse_recipe_tags(const std::vector<std::string>& tags) {
    std::optional<Recipe> recipe;
    std::optional<int> case_id;
    for (const auto& t : tags) {
        if (t.rfind("case=", 0) == 0) {
            case_id = std::stoi(t.substr(5));
        } else {
            recipe = parse_recipe(t);
        }
    }
    if (!recipe || !case_id) {
        throw ParseError("model feature_recipe must name a recipe and a case");
    }
    return {*case_id, *recipe};
}

struct VariantOutcome {
    std::string name;
    std::uint64_t seed = 0;
    nn::NetworkModel model;
    nn::EvalReport train_report;
    nn::EvalReport val_report;
    bool accepted = true;
    std::vector<nn::HistoryPoint> history;
};

/// Raw-unit predictions of a model over a raw-feature sample set.
inline std::vector<double> predict_all(const nn::NetworkModel& net, const nn::Samples& features) {
    std::vector<double> out(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        out[i] = nn::predict(net, features.row(i))[0];
    }
    return out;
}

inline VariantOutcome evaluate_partition(std::string name, std::uint64_t seed, nn::NetworkModel model,
                                         const Partition& p, std::vector<nn::HistoryPoint> history) {
    VariantOutcome o;
    o.name = std::move(name);
    o.seed = seed;
    o.train_report = nn::metrics(p.train.y, predict_all(model, p.train));
    o.val_report = nn::metrics(p.val.y, predict_all(model, p.val));
    o.accepted = reject_overfit(o.train_report.nrmse, o.val_report.nrmse);
    o.model = std::move(model);
    o.history = std::move(history);
    return o;
}

/// Fresh Xavier-initialized network trained on a 70/30 split of `ds`.
inline VariantOutcome train_variant(const Dataset& ds, const Variant& v, std::uint64_t seed) {
    const nn::Samples features = apply_features(ds, v.recipe);
    const Partition p = split(features, kTrainFraction, seed);
    auto sizes = nn::parse_architecture(std::to_string(v.hidden_layers) + "x" + std::to_string(v.nodes),
                                        features.cols);
    nn::NetworkModel net = nn::make_network(std::move(sizes), v.activation, v.training.initializer, seed);
    net.input_norm = p.input_norm;
    net.output_norm = p.output_norm;
    net.feature_recipe = recipe_tags(ds.spec, v.recipe);
    nn::TrainingConfig cfg = v.training;
    cfg.seed = seed;
    auto trained = nn::train(std::move(net), p.train_norm, p.val_norm, cfg);
    return evaluate_partition(v.name, seed, std::move(trained.model), p, std::move(trained.history));
}

// ---------------------------------------------------------------------------
// Pre-training on approximate labels

struct PretrainConfig {
    std::size_t approx_size = 8000;
    std::size_t hidden_layers = 4;
    std::size_t nodes = 10;
    nn::TrainingConfig pretrain;  // Step II
    nn::TrainingConfig finetune;  // Step III

    PretrainConfig() {
        pretrain.optimizer = {nn::OptimizerKind::GD, 1e-3, nn::Regularization::None, 0.0};
        pretrain.iterations = 100000;
        finetune.optimizer = {nn::OptimizerKind::GD, 1e-3, nn::Regularization::None, 0.0};
        finetune.iterations = 25000;
    }
};

/// Step II: a fresh tanh network trained on every approximate row. Its
/// normalization statistics come from the approximate inputs and labels.
inline nn::NetworkModel pretrain(const Dataset& approx, const PretrainConfig& cfg, std::uint64_t seed) {
    const nn::Samples features = apply_features(approx, Recipe::Raw);
    const auto in_norm = nn::NormStats::from_rows(features.x, features.cols);
    const auto out_norm = nn::NormStats::from_rows(features.y, 1);
    auto sizes = nn::parse_architecture(
        std::to_string(cfg.hidden_layers) + "x" + std::to_string(cfg.nodes), features.cols);
    nn::NetworkModel net = nn::make_network(std::move(sizes), nn::Activation::Tanh,
                                            nn::Initializer::Xavier, seed);
    net.input_norm = in_norm;
    net.output_norm = out_norm;
    net.feature_recipe = recipe_tags(approx.spec, Recipe::Raw);
    nn::TrainingConfig tc = cfg.pretrain;
    tc.seed = seed;
    return nn::train(std::move(net), normalize_samples(features, in_norm, out_norm), nn::Samples{},
                     tc)
        .model;
}

/// Step III: continue training the pre-trained parameters on exact rows,
/// keeping the pre-trained normalization.
inline VariantOutcome finetune(const nn::NetworkModel& pretrained, const Dataset& exact,
                               const nn::TrainingConfig& config, std::uint64_t seed,
                               std::string name = "pretrained_tanh") {
    const nn::Samples features = apply_features(exact, Recipe::Raw);
    const Partition p = split(features, kTrainFraction, seed,
                              std::make_pair(pretrained.input_norm, pretrained.output_norm));
    nn::TrainingConfig tc = config;
    tc.seed = seed;
    auto trained = nn::train(pretrained, p.train_norm, p.val_norm, tc);
    return evaluate_partition(std::move(name), seed, std::move(trained.model), p,
                              std::move(trained.history));
}

/// Steps I-III end to end. With exact_size = 0 the Step II model is returned.
inline nn::NetworkModel pretrain_then_finetune(const CaseSpec& spec, const PretrainConfig& cfg,
                                               std::size_t exact_size, unsigned jobs = 0,
                                               const MaterialLibrary& lib = default_material_library()) {
    if (spec.case_id != 2) {
        throw std::invalid_argument("pre-training on approximate solutions is defined for case 2");
    }
    CaseSpec approx_spec = spec;
    approx_spec.size = cfg.approx_size;
    const Dataset approx = generate_approximate_dataset(approx_spec, lib);
    nn::NetworkModel model = pretrain(approx, cfg, spec.seed);
    if (exact_size == 0) {
        return model;
    }
    CaseSpec exact_spec = spec;
    exact_spec.size = exact_size;
    const Dataset exact = generate_dataset(exact_spec, jobs, lib);
    return finetune(model, exact, cfg.finetune, spec.seed).model;
}

// ---------------------------------------------------------------------------
// Extrapolation sweep

struct SweepPoint {
    double value = 0.0;       // swept variable, SI
    double prediction = 0.0;  // K
    double truth = 0.0;       // K
};

/// Fixed inputs of the published trend checks.
inline std::map<std::string, double> default_sweep_fixed_values(int case_id) {
    if (case_id == 1) {
        return {{"part_thickness", 0.010}, {"h", 50.0}};
    }
    return {{"part_thickness", 0.010}, {"tool_thickness", 0.012}, {"h_top", 60.0}, {"h_bottom", 40.0}};
}

inline Range default_sweep_range(int case_id) {
    return case_id == 1 ? Range{per_minute(0.25), per_minute(10.0)} : Range{per_minute(0.5), per_minute(8.0)};
}

inline std::vector<std::vector<double>> sweep_rows(const CaseSpec& spec, const std::string& variable,
                                                   Range range,
                                                   const std::map<std::string, double>& fixed,
                                                   std::size_t points) {
    if (points < 2) {
        throw std::invalid_argument("sweep needs at least two points");
    }
    const std::size_t swept = spec.column(variable);
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < points; ++k) {
        std::vector<double> row(spec.inputs.size());
        for (std::size_t c = 0; c < spec.inputs.size(); ++c) {
            if (c == swept) continue;
            auto it = fixed.find(spec.inputs[c].name);
            if (it == fixed.end()) {
                throw std::invalid_argument("sweep: no fixed value for '" + spec.inputs[c].name + "'");
            }
            row[c] = it->second;
        }
        row[swept] = range.min + (range.max - range.min) * static_cast<double>(k) /
                                     static_cast<double>(points - 1);
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Solver truth along a sweep (independent of any model).
inline std::vector<double> sweep_truth(const CaseSpec& spec, const std::vector<std::vector<double>>& rows,
                                       unsigned jobs = 0,
                                       const MaterialLibrary& lib = default_material_library()) {
    std::vector<double> truth(rows.size());
    parallel_for(rows.size(), jobs, [&](std::size_t i) { truth[i] = solver_target(spec, rows[i], lib); });
    return truth;
}

inline std::vector<SweepPoint> sweep_extrapolation(
    const nn::NetworkModel& model, const CaseSpec& spec, const std::string& variable, Range range,
    const std::map<std::string, double>& fixed, std::size_t points = 40, unsigned jobs = 0,
    const MaterialLibrary& lib = default_material_library()) {
    const auto [case_id, recipe] = parse_recipe_tags(model.feature_recipe);
    if (case_id != spec.case_id) {
        throw std::invalid_argument("model was trained for case " + std::to_string(case_id));
    }
    const auto rows = sweep_rows(spec, variable, range, fixed, points);
    const auto truth = sweep_truth(spec, rows, jobs, lib);
    const std::size_t swept = spec.column(variable);
    std::vector<SweepPoint> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out.push_back({rows[i][swept], nn::predict(model, feature_row(spec, recipe, rows[i]))[0], truth[i]});
    }
    return out;
}

/// Largest |prediction - truth| over sweep points outside `training` (or inside, if `inside`).
inline double sweep_max_deviation(const std::vector<SweepPoint>& sweep, Range training, bool inside = false) {
    double worst = 0.0;
    for (const auto& p : sweep) {
        if (training.contains(p.value) == inside) {
            worst = std::max(worst, std::abs(p.prediction - p.truth));
        }
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Benchmark

struct BenchmarkReport {
    std::size_t predictions = 0;
    double surrogate_seconds = 0.0;
    double solver_seconds = 0.0;  // one full-cycle solver run
    double speedup = 0.0;         // solver_seconds * predictions / surrogate_seconds; 0 if undefined
    double checksum = 0.0;        // sum of predictions, keeps the loop observable
};

inline BenchmarkReport benchmark(const nn::NetworkModel& model, const Scenario& reference,
                                 std::span<const double> raw_row, std::size_t n_predictions = 100000) {
    const auto [case_id, recipe] = parse_recipe_tags(model.feature_recipe);
    const CaseSpec spec = case_spec(case_id, 1, 0);
    using clock = std::chrono::steady_clock;
    BenchmarkReport r;
    r.predictions = n_predictions;

    auto t0 = clock::now();
    SolverSettings settings;
    settings.store_fields = false;
    const SimulationResult sim = simulate(reference, settings);
    r.solver_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    r.checksum += sim.kpis.exotherm;

    std::vector<double> row(raw_row.begin(), raw_row.end());
    const std::size_t hr = spec.column("heating_rate");
    const double base = row[hr];
    t0 = clock::now();
    for (std::size_t i = 0; i < n_predictions; ++i) {
        row[hr] = base * (1.0 + 1e-6 * static_cast<double>(i % 100));
        r.checksum += nn::predict(model, feature_row(spec, recipe, row))[0];
    }
    r.surrogate_seconds =
        n_predictions == 0 ? 0.0 : std::chrono::duration<double>(clock::now() - t0).count();
    if (r.surrogate_seconds > 0.0) {
        r.speedup = r.solver_seconds * static_cast<double>(n_predictions) / r.surrogate_seconds;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Case studies

struct CaseStudyOptions {
    std::size_t dataset_size = 0;  // 0 selects the published size
    std::vector<std::uint64_t> seeds{42};
    std::uint64_t dataset_seed = 42;
    double iteration_scale = 1.0;
    std::vector<std::size_t> size_ladder;  // optional error-vs-size curve
    bool sweeps = true;
    std::size_t sweep_points = 40;
    std::size_t approx_size = 8000;
    unsigned jobs = 0;
    MaterialLibrary materials = default_material_library();
};

inline std::size_t published_dataset_size(int case_id) {
    switch (case_id) {
        case 1: return 10000;
        case 2: return 300;
        case 3: return 5000;
        default: throw std::invalid_argument("case must be 1, 2 or 3");
    }
}

struct VariantRow {
    std::string variant;
    std::string optimizer;
    std::size_t layers = 0;
    std::size_t nodes = 0;
    std::uint64_t seed = 0;
    std::size_t dataset_size = 0;
    nn::EvalReport train;
    nn::EvalReport val;
    bool accepted = true;
    std::string error;  // non-empty when the variant failed
};

struct SweepCurve {
    std::string variant;
    std::uint64_t seed = 0;
    std::vector<SweepPoint> points;
    double out_of_training_max_deviation = 0.0;
    double in_training_max_deviation = 0.0;
};

struct CaseReport {
    int case_id = 1;
    Dataset dataset;
    std::vector<VariantRow> rows;       // one per variant and seed
    std::vector<VariantRow> size_rows;  // error-vs-size curve
    std::vector<SweepCurve> sweeps;
    std::optional<nn::EvalReport> pretrained_only;  // case 2: Step II model on the exact data

    /// Median over seeds of a per-row metric for one variant (successful rows only).
    double median(const std::string& variant, double nn::EvalReport::*field,
                  const std::vector<VariantRow>* source = nullptr, std::size_t size = 0) const {
        std::vector<double> v;
        for (const auto& r : source ? *source : rows) {
            if (r.variant == variant && r.error.empty() && (size == 0 || r.dataset_size == size)) {
                v.push_back(r.val.*field);
            }
        }
        if (v.empty()) {
            throw std::runtime_error("no successful runs for variant " + variant);
        }
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size();
        return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
    }

    double median_sweep_deviation(const std::string& variant) const {
        std::vector<double> v;
        for (const auto& s : sweeps) {
            if (s.variant == variant) v.push_back(s.out_of_training_max_deviation);
        }
        if (v.empty()) {
            throw std::runtime_error("no sweep for variant " + variant);
        }
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size();
        return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
    }
};

namespace detail {

inline VariantRow row_from(const Variant& v, const VariantOutcome& o, std::size_t size) {
    VariantRow r;
    r.variant = v.name;
    r.optimizer = v.optimizer_label();
    r.layers = v.hidden_layers;
    r.nodes = v.nodes;
    r.seed = o.seed;
    r.dataset_size = size;
    r.train = o.train_report;
    r.val = o.val_report;
    r.accepted = o.accepted;
    return r;
}

inline Dataset head(const Dataset& ds, std::size_t n) {
    Dataset out = ds;
    out.spec.size = n;
    out.data.x.resize(n * ds.data.cols);
    out.data.y.resize(n);
    return out;
}

/// Variants whose extrapolation is compared against solver truth.
inline std::vector<std::string> sweep_variants(int case_id) {
    if (case_id == 1) return {"large_nn", "small_nn_physics_features"};
    if (case_id == 3) return {"tanh", "tanh_hr_transform"};
    return {};
}

}  // namespace detail

/**
 * @brief Runs the variant matrix of one case over every seed.
 *
 * One dataset (seeded by `dataset_seed`) is shared by all variants; each seed
 * changes the split, initialization and batch order. A failing variant is
 * recorded in its row without aborting the others.
 */
inline CaseReport run_case_study(int case_id, const CaseStudyOptions& opt) {
    CaseReport report;
    report.case_id = case_id;
    const std::size_t size = opt.dataset_size ? opt.dataset_size : published_dataset_size(case_id);
    std::size_t full_size = size;
    for (std::size_t s : opt.size_ladder) full_size = std::max(full_size, s);
    const CaseSpec spec = case_spec(case_id, full_size, opt.dataset_seed);
    const Dataset full = generate_dataset(spec, opt.jobs, opt.materials);
    report.dataset = detail::head(full, size);

    auto variants = case_variants(case_id);
    for (auto& v : variants) {
        v.training.iterations = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(static_cast<double>(v.training.iterations) *
                                                      opt.iteration_scale)));
    }

    PretrainConfig pcfg;
    pcfg.approx_size = opt.approx_size;
    pcfg.pretrain.iterations = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(pcfg.pretrain.iterations) *
                                                  opt.iteration_scale)));
    std::optional<Dataset> approx;
    if (case_id == 2) {
        CaseSpec aspec = spec;
        aspec.size = opt.approx_size;
        approx = generate_approximate_dataset(aspec, opt.materials);
    }

    // One task per (variant, seed); results land in fixed slots.
    const std::size_t n_tasks = variants.size() * opt.seeds.size();
    std::vector<VariantRow> rows(n_tasks);
    std::vector<std::optional<nn::NetworkModel>> models(n_tasks);
    std::vector<std::optional<nn::NetworkModel>> step2(opt.seeds.size());
    parallel_for(n_tasks, opt.jobs, [&](std::size_t t) {
        const Variant& v = variants[t / opt.seeds.size()];
        const std::size_t si = t % opt.seeds.size();
        const std::uint64_t seed = opt.seeds[si];
        try {
            VariantOutcome o;
            if (v.pretrained) {
                nn::NetworkModel pre = pretrain(*approx, pcfg, seed);
                step2[si] = pre;
                o = finetune(pre, report.dataset, v.training, seed, v.name);
            } else {
                o = train_variant(report.dataset, v, seed);
            }
            rows[t] = detail::row_from(v, o, size);
            models[t] = std::move(o.model);
        } catch (const std::exception& e) {
            rows[t].variant = v.name;
            rows[t].optimizer = v.optimizer_label();
            rows[t].layers = v.hidden_layers;
            rows[t].nodes = v.nodes;
            rows[t].seed = seed;
            rows[t].dataset_size = size;
            rows[t].error = e.what();
        }
    });
    report.rows = rows;

    if (case_id == 2 && step2.front()) {
        // Step II model alone against solver truth over the full exact dataset.
        report.pretrained_only = nn::metrics(report.dataset.data.y,
                                             predict_all(*step2.front(), report.dataset.data));
    }

    if (!opt.size_ladder.empty()) {
        const Variant& v = variants.front();
        const std::size_t n_size_tasks = opt.size_ladder.size() * opt.seeds.size();
        std::vector<VariantRow> size_rows(n_size_tasks);
        parallel_for(n_size_tasks, opt.jobs, [&](std::size_t t) {
            const std::size_t n = opt.size_ladder[t / opt.seeds.size()];
            const std::uint64_t seed = opt.seeds[t % opt.seeds.size()];
            try {
                size_rows[t] = detail::row_from(v, train_variant(detail::head(full, n), v, seed), n);
            } catch (const std::exception& e) {
                size_rows[t].variant = v.name;
                size_rows[t].seed = seed;
                size_rows[t].dataset_size = n;
                size_rows[t].error = e.what();
            }
        });
        report.size_rows = std::move(size_rows);
    }

    if (opt.sweeps) {
        const auto names = detail::sweep_variants(case_id);
        if (!names.empty()) {
            const Range range = default_sweep_range(case_id);
            const auto rows_in = sweep_rows(spec, "heating_rate", range, default_sweep_fixed_values(case_id),
                                            opt.sweep_points);
            const auto truth = sweep_truth(spec, rows_in, opt.jobs, opt.materials);
            const Range training = spec.inputs[spec.column("heating_rate")].range;
            const std::size_t hr = spec.column("heating_rate");
            for (std::size_t t = 0; t < n_tasks; ++t) {
                const Variant& v = variants[t / opt.seeds.size()];
                if (!models[t] || std::find(names.begin(), names.end(), v.name) == names.end()) continue;
                SweepCurve c;
                c.variant = v.name;
                c.seed = rows[t].seed;
                for (std::size_t i = 0; i < rows_in.size(); ++i) {
                    c.points.push_back({rows_in[i][hr],
                                        nn::predict(*models[t], feature_row(spec, v.recipe, rows_in[i]))[0],
                                        truth[i]});
                }
                c.out_of_training_max_deviation = sweep_max_deviation(c.points, training, false);
                c.in_training_max_deviation = sweep_max_deviation(c.points, training, true);
                report.sweeps.push_back(std::move(c));
            }
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// CSV files

namespace detail {
inline std::string fmt(double v, int digits = 17) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

/// Shortest %g form that parses back to the same double.
inline std::string shortest(double v) {
    for (int digits = 1; digits < 17; ++digits) {
        const std::string s = fmt(v, digits);
        if (std::stod(s) == v) return s;
    }
    return fmt(v, 17);
}

inline std::string unit_of(const std::string& column) {
    if (column == "part_thickness" || column == "tool_thickness") return "m";
    if (column == "h" || column == "h_top" || column == "h_bottom") return "W/(m^2 K)";
    if (column == "heating_rate") return "K/s";
    return "K";
}
}  // namespace detail

/// Dataset CSV: provenance comment, units comment, header, rows at full precision.
inline void write_dataset_csv(std::ostream& out, const Dataset& ds) {
    out << "# case=" << ds.spec.case_id << " seed=" << ds.spec.seed
        << " solver_dx=" << detail::shortest(ds.spec.solver_dx)
        << " solver_dt=" << detail::shortest(ds.spec.solver_dt);
    if (ds.approximate_labels) out << " labels=closed_form";
    out << '\n' << "# units:";
    for (const auto& n : ds.feature_names) out << ' ' << n << '[' << detail::unit_of(n) << ']';
    out << ' ' << ds.target_name << "[K]\n";
    for (const auto& n : ds.feature_names) out << n << ',';
    out << ds.target_name << '\n';
    for (std::size_t i = 0; i < ds.size(); ++i) {
        for (double v : ds.data.row(i)) out << detail::fmt(v) << ',';
        out << detail::fmt(ds.data.y[i]) << '\n';
    }
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_dataset_csv(out, ds);
}

inline Dataset read_dataset_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("# ", 0) != 0) {
        throw ParseError("dataset: missing '# case=... seed=...' header line");
    }
    std::map<std::string, std::string> meta;
    {
        std::istringstream ss(line.substr(2));
        std::string tok;
        while (ss >> tok) {
            const auto eq = tok.find('=');
            if (eq != std::string::npos) meta[tok.substr(0, eq)] = tok.substr(eq + 1);
        }
    }
    if (!meta.count("case") || !meta.count("seed")) {
        throw ParseError("dataset: header must carry case= and seed=");
    }
    Dataset ds;
    try {
        ds.spec = case_spec(std::stoi(meta["case"]), 1, std::stoull(meta["seed"]));
        if (meta.count("solver_dx")) ds.spec.solver_dx = std::stod(meta["solver_dx"]);
        if (meta.count("solver_dt")) ds.spec.solver_dt = std::stod(meta["solver_dt"]);
    } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("dataset: bad header: ") + e.what());
    }
    ds.approximate_labels = meta.count("labels") && meta["labels"] == "closed_form";
    while (std::getline(in, line) && line.rfind("#", 0) == 0) {
    }
    std::vector<std::string> columns;
    {
        std::istringstream ss(line);
        std::string col;
        while (std::getline(ss, col, ',')) columns.push_back(col);
    }
    if (columns.size() < 2) {
        throw ParseError("dataset: missing column header");
    }
    ds.target_name = columns.back();
    columns.pop_back();
    if (columns != ds.spec.input_names()) {
        throw ParseError("dataset: columns do not match case " + std::to_string(ds.spec.case_id));
    }
    ds.feature_names = columns;
    ds.data.cols = columns.size();
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::vector<double> values;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                values.push_back(std::stod(cell, &used));
                if (used != cell.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ParseError("dataset: bad number '" + cell + "' on data row " + std::to_string(line_no));
            }
        }
        if (values.size() != ds.data.cols + 1) {
            throw ParseError("dataset: wrong column count on data row " + std::to_string(line_no));
        }
        ds.data.y.push_back(values.back());
        values.pop_back();
        ds.data.x.insert(ds.data.x.end(), values.begin(), values.end());
    }
    ds.spec.size = ds.data.y.size();
    if (ds.spec.size == 0) {
        throw ParseError("dataset: no rows");
    }
    return ds;
}

inline Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("dataset not found: " + path.string());
    return read_dataset_csv(in);
}

inline void write_report_csv(std::ostream& out, const std::vector<VariantRow>& rows) {
    out << "variant,optimizer,layers,nodes,seed,dataset_size,train_rmse,train_nrmse,train_max_error,"
           "val_rmse,val_nrmse,val_max_error,accepted,error\n";
    for (const auto& r : rows) {
        out << r.variant << ',' << r.optimizer << ',' << r.layers << ',' << r.nodes << ',' << r.seed << ','
            << r.dataset_size << ',' << detail::fmt(r.train.rmse, 9) << ',' << detail::fmt(r.train.nrmse, 9)
            << ',' << detail::fmt(r.train.max_error, 9) << ',' << detail::fmt(r.val.rmse, 9) << ','
            << detail::fmt(r.val.nrmse, 9) << ',' << detail::fmt(r.val.max_error, 9) << ','
            << (r.accepted ? "accept" : "reject") << ',' << r.error << '\n';
    }
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& sweep) {
    out << "swept_value,prediction,solver_truth\n";
    for (const auto& p : sweep) {
        out << detail::fmt(p.value, 9) << ',' << detail::fmt(p.prediction, 9) << ','
            << detail::fmt(p.truth, 9) << '\n';
    }
}

}  // namespace tgml::pipeline
