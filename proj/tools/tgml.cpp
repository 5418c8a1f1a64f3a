// tgml: solver runs, dataset generation, surrogate training and case studies.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or config error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "tgml/config.hpp"
#include "tgml/pipeline.hpp"

namespace fs = std::filesystem;
using namespace tgml;

namespace {

constexpr double kCelsiusOffset = 273.15;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::uint64_t default_seed() {
    if (const char* env = std::getenv("TGML_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError(std::string("TGML_SEED is not an unsigned integer: ") + env);
        }
    }
    return 42;
}

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path());
    }
    std::ofstream out(path);
    if (!out) {
        throw UsageError("cannot write " + path.string());
    }
    return out;
}

void print_report(std::ostream& os, const char* label, const nn::EvalReport& r) {
    os << label << ": rmse=" << r.rmse << " K nrmse=" << r.nrmse << " max_error=" << r.max_error
       << " K n=" << r.n << '\n';
}

void write_eval_csv(std::ostream& out, const std::vector<std::pair<std::string, nn::EvalReport>>& rows) {
    out << "partition,n,rmse,nrmse,max_error\n";
    for (const auto& [name, r] : rows) {
        out << name << ',' << r.n << ',' << pipeline::detail::fmt(r.rmse, 9) << ','
            << pipeline::detail::fmt(r.nrmse, 9) << ',' << pipeline::detail::fmt(r.max_error, 9) << '\n';
    }
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string out = "out/simulate";
    std::optional<double> heating_rate_c_min;
    std::optional<double> hold_temperature_c;
};

int cmd_simulate(const SimulateArgs& a) {
    ConfigFile cfg = load_config(a.config);
    if (!cfg.scenario) {
        throw ParseError("config " + a.config + ": no scenario section");
    }
    Scenario s = *cfg.scenario;
    if (a.heating_rate_c_min) s.cycle.heating_rate = *a.heating_rate_c_min / 60.0;
    if (a.hold_temperature_c) s.cycle.hold_temperature = *a.hold_temperature_c + kCelsiusOffset;
    validate(s);
    const SimulationResult r = simulate(s, cfg.solver);

    const fs::path dir(a.out);
    auto hist = open_out(dir / "history.csv");
    write_history_csv(hist, r);
    auto kpi = open_out(dir / "kpis.csv");
    kpi << "kpi,value,unit\n"
        << "steady_state_lag," << pipeline::detail::fmt(r.kpis.steady_state_lag, 9) << ",K\n"
        << "max_transient_lag," << pipeline::detail::fmt(r.kpis.max_transient_lag, 9) << ",K\n"
        << "exotherm," << pipeline::detail::fmt(r.kpis.exotherm, 9) << ",K\n"
        << "final_min_part_cure," << pipeline::detail::fmt(r.final_min_part_cure(), 9) << ",-\n"
        << "energy_imbalance," << pipeline::detail::fmt(r.energy.imbalance(), 9) << ",J/m^2\n";

    std::cout << "steady_state_lag  " << r.kpis.steady_state_lag << " K"
              << (r.kpis.steady_state_reached ? "" : " (not steady)") << '\n'
              << "max_transient_lag " << r.kpis.max_transient_lag << " K\n"
              << "exotherm          " << r.kpis.exotherm << " K\n"
              << "final min cure    " << r.final_min_part_cure() << '\n'
              << "wrote " << (dir / "history.csv").string() << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct GenArgs {
    int case_id = 0;
    std::size_t size = 1000;
    std::optional<std::uint64_t> seed;
    std::string out;
    bool approx = false;
    double dx = pipeline::kDatasetDx;
    double dt = pipeline::kDatasetDt;
};

int cmd_gen(const GenArgs& a, unsigned jobs) {
    pipeline::CaseSpec spec = pipeline::case_spec(a.case_id, a.size, a.seed.value_or(default_seed()));
    spec.solver_dx = a.dx;
    spec.solver_dt = a.dt;
    const pipeline::Dataset ds =
        a.approx ? pipeline::generate_approximate_dataset(spec) : pipeline::generate_dataset(spec, jobs);
    auto out = open_out(a.out);
    pipeline::write_dataset_csv(out, ds);
    std::cout << "wrote " << ds.size() << " rows to " << a.out << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string dataset;
    std::string arch = "3x5";
    std::string activation = "relu";
    std::string optimizer = "gd";
    double lr = 0.001;
    std::size_t iters = 50000;
    std::size_t batch = 50;
    std::string features = "raw";
    std::string reg = "none";
    double reg_strength = 0.001;
    std::string loss = "mse";
    std::string init = "xavier";
    std::optional<std::uint64_t> seed;
    std::string pretrain_dataset;
    std::size_t pretrain_iters = 100000;
    std::string out_model = "model.json";
    std::string report;
};

int cmd_train(const TrainArgs& a) {
    const std::uint64_t seed = a.seed.value_or(default_seed());
    const pipeline::Dataset ds = pipeline::load_dataset(a.dataset);
    const pipeline::Recipe recipe = pipeline::parse_recipe(a.features);

    nn::TrainingConfig tc;
    tc.optimizer = {nn::parse_optimizer(a.optimizer), a.lr, nn::parse_regularization(a.reg),
                    a.reg == "none" ? 0.0 : a.reg_strength};
    tc.iterations = a.iters;
    tc.batch_size = a.batch;
    tc.loss = nn::parse_loss(a.loss);
    tc.initializer = nn::parse_initializer(a.init);
    tc.seed = seed;
    nn::validate(tc);

    pipeline::VariantOutcome o;
    if (!a.pretrain_dataset.empty()) {
        if (recipe != pipeline::Recipe::Raw) {
            throw std::invalid_argument("pre-training uses raw features");
        }
        const pipeline::Dataset approx = pipeline::load_dataset(a.pretrain_dataset);
        if (approx.spec.case_id != ds.spec.case_id) {
            throw std::invalid_argument("pre-training dataset is for a different case");
        }
        pipeline::PretrainConfig pc;
        const auto sizes = nn::parse_architecture(a.arch, ds.data.cols);
        pc.hidden_layers = sizes.size() - 2;
        pc.nodes = sizes[1];
        pc.pretrain.iterations = a.pretrain_iters;
        pc.pretrain.batch_size = a.batch;
        const nn::NetworkModel pre = pipeline::pretrain(approx, pc, seed);
        o = pipeline::finetune(pre, ds, tc, seed, "pretrained");
    } else {
        if (tc.initializer == nn::Initializer::Pretrained) {
            throw std::invalid_argument("--init pretrained requires --pretrain-dataset");
        }
        const auto sizes = nn::parse_architecture(a.arch, 1);
        pipeline::Variant v;
        v.name = "trained";
        v.hidden_layers = sizes.size() - 2;
        v.nodes = sizes[1];
        v.activation = nn::parse_activation(a.activation);
        v.recipe = recipe;
        v.training = tc;
        o = pipeline::train_variant(ds, v, seed);
    }
    if (fs::path(a.out_model).has_parent_path()) {
        fs::create_directories(fs::path(a.out_model).parent_path());
    }
    nn::save_model(o.model, a.out_model);
    print_report(std::cout, "train", o.train_report);
    print_report(std::cout, "validation", o.val_report);
    std::cout << "overfit check: " << (o.accepted ? "accept" : "reject") << " (val - train nrmse = "
              << o.val_report.nrmse - o.train_report.nrmse << ")\n"
              << "wrote " << a.out_model << '\n';
    if (!a.report.empty()) {
        auto out = open_out(a.report);
        write_eval_csv(out, {{"train", o.train_report}, {"validation", o.val_report}});
    }
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_eval(const std::string& model_path, const std::string& dataset_path, const std::string& report) {
    const nn::NetworkModel model = nn::load_model(model_path);
    const pipeline::Dataset ds = pipeline::load_dataset(dataset_path);
    const auto [case_id, recipe] = pipeline::parse_recipe_tags(model.feature_recipe);
    if (case_id != ds.spec.case_id) {
        throw std::invalid_argument("model is for case " + std::to_string(case_id) + ", dataset for case " +
                                    std::to_string(ds.spec.case_id));
    }
    const nn::Samples features = pipeline::apply_features(ds, recipe);
    if (features.cols != model.input_size()) {
        throw std::invalid_argument("dataset features do not match the model inputs");
    }
    const auto r = nn::metrics(features.y, pipeline::predict_all(model, features));
    print_report(std::cout, "eval", r);
    if (!report.empty()) {
        auto out = open_out(report);
        write_eval_csv(out, {{"all", r}});
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string model;
    std::string variable = "heating_rate";
    std::optional<double> from;
    std::optional<double> to;
    std::size_t points = 40;
    std::vector<std::string> fixed;
    std::string out = "sweep.csv";
};

int cmd_sweep(const SweepArgs& a, unsigned jobs) {
    const nn::NetworkModel model = nn::load_model(a.model);
    const int case_id = pipeline::parse_recipe_tags(model.feature_recipe).first;
    const pipeline::CaseSpec spec = pipeline::case_spec(case_id, 1, 0);
    spec.column(a.variable);

    auto fixed = pipeline::default_sweep_fixed_values(case_id);
    for (const auto& kv : a.fixed) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            throw UsageError("--fixed expects name=value, got '" + kv + "'");
        }
        const std::string name = kv.substr(0, eq);
        spec.column(name);
        fixed[name] = std::stod(kv.substr(eq + 1));
    }
    // Heating-rate bounds are given in C/min, everything else in SI.
    const double unit = a.variable == "heating_rate" ? 1.0 / 60.0 : 1.0;
    pipeline::Range range = a.variable == "heating_rate" ? pipeline::default_sweep_range(case_id)
                                                         : spec.inputs[spec.column(a.variable)].range;
    if (a.from) range.min = *a.from * unit;
    if (a.to) range.max = *a.to * unit;
    if (!(range.max > range.min)) {
        throw UsageError("sweep range must satisfy from < to");
    }
    const auto curve = pipeline::sweep_extrapolation(model, spec, a.variable, range, fixed, a.points, jobs);
    auto out = open_out(a.out);
    pipeline::write_sweep_csv(out, curve);
    const auto training = spec.inputs[spec.column(a.variable)].range;
    std::cout << "max |prediction - solver| outside training range: "
              << pipeline::sweep_max_deviation(curve, training, false) << " K\n"
              << "max |prediction - solver| inside training range:  "
              << pipeline::sweep_max_deviation(curve, training, true) << " K\n"
              << "wrote " << a.out << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_bench(const std::string& model_path, std::size_t n, const std::string& report) {
    const nn::NetworkModel model = nn::load_model(model_path);
    const int case_id = pipeline::parse_recipe_tags(model.feature_recipe).first;
    const pipeline::CaseSpec spec = pipeline::case_spec(case_id, 1, 0);
    const auto fixed = pipeline::default_sweep_fixed_values(case_id);
    std::vector<double> row(spec.inputs.size());
    for (std::size_t c = 0; c < row.size(); ++c) {
        row[c] = spec.inputs[c].name == "heating_rate" ? 2.0 / 60.0 : fixed.at(spec.inputs[c].name);
    }
    Scenario reference = pipeline::scenario_for(spec, row);
    if (case_id == 1) {
        // Full standard cycle on the tool slab.
        reference.cycle = ThermalCycle{};
    }
    const auto r = pipeline::benchmark(model, reference, row, n);
    std::cout << "surrogate: " << r.predictions << " predictions in " << r.surrogate_seconds << " s\n"
              << "solver:    one full-cycle run in " << r.solver_seconds << " s\n"
              << "speedup:   " << r.speedup << "x\n";
    if (!report.empty()) {
        auto out = open_out(report);
        out << "predictions,surrogate_seconds,solver_seconds,speedup\n"
            << r.predictions << ',' << pipeline::detail::fmt(r.surrogate_seconds, 9) << ','
            << pipeline::detail::fmt(r.solver_seconds, 9) << ',' << pipeline::detail::fmt(r.speedup, 9) << '\n';
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct CaseArgs {
    int case_id = 0;
    std::string out = "out/case";
    std::size_t size = 0;
    std::size_t seeds = 5;
    std::optional<std::uint64_t> seed;
    double iteration_scale = 1.0;
    std::vector<std::size_t> size_ladder;
    std::size_t approx_size = 8000;
    bool no_sweeps = false;
};

int cmd_case(const CaseArgs& a, unsigned jobs) {
    pipeline::CaseStudyOptions opt;
    const std::uint64_t base = a.seed.value_or(default_seed());
    opt.dataset_seed = base;
    opt.seeds.clear();
    for (std::size_t k = 0; k < a.seeds; ++k) opt.seeds.push_back(base + k);
    opt.dataset_size = a.size;
    opt.iteration_scale = a.iteration_scale;
    opt.size_ladder = a.size_ladder;
    opt.approx_size = a.approx_size;
    opt.sweeps = !a.no_sweeps;
    opt.jobs = jobs;
    // Validates the case id before the long run starts.
    pipeline::case_spec(a.case_id, 1, 0);

    const pipeline::CaseReport r = pipeline::run_case_study(a.case_id, opt);
    const fs::path dir(a.out);
    {
        auto out = open_out(dir / "dataset.csv");
        pipeline::write_dataset_csv(out, r.dataset);
    }
    {
        auto out = open_out(dir / "report.csv");
        pipeline::write_report_csv(out, r.rows);
    }
    if (!r.size_rows.empty()) {
        auto out = open_out(dir / "size_curve.csv");
        pipeline::write_report_csv(out, r.size_rows);
    }
    for (const auto& s : r.sweeps) {
        auto out = open_out(dir / ("sweep_" + s.variant + "_seed" + std::to_string(s.seed) + ".csv"));
        pipeline::write_sweep_csv(out, s.points);
    }

    std::cout << "case " << a.case_id << ": " << r.dataset.size() << " rows, " << opt.seeds.size()
              << " seeds\n";
    std::cout << "variant                        median val rmse  median val max error\n";
    for (const auto& v : pipeline::case_variants(a.case_id)) {
        char line[160];
        try {
            std::snprintf(line, sizeof line, "%-30s %12.4f K %16.4f K", v.name.c_str(),
                          r.median(v.name, &nn::EvalReport::rmse), r.median(v.name, &nn::EvalReport::max_error));
        } catch (const std::runtime_error&) {
            std::snprintf(line, sizeof line, "%-30s failed", v.name.c_str());
        }
        std::cout << line << '\n';
    }
    for (const auto& row : r.rows) {
        if (!row.error.empty()) {
            std::cerr << "variant " << row.variant << " seed " << row.seed << " failed: " << row.error << '\n';
        }
    }
    if (r.pretrained_only) {
        std::cout << "pre-trained model alone, max error vs solver: " << r.pretrained_only->max_error << " K\n";
    }
    std::cout << "wrote " << (dir / "report.csv").string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Thermal lag and exotherm surrogates for composite cure cycles"};
    app.require_subcommand(1);
    unsigned jobs = 0;
    bool verbose = false;
    app.add_option("--jobs,-j", jobs, "Worker threads (0 = all cores)");
    app.add_flag("--verbose,-v", verbose, "Print progress details");

    SimulateArgs sim;
    auto* c_sim = app.add_subcommand("simulate", "Run one cure-cycle simulation");
    c_sim->add_option("--config", sim.config, "Scenario config (JSON)")->required();
    c_sim->add_option("--out", sim.out, "Output directory");
    c_sim->add_option("--heating-rate", sim.heating_rate_c_min, "Override heating rate [C/min]");
    c_sim->add_option("--hold-temp", sim.hold_temperature_c, "Override hold temperature [C]");

    GenArgs gen;
    auto* c_gen = app.add_subcommand("gen", "Generate a solver-labelled dataset");
    c_gen->add_option("--case", gen.case_id, "Case study 1, 2 or 3")->required()->check(CLI::Range(1, 3));
    c_gen->add_option("--size", gen.size, "Number of rows")->check(CLI::PositiveNumber);
    c_gen->add_option("--seed", gen.seed, "RNG seed (default $TGML_SEED or 42)");
    c_gen->add_option("--out", gen.out, "Dataset CSV")->required();
    c_gen->add_flag("--approx", gen.approx, "Label with the closed-form approximation (case 2)");
    c_gen->add_option("--dx", gen.dx, "Solver mesh spacing [m]")->check(CLI::PositiveNumber);
    c_gen->add_option("--dt", gen.dt, "Solver time step [s]")->check(CLI::PositiveNumber);

    TrainArgs tr;
    auto* c_train = app.add_subcommand("train", "Train a surrogate on a dataset");
    c_train->add_option("--dataset", tr.dataset, "Dataset CSV")->required();
    c_train->add_option("--arch", tr.arch, "Hidden layers x nodes, e.g. 3x5");
    c_train->add_option("--activation", tr.activation, "relu | tanh | sigmoid");
    c_train->add_option("--optimizer", tr.optimizer, "gd | adagrad | pag | adam");
    c_train->add_option("--lr", tr.lr, "Learning rate")->check(CLI::PositiveNumber);
    c_train->add_option("--iters", tr.iters, "Mini-batch iterations");
    c_train->add_option("--batch", tr.batch, "Batch size")->check(CLI::PositiveNumber);
    c_train->add_option("--features", tr.features, "raw | nondimensional | hr_transform");
    c_train->add_option("--reg", tr.reg, "none | lasso | ridge");
    c_train->add_option("--reg-strength", tr.reg_strength, "Regularization strength");
    c_train->add_option("--loss", tr.loss, "mse | mae");
    c_train->add_option("--init", tr.init, "xavier | he | random_normal");
    c_train->add_option("--seed", tr.seed, "RNG seed (default $TGML_SEED or 42)");
    c_train->add_option("--pretrain-dataset", tr.pretrain_dataset, "Approximate-label dataset for pre-training");
    c_train->add_option("--pretrain-iters", tr.pretrain_iters, "Pre-training iterations");
    c_train->add_option("--out-model", tr.out_model, "Model file (JSON)");
    c_train->add_option("--report", tr.report, "Evaluation CSV");

    std::string ev_model, ev_dataset, ev_report;
    auto* c_eval = app.add_subcommand("eval", "Evaluate a model on a dataset");
    c_eval->add_option("--model", ev_model, "Model file")->required();
    c_eval->add_option("--dataset", ev_dataset, "Dataset CSV")->required();
    c_eval->add_option("--report", ev_report, "Evaluation CSV");

    SweepArgs sw;
    auto* c_sweep = app.add_subcommand("sweep", "Compare model and solver along one input");
    c_sweep->add_option("--model", sw.model, "Model file")->required();
    c_sweep->add_option("--variable", sw.variable, "Swept input column");
    c_sweep->add_option("--from", sw.from, "Sweep start (C/min for heating_rate, SI otherwise)");
    c_sweep->add_option("--to", sw.to, "Sweep end (C/min for heating_rate, SI otherwise)");
    c_sweep->add_option("--points", sw.points, "Number of points")->check(CLI::Range(2, 100000));
    c_sweep->add_option("--fixed", sw.fixed, "Fixed input name=value (SI), repeatable");
    c_sweep->add_option("--out", sw.out, "Curve CSV");

    std::string b_model, b_report;
    std::size_t b_n = 100000;
    auto* c_bench = app.add_subcommand("bench", "Time surrogate inference against the solver");
    c_bench->add_option("--model", b_model, "Model file")->required();
    c_bench->add_option("--n", b_n, "Number of surrogate predictions");
    c_bench->add_option("--report", b_report, "Timing CSV");

    CaseArgs cs;
    auto* c_case = app.add_subcommand("case", "Run the full variant matrix of a case study");
    c_case->add_option("--case", cs.case_id, "Case study 1, 2 or 3")->required()->check(CLI::Range(1, 3));
    c_case->add_option("--out", cs.out, "Output directory");
    c_case->add_option("--size", cs.size, "Dataset size (default: 10000, 300, 5000)");
    c_case->add_option("--seeds", cs.seeds, "Number of training seeds")->check(CLI::PositiveNumber);
    c_case->add_option("--seed", cs.seed, "Base seed (default $TGML_SEED or 42)");
    c_case->add_option("--iteration-scale", cs.iteration_scale, "Multiply every iteration budget")
        ->check(CLI::PositiveNumber);
    c_case->add_option("--size-ladder", cs.size_ladder, "Dataset sizes for the error-vs-size curve")
        ->delimiter(',');
    c_case->add_option("--approx-size", cs.approx_size, "Approximate rows for pre-training (case 2)");
    c_case->add_flag("--no-sweeps", cs.no_sweeps, "Skip extrapolation sweeps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verbose) {
            std::cerr << "jobs=" << (jobs ? std::to_string(jobs) : std::string("auto")) << '\n';
        }
        if (*c_sim) return cmd_simulate(sim);
        if (*c_gen) return cmd_gen(gen, jobs);
        if (*c_train) return cmd_train(tr);
        if (*c_eval) return cmd_eval(ev_model, ev_dataset, ev_report);
        if (*c_sweep) return cmd_sweep(sw, jobs);
        if (*c_bench) return cmd_bench(b_model, b_n, b_report);
        if (*c_case) return cmd_case(cs, jobs);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
