#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "tgml/neural.hpp"

using namespace tgml;
using namespace tgml::nn;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("tgml_neural_" + name);
}

Samples line_samples(std::size_t n, std::uint64_t seed, double slope) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Samples s;
    s.cols = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = u(rng);
        s.x.push_back(x);
        s.y.push_back(slope * x);
    }
    return s;
}

NetworkModel with_identity_norm(NetworkModel net) {
    net.input_norm = NormStats(std::vector<double>(net.input_size(), -1.0), std::vector<double>(net.input_size(), 1.0));
    net.output_norm = NormStats({-1.0}, {1.0});
    return net;
}

}  // namespace

// ---------------------------------------------------------------- normalization

TEST(Normalize, EndpointsAndMidpoint) {
    const NormStats s({2.0, -5.0}, {6.0, 5.0});
    EXPECT_EQ(s.normalize(2.0, 0), -1.0);
    EXPECT_EQ(s.normalize(6.0, 0), 1.0);
    EXPECT_EQ(s.normalize(4.0, 0), 0.0);
    EXPECT_EQ(s.normalize(0.0, 1), 0.0);
}

TEST(Normalize, RoundTrip) {
    const NormStats s({0.002, 20.0, 0.0166}, {0.02, 100.0, 0.0833});
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> x{0.002 + 0.018 * u(rng), 20.0 + 80.0 * u(rng), 0.0166 + 0.0667 * u(rng)};
        const auto back = denormalize(normalize(x, s), s);
        for (std::size_t j = 0; j < x.size(); ++j) EXPECT_NEAR(back[j], x[j], 1e-12 * std::max(1.0, std::abs(x[j])));
    }
}

TEST(Normalize, DegenerateFeatureRejected) {
    EXPECT_THROW(NormStats({1.0}, {1.0}), std::invalid_argument);
    const std::vector<double> rows{1.0, 3.0, 1.0, 4.0};
    EXPECT_THROW(NormStats::from_rows(rows, 2), std::invalid_argument);
}

// ---------------------------------------------------------------- activations

TEST(Activation, Values) {
    EXPECT_EQ(activation(-1.0, Activation::ReLU), 0.0);
    EXPECT_EQ(activation(2.0, Activation::ReLU), 2.0);
    EXPECT_EQ(activation(0.0, Activation::Tanh), 0.0);
    EXPECT_EQ(activation_grad(0.0, Activation::Tanh), 1.0);
    // (e - 1/e) / (e + 1/e), evaluated offline
    EXPECT_NEAR(activation(1.0, Activation::Tanh), 0.7615941559557649, 1e-15);
    EXPECT_EQ(activation(0.0, Activation::Sigmoid), 0.5);
}

TEST(Activation, DerivativesMatchDifferences) {
    for (Activation a : {Activation::ReLU, Activation::Tanh, Activation::Sigmoid}) {
        for (double z = -3.05; z < 3.0; z += 0.1) {
            const double fd = (activation(z + 1e-6, a) - activation(z - 1e-6, a)) / 2e-6;
            EXPECT_NEAR(activation_grad(z, a), fd, 1e-8);
        }
    }
}

TEST(Activation, ParseRoundTrip) {
    for (Activation a : {Activation::ReLU, Activation::Tanh, Activation::Sigmoid}) {
        EXPECT_EQ(parse_activation(to_string(a)), a);
    }
    EXPECT_THROW(parse_activation("softplus"), std::invalid_argument);
}

// ---------------------------------------------------------------- forward

TEST(Forward, ZeroParametersGiveZero) {
    NetworkModel net({3, 4, 4, 1}, Activation::Sigmoid);
    EXPECT_EQ(forward(net, std::vector<double>{0.3, -0.2, 0.9})[0], 0.0);
}

TEST(Forward, SingleUnitTanh) {
    NetworkModel net({1, 1, 1}, Activation::Tanh);
    net.weight(0, 0, 0) = 1.0;
    net.weight(1, 0, 0) = 1.0;
    for (double x : {-2.0, -0.5, 0.0, 0.7, 3.0}) EXPECT_EQ(forward(net, std::vector<double>{x})[0], std::tanh(x));
}

TEST(Forward, MatchesMatrixOracle) {
    std::mt19937_64 rng(21);
    for (Activation a : {Activation::ReLU, Activation::Tanh, Activation::Sigmoid}) {
        for (int k = 0; k < 20; ++k) {
            const auto c = oracle::random_gradient_case(rng, a);
            for (std::size_t i = 0; i < c.data.size(); ++i) {
                const auto r = c.data.row(i);
                EXPECT_NEAR(forward(c.net, r)[0], oracle::forward(c.net, std::vector<double>(r.begin(), r.end())), 1e-12);
            }
        }
    }
}

TEST(Forward, ShapeMismatchThrows) {
    NetworkModel net({2, 3, 1}, Activation::ReLU);
    EXPECT_THROW(forward(net, std::vector<double>{1.0}), std::invalid_argument);
}

// ---------------------------------------------------------------- loss and gradient

TEST(LossGradient, PerfectFitHasZeroLossAndGradient) {
    NetworkModel net({2, 3, 1}, Activation::Tanh);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& p : net.params) p = u(rng);
    Samples s;
    s.cols = 2;
    for (int i = 0; i < 5; ++i) {
        s.x.push_back(u(rng));
        s.x.push_back(u(rng));
        s.y.push_back(forward(net, s.row(static_cast<std::size_t>(i)))[0]);
    }
    const auto lg = loss_and_grad(net, s, Loss::MSE);
    EXPECT_EQ(lg.loss, 0.0);
    for (double g : lg.grad) EXPECT_EQ(g, 0.0);
}

TEST(LossGradient, ThreeFourOneMatchesFiniteDifferences) {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    NetworkModel net({3, 4, 1}, Activation::Tanh);
    for (double& p : net.params) p = u(rng);
    Samples s;
    s.cols = 3;
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 3; ++j) s.x.push_back(u(rng));
        s.y.push_back(u(rng) + 2.0);
    }
    for (Loss loss : {Loss::MSE, Loss::MAE}) {
        const auto lg = loss_and_grad(net, s, loss);
        EXPECT_NEAR(lg.loss, oracle::mean_loss(net, s, loss), 1e-12);
        EXPECT_LT(oracle::relative_error(lg.grad, oracle::fd_gradient(net, s, loss)), 1e-6);
    }
}

TEST(LossGradient, RandomNetsAllActivationsAndLosses) {
    std::mt19937_64 rng(77);
    for (Activation a : {Activation::ReLU, Activation::Tanh, Activation::Sigmoid}) {
        for (Loss loss : {Loss::MSE, Loss::MAE}) {
            for (int k = 0; k < 10; ++k) {
                const auto c = oracle::random_gradient_case(rng, a);
                const auto lg = loss_and_grad(c.net, c.data, loss);
                EXPECT_LT(oracle::relative_error(lg.grad, oracle::fd_gradient(c.net, c.data, loss)), 1e-6)
                    << to_string(a) << (loss == Loss::MSE ? " mse" : " mae");
            }
        }
    }
}

TEST(LossGradient, MseScalesQuadratically) {
    NetworkModel net({1, 2, 1}, Activation::ReLU);  // predicts 0
    Samples a = line_samples(30, 4, 1.5);
    Samples b = a;
    for (double& y : b.y) y *= 3.0;
    EXPECT_NEAR(loss_and_grad(net, b, Loss::MSE).loss, 9.0 * loss_and_grad(net, a, Loss::MSE).loss, 1e-12);
}

TEST(LossGradient, EmptyBatchThrows) {
    NetworkModel net({1, 2, 1}, Activation::ReLU);
    Samples s;
    s.cols = 1;
    EXPECT_THROW(loss_and_grad(net, s, Loss::MSE), std::invalid_argument);
}

// ---------------------------------------------------------------- optimizers

TEST(Optimizer, ZeroGradientLeavesParameters) {
    for (OptimizerKind k : {OptimizerKind::GD, OptimizerKind::Adagrad, OptimizerKind::ProximalAdagrad, OptimizerKind::Adam}) {
        std::vector<double> p{0.3, -1.2, 4.0};
        const auto before = p;
        const std::vector<double> g(3, 0.0);
        auto state = OptimizerState::for_parameters(3, k);
        optimizer_step(p, g, state, {k, 0.1, Regularization::None, 0.0});
        EXPECT_EQ(p, before);
    }
}

TEST(Optimizer, GradientDescentArithmetic) {
    std::vector<double> p{1.0};
    const std::vector<double> g{2.0};
    auto state = OptimizerState::for_parameters(1, OptimizerKind::GD);
    optimizer_step(p, g, state, {OptimizerKind::GD, 0.1, Regularization::None, 0.0});
    EXPECT_NEAR(p[0], 0.8, 1e-15);
}

TEST(Optimizer, AdagradStep) {
    std::vector<double> p{1.0};
    const std::vector<double> g{2.0};
    auto state = OptimizerState::for_parameters(1, OptimizerKind::Adagrad);
    optimizer_step(p, g, state, {OptimizerKind::Adagrad, 0.1, Regularization::None, 0.0});
    EXPECT_NEAR(p[0], 1.0 - 0.1 * 2.0 / std::sqrt(0.1 + 4.0 + 1e-8), 1e-15);
}

TEST(Optimizer, LassoKillZoneIsExactZero) {
    std::vector<double> p{0.05, -0.05, 2.0};
    const std::vector<double> g{0.0, 0.0, 0.0};
    auto state = OptimizerState::for_parameters(3, OptimizerKind::ProximalAdagrad);
    // threshold = strength * lr / sqrt(0.1) = 0.1 * 1 / 0.316 > 0.05
    optimizer_step(p, g, state, {OptimizerKind::ProximalAdagrad, 1.0, Regularization::Lasso, 0.1});
    EXPECT_EQ(p[0], 0.0);
    EXPECT_EQ(p[1], 0.0);
    EXPECT_NEAR(p[2], 2.0 - 0.1 / std::sqrt(0.1 + 1e-8), 1e-12);
}

TEST(Optimizer, RidgeShrinks) {
    std::vector<double> p{2.0};
    const std::vector<double> g{0.0};
    auto state = OptimizerState::for_parameters(1, OptimizerKind::ProximalAdagrad);
    optimizer_step(p, g, state, {OptimizerKind::ProximalAdagrad, 0.5, Regularization::Ridge, 0.2});
    const double step = 0.5 / std::sqrt(0.1 + 1e-8);
    EXPECT_NEAR(p[0], 2.0 / (1.0 + 0.2 * step), 1e-12);
}

TEST(Optimizer, AdamFirstStepMovesByLearningRate) {
    std::vector<double> p{1.0, 1.0};
    const std::vector<double> g{3.0, -0.5};
    auto state = OptimizerState::for_parameters(2, OptimizerKind::Adam);
    optimizer_step(p, g, state, {OptimizerKind::Adam, 0.01, Regularization::None, 0.0});
    EXPECT_NEAR(p[0], 0.99, 1e-8);
    EXPECT_NEAR(p[1], 1.01, 1e-8);
}

TEST(Optimizer, RegularizationOnlyWithProximalOrGd) {
    EXPECT_THROW(validate(OptimizerConfig{OptimizerKind::Adam, 0.01, Regularization::Lasso, 0.001}),
                 std::invalid_argument);
    EXPECT_THROW(validate(OptimizerConfig{OptimizerKind::GD, 0.0, Regularization::None, 0.0}),
                 std::invalid_argument);
}

// ---------------------------------------------------------------- training

TEST(Train, ZeroIterationsLeavesModel) {
    auto net = make_network({1, 3, 1}, Activation::Tanh, Initializer::Xavier, 5);
    TrainingConfig cfg;
    cfg.iterations = 0;
    const auto r = train(net, line_samples(100, 1, 2.0), Samples{}, cfg);
    EXPECT_EQ(r.model.params, net.params);
}

TEST(Train, LearnsLinearTarget) {
    auto net = make_network({1, 5, 5, 1}, Activation::Tanh, Initializer::Xavier, 1);
    TrainingConfig cfg;
    cfg.optimizer = {OptimizerKind::GD, 0.002, Regularization::None, 0.0};
    cfg.iterations = 20000;
    cfg.seed = 1;
    const auto r = train(net, line_samples(200, 1, 2.0), line_samples(60, 2, 2.0), cfg);
    EXPECT_LT(r.history.back().val_rmse, 1e-2);
    EXPECT_EQ(r.history.size(), 20u);
    EXPECT_EQ(r.history.front().iteration, 1000u);
}

TEST(Train, DeterministicForSeed) {
    TrainingConfig cfg;
    cfg.optimizer = {OptimizerKind::ProximalAdagrad, 0.04, Regularization::Lasso, 0.001};
    cfg.iterations = 2000;
    cfg.seed = 99;
    const auto data = line_samples(120, 8, -1.0);
    auto net = make_network({1, 4, 4, 1}, Activation::ReLU, Initializer::Xavier, 99);
    const auto a = train(net, data, Samples{}, cfg);
    const auto b = train(net, data, Samples{}, cfg);
    EXPECT_EQ(a.model.params, b.model.params);
}

TEST(Train, DivergenceIsReported) {
    TrainingConfig cfg;
    cfg.optimizer = {OptimizerKind::GD, 1e3, Regularization::None, 0.0};
    cfg.iterations = 1000;
    auto net = make_network({1, 8, 8, 1}, Activation::ReLU, Initializer::He, 1);
    EXPECT_THROW(train(net, line_samples(100, 3, 50.0), Samples{}, cfg), DivergenceError);
}

TEST(Train, LassoProducesExactZeros) {
    // Only the first of eight inputs carries signal.
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Samples s;
    s.cols = 8;
    for (int i = 0; i < 300; ++i) {
        double x0 = 0.0;
        for (int j = 0; j < 8; ++j) {
            const double v = u(rng);
            if (j == 0) x0 = v;
            s.x.push_back(v);
        }
        s.y.push_back(0.8 * x0);
    }
    auto net = make_network({8, 16, 16, 1}, Activation::ReLU, Initializer::Xavier, 12);
    TrainingConfig cfg;
    cfg.optimizer = {OptimizerKind::ProximalAdagrad, 0.04, Regularization::Lasso, 0.01};
    cfg.iterations = 5000;
    const auto r = train(net, s, Samples{}, cfg);
    const auto zeros = std::count(r.model.params.begin(), r.model.params.end(), 0.0);
    // biases start at zero; count weights only
    std::size_t weight_zeros = 0;
    for (std::size_t l = 0; l < r.model.layer_count(); ++l) {
        for (std::size_t o = 0; o < r.model.fan_out(l); ++o) {
            for (std::size_t i = 0; i < r.model.fan_in(l); ++i) weight_zeros += r.model.weight(l, o, i) == 0.0;
        }
    }
    EXPECT_GT(weight_zeros, 0u);
    EXPECT_GT(zeros, 0);
}

TEST(Train, FullBatchGdOnLinearModelIsMonotone) {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Samples s;
    s.cols = 3;
    for (int i = 0; i < 100; ++i) {
        const double a = u(rng), b = u(rng), c = u(rng);
        s.x.insert(s.x.end(), {a, b, c});
        s.y.push_back(0.5 * a - 0.3 * b + 0.1 * c + 0.05 * u(rng));
    }
    auto net = make_network({3, 1}, Activation::ReLU, Initializer::Xavier, 31);
    TrainingConfig cfg;
    cfg.optimizer = {OptimizerKind::GD, 1e-3, Regularization::None, 0.0};
    cfg.iterations = 1000;
    cfg.batch_size = s.size();
    double prev = loss_and_grad(net, s, Loss::MSE).loss;
    for (int window = 0; window < 10; ++window) {
        net = train(net, s, Samples{}, cfg).model;
        const double now = loss_and_grad(net, s, Loss::MSE).loss;
        EXPECT_LE(now, prev);
        prev = now;
    }
}

TEST(Train, MeanReductionScalesStep) {
    // Mean reduction with lr * batch equals sum reduction with lr.
    const auto data = line_samples(100, 6, 1.0);
    auto net = make_network({1, 3, 1}, Activation::Tanh, Initializer::Xavier, 6);
    TrainingConfig sum;
    sum.optimizer = {OptimizerKind::GD, 0.001, Regularization::None, 0.0};
    sum.iterations = 10;
    sum.batch_size = 10;
    TrainingConfig mean = sum;
    mean.reduction = LossReduction::Mean;
    mean.optimizer.learning_rate = 0.01;
    const auto a = train(net, data, Samples{}, sum).model.params;
    const auto b = train(net, data, Samples{}, mean).model.params;
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-14);
}

// ---------------------------------------------------------------- metrics

TEST(Metrics, IdenticalVectors) {
    const std::vector<double> t{1.0, 4.0, 2.0};
    const auto r = metrics(t, t);
    EXPECT_EQ(r.rmse, 0.0);
    EXPECT_EQ(r.nrmse, 0.0);
    EXPECT_EQ(r.max_error, 0.0);
}

TEST(Metrics, ArithmeticExample) {
    const auto r = metrics(std::vector<double>{0.0, 10.0}, std::vector<double>{1.0, 9.0});
    EXPECT_EQ(r.rmse, 1.0);
    EXPECT_EQ(r.nrmse, 0.1);
    EXPECT_EQ(r.max_error, 1.0);
    EXPECT_EQ(r.n, 2u);
}

TEST(Metrics, DegenerateSetsRejected) {
    EXPECT_THROW(metrics(std::vector<double>{3.0}, std::vector<double>{3.5}), DomainError);
    EXPECT_THROW(metrics(std::vector<double>{}, std::vector<double>{}), std::invalid_argument);
}

TEST(Metrics, MaxErrorBoundsRmse) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-50.0, 50.0);
    std::uniform_int_distribution<int> len(2, 40);
    for (int k = 0; k < 1000; ++k) {
        std::vector<double> t(static_cast<std::size_t>(len(rng))), p(t.size());
        for (auto& v : t) v = u(rng);
        for (auto& v : p) v = u(rng);
        const auto r = metrics(t, p);
        EXPECT_GE(r.max_error, r.rmse);
    }
}

TEST(Metrics, NrmseAffineInvariant) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<double> t(50), p(50);
    for (auto& v : t) v = u(rng);
    for (auto& v : p) v = u(rng);
    auto tt = t, pp = p;
    for (auto& v : tt) v = 3.5 * v - 20.0;
    for (auto& v : pp) v = 3.5 * v - 20.0;
    EXPECT_NEAR(metrics(t, p).nrmse, metrics(tt, pp).nrmse, 1e-12);
}

// ---------------------------------------------------------------- initialization

TEST(Initialize, XavierBoundsAndZeroBiases) {
    const std::vector<std::size_t> sizes{5, 10, 10, 1};
    NetworkModel net(sizes, Activation::Tanh);
    net.params = initialize(sizes, Initializer::Xavier, 4);
    for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const double limit = std::sqrt(6.0 / static_cast<double>(net.fan_in(l) + net.fan_out(l)));
        for (std::size_t o = 0; o < net.fan_out(l); ++o) {
            EXPECT_EQ(net.bias(l, o), 0.0);
            for (std::size_t i = 0; i < net.fan_in(l); ++i) {
                EXPECT_LE(std::abs(net.weight(l, o, i)), limit);
            }
        }
    }
}

TEST(Initialize, SameSeedSameParameters) {
    const std::vector<std::size_t> sizes{3, 5, 5, 5, 1};
    for (Initializer t : {Initializer::Xavier, Initializer::He, Initializer::RandomNormal}) {
        EXPECT_EQ(initialize(sizes, t, 17), initialize(sizes, t, 17));
        EXPECT_NE(initialize(sizes, t, 17), initialize(sizes, t, 18));
    }
    EXPECT_THROW(initialize(sizes, Initializer::Pretrained, 1), std::invalid_argument);
}

TEST(Initialize, HeVariance) {
    const std::vector<std::size_t> sizes{100, 100};
    const auto p = initialize(sizes, Initializer::He, 123);
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < 10000; ++i) {
        sum += p[i];
        sq += p[i] * p[i];
    }
    const double mean = sum / 1e4;
    const double var = sq / 1e4 - mean * mean;
    EXPECT_NEAR(var, 2.0 / 100.0, 0.2 * 2.0 / 100.0);
}

TEST(Initialize, RandomNormalSpread) {
    const std::vector<std::size_t> sizes{100, 100};
    const auto p = initialize(sizes, Initializer::RandomNormal, 5);
    double sq = 0.0;
    for (std::size_t i = 0; i < 10000; ++i) sq += p[i] * p[i];
    EXPECT_NEAR(std::sqrt(sq / 1e4), 0.1, 0.01);
}

TEST(Architecture, Parse) {
    EXPECT_EQ(parse_architecture("3x5", 3), (std::vector<std::size_t>{3, 5, 5, 5, 1}));
    EXPECT_EQ(parse_architecture("1x25", 2), (std::vector<std::size_t>{2, 25, 1}));
    for (const char* bad : {"3", "x5", "3x", "0x5", "3x0", "3y5", "3x5x2", "ax5"}) {
        EXPECT_THROW(parse_architecture(bad, 2), std::invalid_argument) << bad;
    }
}

// ---------------------------------------------------------------- model files

TEST(ModelIo, RoundTripIsBitExact) {
    auto net = make_network({5, 10, 10, 10, 10, 1}, Activation::Tanh, Initializer::Xavier, 8);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& p : net.params) p = u(rng) * 1e-3 + u(rng);
    net.input_norm = NormStats({0.002, 0.008, 20.0, 20.0, 1.0 / 60.0}, {0.02, 0.02, 100.0, 100.0, 5.0 / 60.0});
    net.output_norm = NormStats({1.0 / 3.0}, {97.123456789012345});
    net.feature_recipe = {"raw", "case=2"};
    const auto path = temp_path("roundtrip.json");
    save_model(net, path);
    const auto back = load_model(path);
    EXPECT_EQ(back.params, net.params);
    EXPECT_EQ(back.input_norm, net.input_norm);
    EXPECT_EQ(back.output_norm, net.output_norm);
    EXPECT_EQ(back.feature_recipe, net.feature_recipe);
    EXPECT_EQ(back.activation, net.activation);
    for (int i = 0; i < 50; ++i) {
        std::vector<double> x{0.01 + 0.005 * u(rng), 0.014, 60.0 + 30.0 * u(rng), 40.0, 0.05};
        EXPECT_EQ(predict(back, x), predict(net, x));
    }
    std::filesystem::remove(path);
}

TEST(ModelIo, TruncatedFileIsParseError) {
    auto net = with_identity_norm(make_network({2, 3, 1}, Activation::ReLU, Initializer::Xavier, 1));
    const auto path = temp_path("trunc.json");
    save_model(net, path);
    std::string text;
    {
        std::ifstream in(path);
        text.assign(std::istreambuf_iterator<char>(in), {});
    }
    {
        std::ofstream out(path);
        out << text.substr(0, text.size() / 2);
    }
    EXPECT_THROW(load_model(path), ParseError);
    std::filesystem::remove(path);
}

TEST(ModelIo, MissingNormalizationRejected) {
    auto net = with_identity_norm(make_network({2, 3, 1}, Activation::ReLU, Initializer::Xavier, 1));
    auto j = model_to_json(net);
    j.erase("output_norm");
    EXPECT_THROW(model_from_json(j), ParseError);
    NetworkModel bare({2, 3, 1}, Activation::ReLU);
    EXPECT_THROW(model_to_json(bare), std::invalid_argument);
}

TEST(ModelIo, VersionMismatchRejected) {
    auto net = with_identity_norm(make_network({2, 3, 1}, Activation::ReLU, Initializer::Xavier, 1));
    auto j = model_to_json(net);
    j["format_version"] = 2;
    EXPECT_THROW(model_from_json(j), ParseError);
    j = model_to_json(net);
    j["weights"][0].erase(0);
    EXPECT_THROW(model_from_json(j), ParseError);
}

TEST(ModelIo, MissingFileIsParseError) {
    EXPECT_THROW(load_model(temp_path("does_not_exist.json")), ParseError);
}
