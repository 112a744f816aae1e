#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "sei/error.hpp"
#include "sei/optim.hpp"
#include "sei/train.hpp"
#include "test_support.hpp"

using namespace sei;
using namespace sei::testing;

namespace {

NetworkConfig tiny(std::size_t upscale = 1) {
    NetworkConfig cfg;
    cfg.channels = 4;
    cfg.depth = 3;
    cfg.upscale = upscale;
    return cfg;
}

struct Problem {
    ForwardModel model = ForwardModel::deblurring(gaussian_psf(1.0), 0.0);
    std::vector<Tensor<float>> clean, measured;
};

Problem make_problem(std::size_t count, std::size_t n, double sigma = 0.0) {
    Problem p;
    p.model.sigma = sigma;
    Rng rng(99), noise(99, streams::kDataNoise);
    for (std::size_t i = 0; i < count; ++i) {
        auto x = random_tensor({1, n, n}, rng, 0, 1);
        p.clean.push_back(cast<float>(x));
        p.measured.push_back(cast<float>(apply_forward(p.model, x, &noise)));
    }
    return p;
}

TrainConfig quick(LossKind loss) {
    TrainConfig cfg;
    cfg.loss = loss;
    cfg.batch = 2;
    cfg.epochs = 2;
    cfg.steps_per_epoch = 2;
    cfg.crop = 16;
    cfg.seed = 5;
    return cfg;
}

}  // namespace

TEST(Adam, ZeroGradientLeavesParametersUnchanged) {
    std::vector<Tensor<double>> params{Tensor<double>({2}, {1.0, -2.0}, true)};
    AdamState<double> state;
    adam_step(params, {{0.0, 0.0}}, state, AdamOptions{});
    EXPECT_EQ(params[0].values(), (std::vector<double>{1.0, -2.0}));
    EXPECT_EQ(state.step, 1u);
}

TEST(Adam, FirstStepMovesByTheLearningRate) {
    std::vector<Tensor<double>> params{Tensor<double>({2}, {0.0, 0.0}, true)};
    AdamState<double> state;
    AdamOptions opts;
    opts.lr = 0.1;
    adam_step(params, {{3.0, -0.5}}, state, opts);
    EXPECT_NEAR(params[0][0], -0.1, 1e-8);
    EXPECT_NEAR(params[0][1], 0.1, 1e-8);
}

TEST(Adam, TwoStepRecurrence) {
    std::vector<Tensor<double>> params{Tensor<double>({1}, {1.0}, true)};
    AdamState<double> state;
    AdamOptions opts;
    opts.lr = 0.01;
    const double g1 = 0.3, g2 = -0.7;
    adam_step(params, {{g1}}, state, opts);
    adam_step(params, {{g2}}, state, opts);

    double theta = 1.0, m = 0.0, v = 0.0;
    const double gs[2] = {g1, g2};
    for (int t = 1; t <= 2; ++t) {
        m = 0.9 * m + 0.1 * gs[t - 1];
        v = 0.999 * v + 0.001 * gs[t - 1] * gs[t - 1];
        const double mh = m / (1 - std::pow(0.9, t)), vh = v / (1 - std::pow(0.999, t));
        theta -= 0.01 * mh / (std::sqrt(vh) + 1e-8);
    }
    EXPECT_NEAR(params[0][0], theta, 1e-12);
    EXPECT_NEAR(state.m[0][0], m, 1e-15);
    EXPECT_NEAR(state.v[0][0], v, 1e-15);
}

TEST(Adam, RejectsMismatchedGradients) {
    std::vector<Tensor<double>> params{Tensor<double>({2}, {0.0, 0.0}, true)};
    AdamState<double> state;
    EXPECT_THROW(adam_step(params, {{1.0}}, state, AdamOptions{}), DimensionError);
}

TEST(Sgd, PlainStep) {
    std::vector<Tensor<double>> params{Tensor<double>({1}, {1.0}, true)};
    sgd_step(params, {{2.0}}, 0.01);
    EXPECT_DOUBLE_EQ(params[0][0], 0.98);
    std::vector<Tensor<double>> adam_params{Tensor<double>({1}, {1.0}, true)};
    AdamState<double> state;
    AdamOptions opts;
    opts.lr = 0.01;
    adam_step(adam_params, {{2.0}}, state, opts);
    EXPECT_NE(adam_params[0][0], params[0][0]);
}

TEST(TrainConfig, DefaultsAndValidation) {
    TrainConfig cfg;
    EXPECT_EQ(cfg.batch, 8u);
    EXPECT_EQ(cfg.beta1, 0.9);
    EXPECT_EQ(cfg.beta2, 0.999);
    EXPECT_EQ(cfg.alpha, 1.0);
    EXPECT_EQ(default_learning_rate(ForwardModel::deblurring(gaussian_psf(1.0), 0.0)), 5e-4);
    EXPECT_EQ(default_learning_rate(ForwardModel::super_resolution(2, 0.0)), 2e-4);
    cfg.batch = 0;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg = TrainConfig{};
    cfg.beta2 = 1.0;
    EXPECT_THROW(cfg.validate(), ValidationError);
    EXPECT_EQ(parse_loss_kind("ei"), LossKind::Ei);
    EXPECT_THROW(parse_loss_kind("n2n"), ValidationError);
    EXPECT_THROW(parse_optimizer_kind("rmsprop"), ValidationError);
}

TEST(Train, SupervisedLossDecreases) {
    auto p = make_problem(1, 16);
    TrainData<float> data{p.measured, p.clean};
    TrainConfig cfg = quick(LossKind::Sup);
    cfg.batch = 1;
    cfg.steps_per_epoch = 1;
    cfg.epochs = 50;
    cfg.crop = 0;
    cfg.optimizer = OptimizerKind::Sgd;
    cfg.lr = 0.3;
    auto res = train(tiny(), p.model, data, cfg);
    ASSERT_EQ(res.log.size(), 50u);
    for (std::size_t i = 1; i < res.log.size(); ++i) EXPECT_LE(res.log[i].loss_total, res.log[i - 1].loss_total);
    EXPECT_LT(res.log.back().loss_total, 0.95 * res.log.front().loss_total);
    EXPECT_FALSE(res.log.front().loss_sure.has_value());
}

TEST(Train, DeterministicForAFixedSeed) {
    auto p = make_problem(3, 20, 0.02);
    TrainData<float> data{p.measured, {}};
    auto a = train(tiny(), p.model, data, quick(LossKind::Sei));
    auto b = train(tiny(), p.model, data, quick(LossKind::Sei));
    EXPECT_EQ(serialize_checkpoint(a.checkpoint), serialize_checkpoint(b.checkpoint));
    std::ostringstream ca, cb;
    write_metrics_csv(ca, a.log);
    write_metrics_csv(cb, b.log);
    EXPECT_EQ(ca.str(), cb.str());
    auto other = quick(LossKind::Sei);
    other.seed = 6;
    EXPECT_NE(serialize_checkpoint(train(tiny(), p.model, data, other).checkpoint),
              serialize_checkpoint(a.checkpoint));
}

TEST(Train, LogsSeiParts) {
    auto p = make_problem(2, 20, 0.02);
    auto res = train(tiny(), p.model, TrainData<float>{p.measured, {}}, quick(LossKind::Sei));
    ASSERT_EQ(res.log.size(), 2u);
    EXPECT_EQ(res.log[1].epoch, 2u);
    EXPECT_EQ(res.log[1].step, 4u);
    ASSERT_TRUE(res.log[0].loss_sure && res.log[0].loss_seq);
    EXPECT_EQ(res.checkpoint.epoch, 2u);
    EXPECT_EQ(res.checkpoint.optimizer, "adam");
    EXPECT_EQ(res.checkpoint.optimizer_step, 4u);
}

TEST(Train, EveryLossRuns) {
    auto p = make_problem(2, 20, 0.02);
    for (auto kind : {LossKind::Sure, LossKind::Mc, LossKind::Css, LossKind::Ei}) {
        auto res = train(tiny(), p.model, TrainData<float>{p.measured, {}}, quick(kind));
        EXPECT_TRUE(std::isfinite(res.log.back().loss_total)) << to_string(kind);
    }
}

TEST(Train, SuperResolutionWithValidation) {
    Rng rng(4);
    auto model = ForwardModel::super_resolution(2, 0.0);
    std::vector<Tensor<float>> clean, measured;
    for (int i = 0; i < 2; ++i) {
        auto x = random_tensor({1, 24, 24}, rng, 0, 1);
        clean.push_back(cast<float>(x));
        measured.push_back(cast<float>(apply_linear(model, x)));
    }
    ValidationData<float> val{measured, clean};
    auto cfg = quick(LossKind::Sei);
    cfg.lr = default_learning_rate(model);
    auto res = train(tiny(2), model, TrainData<float>{measured, {}}, cfg, &val);
    ASSERT_TRUE(res.log.back().psnr_val.has_value());
    EXPECT_GT(*res.log.back().psnr_val, 5.0);
    EXPECT_THROW(train(tiny(1), model, TrainData<float>{measured, {}}, cfg), ValidationError);
}

TEST(Train, DataContracts) {
    auto p = make_problem(2, 16);
    EXPECT_THROW(train(tiny(), p.model, TrainData<float>{p.measured, p.clean}, quick(LossKind::Sei)),
                 ValidationError);
    EXPECT_THROW(train(tiny(), p.model, TrainData<float>{p.measured, {}}, quick(LossKind::Sup)),
                 ValidationError);
    EXPECT_THROW(train(tiny(), p.model, TrainData<float>{}, quick(LossKind::Sei)), ValidationError);
    std::vector<Tensor<float>> wrong{Tensor<float>::zeros({1, 8, 8}), Tensor<float>::zeros({1, 8, 8})};
    EXPECT_THROW(train(tiny(), p.model, TrainData<float>{p.measured, wrong}, quick(LossKind::Sup)),
                 DimensionError);
}

TEST(Train, RejectsCropsTooSmallForTheScaleLoss) {
    auto p = make_problem(1, 20, 0.02);
    auto cfg = quick(LossKind::Sei);
    cfg.crop = 12;
    EXPECT_THROW(train(tiny(), p.model, TrainData<float>{p.measured, {}}, cfg), ValidationError);
    cfg.loss = LossKind::Ei;
    EXPECT_NO_THROW(train(tiny(), p.model, TrainData<float>{p.measured, {}}, cfg));
}

TEST(Train, NonFiniteLossIsReported) {
    auto p = make_problem(1, 16);
    p.measured[0].mutable_data()[5] = std::numeric_limits<float>::quiet_NaN();
    EXPECT_THROW(train(tiny(), p.model, TrainData<float>{p.measured, {}}, quick(LossKind::Mc)), NumericalError);
}

TEST(Finetune, ZeroEpochsKeepsParameters) {
    auto p = make_problem(2, 20, 0.02);
    TrainData<float> data{p.measured, {}};
    auto base = train(tiny(), p.model, data, quick(LossKind::Sei));
    auto cfg = quick(LossKind::Sei);
    cfg.epochs = 0;
    auto tuned = finetune(base.checkpoint, p.model, data, cfg);
    EXPECT_TRUE(tuned.log.empty());
    EXPECT_EQ(tuned.checkpoint.epoch, base.checkpoint.epoch);
    for (std::size_t i = 0; i < 6; ++i) EXPECT_EQ(tuned.checkpoint.tensors[i], base.checkpoint.tensors[i]);
}

TEST(Finetune, UsesSgdAndContinuesTheEpochCounter) {
    auto p = make_problem(2, 20, 0.02);
    TrainData<float> data{p.measured, {}};
    auto base = train(tiny(), p.model, data, quick(LossKind::Sure));
    auto cfg = quick(LossKind::Sei);
    cfg.lr = 0.01;
    auto tuned = finetune(base.checkpoint, p.model, data, cfg);
    EXPECT_EQ(tuned.checkpoint.optimizer, "sgd");
    EXPECT_EQ(tuned.log.front().epoch, 3u);
    EXPECT_EQ(tuned.checkpoint.epoch, 4u);
    EXPECT_NE(tuned.checkpoint.tensors[0], base.checkpoint.tensors[0]);
    EXPECT_THROW(finetune(base.checkpoint, ForwardModel::super_resolution(2, 0.0), data, cfg), ValidationError);
}

TEST(MetricsCsv, HeaderAndEmptyFields) {
    MetricsRow row;
    row.epoch = 3;
    row.step = 12;
    row.loss_total = 0.25;
    row.loss_seq = 0.125;
    std::ostringstream out;
    write_metrics_csv(out, {row});
    EXPECT_EQ(out.str(), "epoch,step,loss_total,loss_sure,loss_seq,psnr_val\n3,12,0.25,,0.125,\n");
}
