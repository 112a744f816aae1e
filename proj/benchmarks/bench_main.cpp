#include <benchmark/benchmark.h>

#include "sei/losses.hpp"
#include "sei/network.hpp"
#include "sei/ops.hpp"
#include "sei/operators.hpp"
#include "sei/synth.hpp"
#include "sei/transforms.hpp"

using namespace sei;

namespace {

// n x n crop of a 64 x 64 (or larger power-of-two) texture.
Tensor<float> image(std::size_t n, std::uint64_t seed = 1) {
    const std::size_t side = n <= 64 ? 64 : n;
    return cast<float>(crop(synth_texture(seed, side, 1.2), 0, 0, n, n));
}

Network<float> network(std::size_t channels, std::size_t depth) {
    NetworkConfig cfg;
    cfg.channels = channels;
    cfg.depth = depth;
    cfg.zero_last = false;
    Rng rng(3, streams::kInit);
    return Network<float>(cfg, rng);
}

}  // namespace

static void BM_Conv2dLayer(benchmark::State& state) {
    const auto c = static_cast<std::size_t>(state.range(0));
    Rng rng(1);
    std::vector<float> x(c * 48 * 48), w(c * c * 9);
    for (auto& v : x) v = static_cast<float>(rng.uniform(-1, 1));
    for (auto& v : w) v = static_cast<float>(rng.uniform(-0.1, 0.1));
    Tensor<float> input({c, 48, 48}, x), weight({c, c, 3, 3}, w), bias = Tensor<float>::zeros({c});
    for (auto _ : state) benchmark::DoNotOptimize(conv2d_layer(input, weight, bias));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c * c * 9 * 48 * 48));
}
BENCHMARK(BM_Conv2dLayer)->Arg(8)->Arg(16)->Arg(32);

static void BM_BlurForward(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto model = ForwardModel::deblurring(gaussian_psf(2.0), 0.0);
    const auto x = image(n);
    for (auto _ : state) benchmark::DoNotOptimize(apply_linear(model, x));
}
BENCHMARK(BM_BlurForward)->Arg(64)->Arg(256);

static void BM_ScaleTransform(benchmark::State& state) {
    const auto x = image(64);
    for (auto _ : state) benchmark::DoNotOptimize(scale_transform(x, ScaleParams{0.5, 0, 0}));
}
BENCHMARK(BM_ScaleTransform);

static void BM_NetworkForward(benchmark::State& state) {
    const auto net = network(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    const auto y = image(48);
    for (auto _ : state) benchmark::DoNotOptimize(reconstruct(net, y));
}
BENCHMARK(BM_NetworkForward)->Args({8, 3})->Args({16, 4})->Args({32, 6});

static void BM_NetworkForwardBackward(benchmark::State& state) {
    const auto net = network(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
    const auto y = image(48);
    for (auto _ : state) {
        auto g = backward(mean(net(y)));
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_NetworkForwardBackward)->Args({8, 3})->Args({16, 4})->Args({32, 6});

template <class LossFn>
static void run_loss(benchmark::State& state, LossFn loss) {
    const auto net = network(8, 3);
    const auto model = ForwardModel::deblurring(gaussian_psf(2.0), 5.0 / 255.0);
    const auto y = image(48);
    Rng rng(7, streams::kLoss);
    for (auto _ : state) {
        auto lv = loss(net, model, y, rng);
        auto g = backward(lv.total);
        benchmark::DoNotOptimize(g);
    }
}

static void BM_LossSure(benchmark::State& state) {
    run_loss(state, [](auto& f, auto& m, auto& y, Rng& rng) { return loss_sure<float>(f, m, y, rng, {}); });
}
BENCHMARK(BM_LossSure);

static void BM_LossSei(benchmark::State& state) {
    run_loss(state, [](auto& f, auto& m, auto& y, Rng& rng) { return loss_sei<float>(f, m, y, rng, {}); });
}
BENCHMARK(BM_LossSei);

static void BM_LossEiShift(benchmark::State& state) {
    run_loss(state, [](auto& f, auto& m, auto& y, Rng& rng) { return loss_ei_shift<float>(f, m, y, rng, {}); });
}
BENCHMARK(BM_LossEiShift);
BENCHMARK_MAIN();
