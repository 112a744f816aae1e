#include <gtest/gtest.h>

#include "sei/error.hpp"
#include "sei/gradcheck.hpp"
#include "sei/operators.hpp"
#include "sei/ops.hpp"
#include "test_support.hpp"

using namespace sei;
using namespace sei::testing;

namespace {

Tensor<double> delta_kernel(std::size_t size) {
    auto k = Tensor<double>::zeros({size, size});
    k.mutable_data()[(size / 2) * size + size / 2] = 1.0;
    return k;
}

}  // namespace

TEST(Conv2dPeriodic, DeltaKernelIsIdentity) {
    Rng rng(1);
    auto x = random_tensor({2, 7, 9}, rng);
    EXPECT_EQ(conv2d_periodic(x, delta_kernel(3), ConvPath::Direct).values(), x.values());
    EXPECT_EQ(conv2d_periodic(x, delta_kernel(5), ConvPath::Direct).values(), x.values());
    EXPECT_LT(max_abs_diff(conv2d_periodic(x, delta_kernel(3), ConvPath::Fft), x), 1e-14);
}

TEST(Conv2dPeriodic, BoxOnConstantIsConstant) {
    auto x = Tensor<double>::full({1, 6, 6}, 0.37);
    auto k = Tensor<double>::full({3, 3}, 1.0 / 9.0);
    auto y = conv2d_periodic(x, k);
    for (double v : y.values()) EXPECT_NEAR(v, 0.37, 1e-15);
}

TEST(Conv2dPeriodic, GaussianImpulseMatchesNaiveSum) {
    auto k = gaussian_psf(1.0, 11).kernel<double>();
    auto x = Tensor<double>::zeros({1, 16, 16});
    x.mutable_data()[0] = 1.0;
    auto expected = naive_conv(x, k);
    for (auto path : {ConvPath::Direct, ConvPath::Fft, ConvPath::Auto}) {
        EXPECT_LT(max_abs_diff(conv2d_periodic(x, k, path), expected), 1e-15);
    }
    // Periodic embedding: tap (a,b) lands at ((a-5) mod 16, (b-5) mod 16).
    EXPECT_NEAR(expected[15 * 16 + 15], k[4 * 11 + 4], 1e-18);
    EXPECT_NEAR(expected[0], k[5 * 11 + 5], 1e-18);
}

TEST(Conv2dPeriodic, RandomInstancesMatchNaiveSum) {
    Rng rng(2);
    for (std::size_t ks : {1u, 3u, 5u, 7u}) {
        auto x = random_tensor({2, 11, 8}, rng);
        auto k = random_tensor({ks, ks}, rng);
        EXPECT_LT(max_abs_diff(conv2d_periodic(x, k, ConvPath::Direct), naive_conv(x, k)), 1e-13);
    }
}

TEST(Conv2dPeriodic, KernelLargerThanImageRejected) {
    auto x = Tensor<double>::zeros({1, 4, 8});
    EXPECT_THROW(conv2d_periodic(x, Tensor<double>::zeros({5, 5})), DimensionError);
    EXPECT_THROW(conv2d_periodic(x, Tensor<double>::zeros({2, 3})), DimensionError);
}

TEST(Conv2dPeriodic, Linearity) {
    Rng rng(3);
    auto x = random_tensor({1, 10, 10}, rng);
    auto y = random_tensor({1, 10, 10}, rng);
    auto k = random_tensor({5, 5}, rng);
    auto lhs = conv2d_periodic(add(x, y), k);
    auto rhs = add(conv2d_periodic(x, k), conv2d_periodic(y, k));
    EXPECT_LT(max_abs_diff(lhs, rhs), 1e-14);
}

TEST(Conv2dPeriodic, FlipIsAdjoint) {
    Rng rng(4);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t h = 8 + trial, w = 13 - trial / 2;
        const std::size_t ks = 2 * (trial % 4) + 1;
        auto x = random_tensor({2, h, w}, rng);
        auto y = random_tensor({2, h, w}, rng);
        auto k = random_tensor({ks, ks}, rng);
        const double lhs = inner(conv2d_periodic(x, k), y);
        const double rhs = inner(x, conv2d_periodic(y, flip_kernel(k)));
        EXPECT_LT(std::abs(lhs - rhs) / (l2(x) * l2(y)), 1e-12);
    }
}

TEST(Conv2dPeriodic, DirectAndFftPathsAgree) {
    Rng rng(5);
    for (std::size_t ks : {3u, 9u, 11u, 15u}) {
        auto x = random_tensor({1, 24, 20}, rng);
        auto k = random_tensor({ks, ks}, rng);
        auto a = conv2d_periodic(x, k, ConvPath::Direct);
        auto b = conv2d_periodic(x, k, ConvPath::Fft);
        EXPECT_LT(max_abs_diff(a, b) / l2(a), 1e-10) << "kernel " << ks;
    }
}

TEST(Conv2dPeriodic, GradientsMatchFiniteDifferences) {
    Rng rng(6);
    auto x = random_tensor({1, 6, 7}, rng);
    auto k = random_tensor({3, 3}, rng);
    auto t = random_tensor({1, 6, 7}, rng);
    for (auto path : {ConvPath::Direct, ConvPath::Fft}) {
        auto in_x = finite_diff_check(
            [&](const Tensor<double>& v) { return mse(conv2d_periodic(v, k, path), t); }, x);
        EXPECT_LT(in_x.max_rel_error, 1e-6);
        auto in_k = finite_diff_check(
            [&](const Tensor<double>& v) { return mse(conv2d_periodic(x, v, path), t); }, k);
        EXPECT_LT(in_k.max_rel_error, 1e-6);
    }
}

TEST(Conv2dLayer, MatchesNaiveCrossCorrelation) {
    Rng rng(7);
    auto x = random_tensor({2, 5, 6}, rng);
    auto w = random_tensor({3, 2, 3, 3}, rng);
    auto b = random_tensor({3}, rng);
    auto y = conv2d_layer(x, w, b);
    for (std::size_t o = 0; o < 3; ++o)
        for (long i = 0; i < 5; ++i)
            for (long j = 0; j < 6; ++j) {
                double acc = b[o];
                for (std::size_t c = 0; c < 2; ++c)
                    for (long a = 0; a < 3; ++a)
                        for (long q = 0; q < 3; ++q) {
                            const long ii = (i + a - 1 + 5) % 5, jj = (j + q - 1 + 6) % 6;
                            acc += w[((o * 2 + c) * 3 + a) * 3 + q] * x[(c * 5 + ii) * 6 + jj];
                        }
                EXPECT_NEAR(y[(o * 5 + i) * 6 + j], acc, 1e-13);
            }
}

TEST(Conv2dLayer, GradientsMatchFiniteDifferences) {
    Rng rng(8);
    auto x = random_tensor({2, 5, 4}, rng);
    auto w = random_tensor({3, 2, 3, 3}, rng);
    auto b = random_tensor({3}, rng);
    auto t = random_tensor({3, 5, 4}, rng);
    EXPECT_LT(finite_diff_check([&](const Tensor<double>& v) { return mse(conv2d_layer(v, w, b), t); }, x)
                  .max_rel_error,
              1e-6);
    EXPECT_LT(finite_diff_check([&](const Tensor<double>& v) { return mse(conv2d_layer(x, v, b), t); }, w)
                  .max_rel_error,
              1e-6);
    EXPECT_LT(finite_diff_check([&](const Tensor<double>& v) { return mse(conv2d_layer(x, w, v), t); }, b)
                  .max_rel_error,
              1e-6);
}

TEST(Conv2dLayer, ShapeChecks) {
    auto x = Tensor<double>::zeros({2, 5, 5});
    EXPECT_THROW(conv2d_layer(x, Tensor<double>::zeros({3, 1, 3, 3}), Tensor<double>::zeros({3})),
                 DimensionError);
    EXPECT_THROW(conv2d_layer(x, Tensor<double>::zeros({3, 2, 3, 3}), Tensor<double>::zeros({2})),
                 DimensionError);
}

TEST(Subsample, FactorOneIsIdentity) {
    Rng rng(9);
    auto x = random_tensor({1, 5, 7}, rng);
    EXPECT_EQ(subsample(x, 1).values(), x.values());
}

TEST(Subsample, RampExample) {
    std::vector<double> v(16);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) v[i * 4 + j] = 4 * i + j;
    auto y = subsample(Tensor<double>({1, 4, 4}, v), 2);
    EXPECT_EQ(y.shape(), (Shape{1, 2, 2}));
    EXPECT_EQ(y.values(), (std::vector<double>{0, 2, 8, 10}));
    auto shifted = subsample(Tensor<double>({1, 4, 4}, v), 2, 1, 1);
    EXPECT_EQ(shifted.values(), (std::vector<double>{5, 7, 13, 15}));
}

TEST(Subsample, NonDivisibleExtentsRejected) {
    EXPECT_THROW(subsample(Tensor<double>::zeros({1, 5, 4}), 2), DimensionError);
    EXPECT_THROW(subsample(Tensor<double>::zeros({1, 4, 4}), 2, 2, 0), ValidationError);
}

TEST(Subsample, ZeroInsertionIsAdjoint) {
    Rng rng(10);
    for (std::size_t r : {2u, 3u}) {
        auto x = random_tensor({2, 6 * r, 4 * r}, rng);
        const auto d = image_dims(x);
        auto y = random_tensor({2, d.rows / r, d.cols / r}, rng);
        const double lhs = inner(subsample(x, r, 1, r - 1), y);
        const double rhs = inner(x, upsample_zero(y, r, d.rows, d.cols, 1, r - 1));
        EXPECT_LT(std::abs(lhs - rhs) / (l2(x) * l2(y)), 1e-14);
    }
}

TEST(CyclicShift, ConventionAndPeriodicity) {
    std::vector<double> v(12);
    for (int i = 0; i < 12; ++i) v[i] = i;
    Tensor<double> x({1, 3, 4}, v);
    auto y = cyclic_shift(x, 1, 2);
    // out(i,j) = x(i-1, j-2)
    EXPECT_EQ(y[(1 * 4) + 2], x[0]);
    EXPECT_EQ(cyclic_shift(x, 3, 4).values(), x.values());
    EXPECT_EQ(cyclic_shift(x, -1, -2).values(), cyclic_shift(x, 2, 2).values());
}

TEST(Crop, ExtractsWindowAndRejectsOverflow) {
    std::vector<double> v(20);
    for (int i = 0; i < 20; ++i) v[i] = i;
    Tensor<double> x({1, 4, 5}, v);
    auto c = crop(x, 1, 2, 2, 3);
    EXPECT_EQ(c.values(), (std::vector<double>{7, 8, 9, 12, 13, 14}));
    EXPECT_THROW(crop(x, 3, 0, 2, 2), DimensionError);
}

TEST(KeysKernel, InterpolatingAndPartitionOfUnity) {
    EXPECT_EQ(keys_kernel(0.0), 1.0);
    EXPECT_EQ(keys_kernel(1.0), 0.0);
    EXPECT_EQ(keys_kernel(2.0), 0.0);
    EXPECT_EQ(keys_kernel(2.5), 0.0);
    for (double t : {0.1, 0.37, 0.5, 0.93}) {
        double s = 0.0;
        for (int k = -2; k <= 2; ++k) s += keys_kernel(t - k);
        EXPECT_NEAR(s, 1.0, 1e-15);
    }
    // a = -0.5 at t = 0.5: (a+2)/8 - (a+3)/4 + 1 = 0.5625
    EXPECT_NEAR(keys_kernel(0.5), 0.5625, 1e-15);
}

TEST(Bicubic, UpsampleKeepsCoarseSamples) {
    Rng rng(11);
    auto y = random_tensor({1, 6, 5}, rng);
    for (std::size_t r : {2u, 3u}) {
        auto up = bicubic_upsample(y, r);
        EXPECT_EQ(up.shape(), (Shape{1, 6 * r, 5 * r}));
        EXPECT_LT(max_abs_diff(subsample(up, r), y), 1e-14);
    }
}

TEST(Bicubic, ConstantsArePreserved) {
    auto x = Tensor<double>::full({1, 12, 12}, 0.6);
    for (std::size_t r : {2u, 3u, 4u}) {
        const auto down = bicubic_downsample(x, r);
        const auto up = bicubic_upsample(x, r);
        for (double v : down.values()) EXPECT_NEAR(v, 0.6, 1e-14);
        for (double v : up.values()) EXPECT_NEAR(v, 0.6, 1e-14);
    }
}

TEST(Bicubic, ResamplingGradientsMatchFiniteDifferences) {
    Rng rng(12);
    auto x = random_tensor({1, 6, 6}, rng);
    auto t_down = random_tensor({1, 3, 3}, rng);
    auto t_up = random_tensor({1, 12, 12}, rng);
    EXPECT_LT(finite_diff_check([&](const Tensor<double>& v) { return mse(bicubic_downsample(v, 2), t_down); }, x)
                  .max_rel_error,
              1e-6);
    EXPECT_LT(finite_diff_check([&](const Tensor<double>& v) { return mse(bicubic_upsample(v, 2), t_up); }, x)
                  .max_rel_error,
              1e-6);
}

TEST(Ops, CropAndShiftGradients) {
    Rng rng(13);
    auto x = random_tensor({1, 5, 6}, rng);
    auto t = random_tensor({1, 3, 4}, rng);
    auto t2 = random_tensor({1, 5, 6}, rng);
    EXPECT_LT(finite_diff_check([&](const Tensor<double>& v) { return mse(crop(v, 1, 2, 3, 4), t); }, x)
                  .max_rel_error,
              1e-6);
    EXPECT_LT(finite_diff_check([&](const Tensor<double>& v) { return mse(cyclic_shift(v, 2, -1), t2); }, x)
                  .max_rel_error,
              1e-6);
}

TEST(Ops, FloatInstantiationAgreesWithDouble) {
    Rng rng(14);
    auto x = random_tensor({1, 8, 8}, rng);
    auto k = random_tensor({3, 3}, rng);
    auto yd = conv2d_periodic(x, k);
    auto yf = conv2d_periodic(cast<float>(x), cast<float>(k));
    EXPECT_LT(max_abs_diff(cast<double>(yf), yd), 1e-5);
}
