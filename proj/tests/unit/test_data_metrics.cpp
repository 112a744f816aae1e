#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "sei/dataset.hpp"
#include "sei/error.hpp"
#include "sei/image_io.hpp"
#include "sei/metrics.hpp"
#include "sei/operators.hpp"
#include "sei/synth.hpp"
#include "test_support.hpp"

using namespace sei;
using namespace sei::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "sei_test_data";
    fs::create_directories(dir);
    return dir / name;
}

Tensor<double> coded(const Shape& shape, int levels, Rng& rng) {
    std::vector<double> v(shape_numel(shape));
    for (auto& x : v) x = static_cast<double>(rng.uniform_int(0, levels)) / levels;
    return Tensor<double>(shape, std::move(v));
}

void write_bytes(const fs::path& path, const std::string& header, const std::vector<unsigned char>& body) {
    std::ofstream out(path, std::ios::binary);
    out << header;
    out.write(reinterpret_cast<const char*>(body.data()), static_cast<std::streamsize>(body.size()));
}

}  // namespace

TEST(ImageIo, EightBitPngRoundTrip) {
    Rng rng(1);
    for (std::size_t c : {1u, 3u}) {
        auto x = coded({c, 13, 17}, 255, rng);
        auto path = scratch("rt8_" + std::to_string(c) + ".png");
        save_image(x, path);
        auto y = load_image(path);
        EXPECT_EQ(y.shape(), x.shape());
        EXPECT_LT(max_abs_diff(x, y), 1e-15);
    }
}

TEST(ImageIo, SixteenBitPngKeepsEveryCode) {
    Rng rng(2);
    auto x = coded({1, 9, 11}, 65535, rng);
    auto path = scratch("rt16.png");
    save_image(x, path, 16);
    EXPECT_LT(max_abs_diff(x, load_image(path)), 1e-15);
}

TEST(ImageIo, NetpbmRoundTrip) {
    Rng rng(3);
    auto gray = coded({1, 5, 6}, 255, rng);
    save_image(gray, scratch("g.pgm"));
    EXPECT_LT(max_abs_diff(gray, load_image(scratch("g.pgm"))), 1e-15);
    auto rgb = coded({3, 4, 7}, 65535, rng);
    save_image(rgb, scratch("c.ppm"), 16);
    EXPECT_LT(max_abs_diff(rgb, load_image(scratch("c.ppm"))), 1e-15);
}

TEST(ImageIo, ReadsHandWrittenPgm) {
    write_bytes(scratch("mid.pgm"), "P5\n# comment\n4 4\n255\n", std::vector<unsigned char>(16, 128));
    auto x = load_image(scratch("mid.pgm"));
    EXPECT_EQ(x.shape(), (Shape{1, 4, 4}));
    for (double v : x.values()) EXPECT_DOUBLE_EQ(v, 128.0 / 255.0);
    // 16-bit samples are big-endian.
    write_bytes(scratch("wide.pgm"), "P5 2 1 1000\n", {0x01, 0x02, 0x03, 0xE8});
    auto w = load_image(scratch("wide.pgm"));
    EXPECT_DOUBLE_EQ(w[0], 258.0 / 1000.0);
    EXPECT_DOUBLE_EQ(w[1], 1.0);
}

TEST(ImageIo, ClampsOnSave) {
    Tensor<double> x({1, 1, 3}, {-0.5, 0.5, 2.0});
    save_image(x, scratch("clamp.png"));
    auto y = load_image(scratch("clamp.png"));
    EXPECT_EQ(y[0], 0.0);
    EXPECT_DOUBLE_EQ(y[1], 128.0 / 255.0);
    EXPECT_EQ(y[2], 1.0);
}

TEST(ImageIo, Errors) {
    EXPECT_THROW(load_image(scratch("nope.png")), IoError);
    write_bytes(scratch("junk.png"), "definitely not a png", {});
    EXPECT_ANY_THROW(load_image(scratch("junk.png")));
    EXPECT_THROW(save_image(Tensor<double>::zeros({1, 2, 2}), scratch("x.tiff")), IoError);
    EXPECT_THROW(save_image(Tensor<double>::zeros({3, 2, 2}), scratch("x.pgm")), ValidationError);
    EXPECT_THROW(save_image(Tensor<double>::zeros({2, 2, 2}), scratch("x.png")), ValidationError);
    EXPECT_THROW(save_image(Tensor<double>::zeros({1, 2, 2}), scratch("x.png"), 12), ValidationError);
    EXPECT_TRUE(is_image_path("a/b.PNG"));
    EXPECT_FALSE(is_image_path("a/b.txt"));
}

TEST(Synth, TextureRangeAndDeterminism) {
    auto a = synth_texture(7, 64, 1.0);
    EXPECT_EQ(a.shape(), (Shape{1, 64, 64}));
    EXPECT_EQ(*std::min_element(a.values().begin(), a.values().end()), 0.0);
    EXPECT_EQ(*std::max_element(a.values().begin(), a.values().end()), 1.0);
    EXPECT_EQ(synth_texture(7, 64, 1.0).values(), a.values());
    EXPECT_NE(synth_texture(8, 64, 1.0).values(), a.values());
    EXPECT_THROW(synth_texture(7, 48, 1.0), ValidationError);
    EXPECT_THROW(synth_texture(7, 64, 0.0), ValidationError);
}

TEST(Synth, SpectralSlope) {
    for (double slope : {0.8, 1.0, 1.5}) {
        EXPECT_NEAR(fitted_spectral_slope(synth_texture(3, 128, slope)), -slope, 1e-6) << slope;
    }
}

TEST(Synth, SpectralSlopeAtFullSize) {
    EXPECT_NEAR(fitted_spectral_slope(synth_texture(11, 256, 1.2)), -1.2, 0.3);
}

TEST(Metrics, LumaWeights) {
    Tensor<double> rgb({3, 1, 2}, {1, 0.5, 0, 0.5, 0, 1});
    auto y = rgb_to_y(rgb);
    EXPECT_EQ(y.shape(), (Shape{1, 1, 2}));
    EXPECT_NEAR(y[0], 0.299, 1e-15);
    EXPECT_NEAR(y[1], 0.299 * 0.5 + 0.587 * 0.5 + 0.114, 1e-15);
    auto gray = Tensor<double>::full({1, 2, 2}, 0.3);
    EXPECT_EQ(luminance(gray).values(), gray.values());
    EXPECT_THROW(rgb_to_y(gray), DimensionError);
}

TEST(Metrics, PsnrValues) {
    auto a = Tensor<double>::zeros({1, 8, 8});
    EXPECT_NEAR(psnr(a, Tensor<double>::full({1, 8, 8}, 0.1)), 20.0, 1e-12);
    EXPECT_NEAR(psnr(a, Tensor<double>::full({1, 8, 8}, 5.0 / 255.0)), 20.0 * std::log10(51.0), 1e-12);
    EXPECT_NEAR(psnr(a, Tensor<double>::full({1, 8, 8}, 5.0 / 255.0)), 34.1514, 1e-4);
    EXPECT_EQ(psnr(a, a), kPsnrCap);
    EXPECT_NEAR(psnr(a, Tensor<double>::full({1, 8, 8}, 25.5), 255.0), 20.0, 1e-12);
    EXPECT_THROW(psnr(a, Tensor<double>::zeros({1, 8, 7})), DimensionError);
}

TEST(Metrics, PsnrDecreasesWithNoise) {
    auto x = synth_texture(1, 32, 1.0);
    Rng rng(4);
    double previous = kPsnrCap + 1;
    for (double sigma : {0.01, 0.02, 0.05, 0.1}) {
        Rng local(5);
        auto noisy = add_gaussian_noise(x, sigma, local);
        const double p = psnr(noisy, x);
        EXPECT_LT(p, previous);
        previous = p;
    }
}

TEST(Metrics, Ssim) {
    auto x = synth_texture(2, 32, 1.0);
    EXPECT_NEAR(ssim(x, x), 1.0, 1e-12);
    Rng rng(6);
    const double mild = ssim(add_gaussian_noise(x, 0.02, rng), x);
    const double strong = ssim(add_gaussian_noise(x, 0.2, rng), x);
    EXPECT_LT(mild, 1.0);
    EXPECT_LT(strong, mild);
    // Constant images: only the luminance term remains.
    auto a = Tensor<double>::full({1, 16, 16}, 0.2), b = Tensor<double>::full({1, 16, 16}, 0.4);
    const double c1 = 1e-4;
    EXPECT_NEAR(ssim(a, b), (2 * 0.2 * 0.4 + c1) / (0.04 + 0.16 + c1), 1e-12);
    EXPECT_THROW(ssim(Tensor<double>::zeros({3, 16, 16}), Tensor<double>::zeros({3, 16, 16})), DimensionError);
}

TEST(Dataset, SplitIsASeededPartition) {
    std::vector<fs::path> paths;
    for (int i = 0; i < 10; ++i) paths.push_back("img/" + std::to_string(100 + i) + ".png");
    auto [train, test] = split_dataset(paths, 3, 42);
    EXPECT_EQ(test.size(), 3u);
    EXPECT_EQ(train.size(), 7u);
    EXPECT_EQ(test.split, Split::Test);
    std::set<std::string> ids;
    for (const auto* d : {&train, &test}) {
        for (std::size_t i = 0; i < d->size(); ++i) {
            ids.insert(d->samples[i].id);
            EXPECT_EQ(d->samples[i].measurement, paths[d->samples[i].noise_seed]);
            if (i) EXPECT_LT(d->samples[i - 1].noise_seed, d->samples[i].noise_seed);
        }
    }
    EXPECT_EQ(ids.size(), 10u);
    EXPECT_TRUE(ids.count("105"));
    auto again = split_dataset(paths, 3, 42);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(again.second.samples[i].id, test.samples[i].id);
    bool differs = false;
    for (std::uint64_t seed = 0; seed < 5 && !differs; ++seed) {
        auto other = split_dataset(paths, 3, seed);
        for (std::size_t i = 0; i < 3; ++i) differs |= other.second.samples[i].id != test.samples[i].id;
    }
    EXPECT_TRUE(differs);
    EXPECT_THROW(split_dataset(paths, 10, 1), ValidationError);
    EXPECT_FALSE(train.has_references());
}

TEST(Dataset, ListImagesSortedAndFiltered) {
    auto dir = scratch("listing");
    fs::remove_all(dir);
    fs::create_directories(dir);
    for (const char* name : {"b.png", "a.pgm", "notes.txt", "c.ppm"}) std::ofstream(dir / name) << "x";
    auto found = list_images(dir);
    ASSERT_EQ(found.size(), 3u);
    EXPECT_EQ(found[0].filename(), "a.pgm");
    EXPECT_EQ(found[2].filename(), "c.ppm");
    EXPECT_THROW(list_images(dir / "missing"), IoError);
}

TEST(Dataset, MetricRowsRoundTrip) {
    std::vector<MetricRow> rows{{"x", 30.5, 0.9}, {"y", 28.25, 0.8}};
    std::ostringstream out;
    write_metric_rows(out, rows);
    EXPECT_EQ(out.str(), "id,psnr_y,ssim_y\nx,30.5,0.9\ny,28.25,0.8\nmean,29.375,0.85\n");
    std::istringstream in(out.str());
    auto back = read_metric_rows(in);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[1].id, "y");
    EXPECT_DOUBLE_EQ(back[2].psnr_y, 29.375);
    EXPECT_EQ(format_number(1.0 / 3.0), "0.3333333333");
}
