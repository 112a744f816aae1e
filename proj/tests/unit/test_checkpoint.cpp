#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "sei/checkpoint.hpp"
#include "sei/error.hpp"
#include "sei/train.hpp"
#include "test_support.hpp"

using namespace sei;
using namespace sei::testing;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "sei_test_checkpoint";
    std::filesystem::create_directories(dir);
    return dir / name;
}

Checkpoint trained() {
    NetworkConfig net;
    net.channels = 3;
    net.depth = 2;
    net.upscale = 2;
    auto model = ForwardModel::super_resolution(2, 0.01);
    Rng rng(1);
    std::vector<Tensor<float>> ys{cast<float>(random_tensor({1, 8, 8}, rng, 0, 1))};
    TrainConfig cfg;
    cfg.batch = 1;
    cfg.crop = 0;
    cfg.epochs = 2;
    return train(net, model, TrainData<float>{ys, {}}, cfg).checkpoint;
}

}  // namespace

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
    auto ckpt = trained();
    auto path = temp_file("a.seik");
    save_checkpoint(ckpt, path);
    auto loaded = load_checkpoint(path);
    EXPECT_EQ(loaded, ckpt);
    auto again = temp_file("b.seik");
    save_checkpoint(loaded, again);
    EXPECT_EQ(serialize_checkpoint(load_checkpoint(again)), serialize_checkpoint(ckpt));
    EXPECT_EQ(std::filesystem::file_size(path), std::filesystem::file_size(again));
}

TEST(Checkpoint, LayoutAndContents) {
    auto ckpt = trained();
    auto bytes = serialize_checkpoint(ckpt);
    ASSERT_GT(bytes.size(), 16u);
    EXPECT_EQ(std::memcmp(bytes.data(), "SEIK", 4), 0);
    EXPECT_EQ(bytes[4], Checkpoint::kVersion);
    EXPECT_EQ(ckpt.tensors.front().name, "conv0.weight");
    EXPECT_EQ(ckpt.tensor("conv1.bias").shape, (Shape{1}));
    EXPECT_EQ(ckpt.tensor("adam.m.conv0.weight").shape, (Shape{3, 1, 3, 3}));
    EXPECT_EQ(ckpt.tensor("conv0.weight").dtype, "f32");
    EXPECT_TRUE(ckpt.rng_states.count("crop") && ckpt.rng_states.count("loss"));
    EXPECT_THROW(ckpt.tensor("conv9.weight"), ValidationError);
}

TEST(Checkpoint, RestoresNetworkAndOptimizer) {
    auto ckpt = trained();
    auto net = network_from_checkpoint<float>(ckpt);
    EXPECT_EQ(net.config(), ckpt.network);
    EXPECT_EQ(stored_values<float>(ckpt.tensor("conv0.weight")), net.parameters()[0].values());
    auto adam = adam_state_from_checkpoint<float>(ckpt);
    EXPECT_EQ(adam.step, ckpt.optimizer_step);
    EXPECT_EQ(adam.m.size(), net.parameters().size());
    // Precision conversion on restore.
    auto dnet = network_from_checkpoint<double>(ckpt);
    EXPECT_EQ(static_cast<float>(dnet.parameters()[0][0]), net.parameters()[0][0]);
    auto again = make_checkpoint(net, ckpt.model, &adam);
    EXPECT_EQ(again.tensors, ckpt.tensors);
}

TEST(Checkpoint, RejectsCorruptInput) {
    auto bytes = serialize_checkpoint(trained());
    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    EXPECT_THROW(parse_checkpoint(bad_magic), ValidationError);
    auto bad_version = bytes;
    bad_version[4] = 99;
    EXPECT_THROW(parse_checkpoint(bad_version), ValidationError);
    auto truncated = bytes;
    truncated.resize(bytes.size() - 3);
    EXPECT_THROW(parse_checkpoint(truncated), ValidationError);
    EXPECT_THROW(parse_checkpoint({}), ValidationError);
    EXPECT_THROW(load_checkpoint(temp_file("missing.seik")), IoError);
}

TEST(Checkpoint, ShapeMismatchOnRestore) {
    auto ckpt = trained();
    ckpt.network.channels = 5;
    EXPECT_THROW(network_from_checkpoint<float>(ckpt), DimensionError);
}
