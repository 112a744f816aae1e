#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sei::cli {

namespace fs = std::filesystem;

struct DegradeOptions {
    fs::path input;
    fs::path output;
    std::string kernel;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    int bit_depth = 16;
    bool with_references = false;
    std::size_t test_count = 0;
    std::uint64_t split_seed = 0;
};

struct TrainOptions {
    fs::path config;
    std::optional<std::string> loss;
    std::optional<fs::path> data;
    std::optional<fs::path> validation;
    std::optional<fs::path> output;
    std::optional<fs::path> init;
    bool quiet = false;
};

struct EvalOptions {
    std::optional<fs::path> checkpoint;
    fs::path data;
    fs::path output;
    bool save_reconstructions = false;
    bool baseline = false;
};

struct OracleOptions {
    std::string demo;
    int dim = 2;
    std::size_t seeds = 10;
    std::uint64_t seed = 0;
    std::size_t samples = 1000;
    double xi_h = 0.15;
    double xi_phi = 0.3;
    double h_offset = 0.0;
    std::optional<fs::path> output;
};

struct ReportOptions {
    /// "method,degradation,path" triples.
    std::vector<std::string> entries;
    std::optional<fs::path> output;
};

int cmd_degrade(const DegradeOptions& opts);
int cmd_train(const TrainOptions& opts);
int cmd_eval(const EvalOptions& opts);
int cmd_oracle(const OracleOptions& opts);
int cmd_report(const ReportOptions& opts);

}  // namespace sei::cli
