#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "sei/error.hpp"

using namespace sei::cli;

int main(int argc, char** argv) {
    CLI::App app{"Scale-equivariant self-supervised image reconstruction"};
    app.require_subcommand(1);

    DegradeOptions degrade;
    auto* deg = app.add_subcommand("degrade", "Blur/downsample and add noise to a directory of images");
    deg->add_option("--input", degrade.input, "Directory of clean images")->required()->check(CLI::ExistingDirectory);
    deg->add_option("--output", degrade.output, "Output directory")->required();
    deg->add_option("--kernel", degrade.kernel, "gaussian:<sigma> | box:<radius> | bicubic:<r> | delta")->required();
    deg->add_option("--sigma", degrade.sigma, "Noise standard deviation in [0,1] intensity units");
    deg->add_option("--seed", degrade.seed, "Noise seed");
    deg->add_option("--bit-depth", degrade.bit_depth, "PNG bit depth of the measurements (8 or 16)");
    deg->add_flag("--with-references", degrade.with_references, "Also write the clean images of the training split");
    deg->add_option("--test-count", degrade.test_count, "Hold out this many images as a test split");
    deg->add_option("--split-seed", degrade.split_seed, "Seed of the train/test split");

    TrainOptions train;
    auto* tr = app.add_subcommand("train", "Train or fine-tune a reconstruction network");
    tr->add_option("--config", train.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    tr->add_option("--loss", train.loss, "sei | sure | mc | css | ei | sup");
    tr->add_option("--data", train.data, "Training data directory");
    tr->add_option("--validation", train.validation, "Validation data directory (with references)");
    tr->add_option("--output", train.output, "Output directory");
    tr->add_option("--init", train.init, "Checkpoint to fine-tune (SGD)");
    tr->add_flag("--quiet", train.quiet, "No progress lines");

    EvalOptions eval;
    auto* ev = app.add_subcommand("eval", "Per-image PSNR/SSIM on the luminance channel");
    ev->add_option("--checkpoint", eval.checkpoint, "Trained checkpoint");
    ev->add_option("--data", eval.data, "Data directory with references")->required();
    ev->add_option("--output", eval.output, "Output directory")->required();
    ev->add_flag("--save-recon", eval.save_reconstructions, "Write reconstructed PNGs");
    ev->add_flag("--baseline", eval.baseline, "Score the (bicubically upsampled) measurements instead");

    OracleOptions oracle;
    auto* orc = app.add_subcommand("oracle", "Frequency-domain identification demos");
    orc->add_option("--demo", oracle.demo, "theorem1 | theorem2")->required();
    orc->add_option("--dim", oracle.dim, "Spatial dimension (1 or 2)")->check(CLI::IsMember({1, 2}));
    orc->add_option("--seeds", oracle.seeds, "Number of seed spectra / set members");
    orc->add_option("--seed", oracle.seed, "Random seed");
    orc->add_option("--samples", oracle.samples, "Frequencies sampled per comparison");
    orc->add_option("--xi-h", oracle.xi_h, "Filter bandwidth");
    orc->add_option("--xi-phi", oracle.xi_phi, "Target bandwidth");
    orc->add_option("--h-offset", oracle.h_offset, "Shift of the filter bump away from the origin");
    orc->add_option("--output", oracle.output, "Directory for report.json and profiles.csv");

    ReportOptions report;
    auto* rep = app.add_subcommand("report", "Markdown table from metrics CSVs");
    rep->add_option("--entry", report.entries, "method,degradation,path/to/metrics.csv")->required();
    rep->add_option("--output", report.output, "Markdown file (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (*deg) return cmd_degrade(degrade);
        if (*tr) return cmd_train(train);
        if (*ev) return cmd_eval(eval);
        if (*orc) return cmd_oracle(oracle);
        if (*rep) return cmd_report(report);
    } catch (const sei::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
