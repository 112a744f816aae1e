#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "data_dir.hpp"
#include "sei/checkpoint.hpp"
#include "sei/dataset.hpp"
#include "sei/error.hpp"
#include "sei/image_io.hpp"
#include "sei/metrics.hpp"
#include "sei/oracle.hpp"
#include "sei/serialization.hpp"
#include "sei/train.hpp"

namespace sei::cli {

namespace {

using Json = nlohmann::json;

ForwardModel model_from_kernel_spec(const std::string& spec, double sigma) {
    const auto psf = parse_psf(spec);
    if (psf.kind == PsfKind::Bicubic) return ForwardModel::super_resolution(static_cast<int>(psf.parameter), sigma);
    return ForwardModel::deblurring(psf, sigma);
}

// Largest top-left window whose extents are multiples of r.
Tensor<double> crop_to_multiple(const Tensor<double>& x, std::size_t r) {
    const auto d = image_dims(x);
    const auto rows = d.rows - d.rows % r, cols = d.cols - d.cols % r;
    if (rows == 0 || cols == 0) throw DimensionError("image smaller than the downsampling factor");
    if (rows == d.rows && cols == d.cols) return x;
    return crop(x, 0, 0, rows, cols);
}

void write_json(const fs::path& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::vector<Tensor<float>> to_float(const std::vector<Tensor<double>>& xs) {
    std::vector<Tensor<float>> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(cast<float>(x));
    return out;
}

void warn_on_model_mismatch(const std::optional<ForwardModel>& manifest, const ForwardModel& used,
                            const std::string& what) {
    if (manifest && !(*manifest == used)) {
        std::cerr << "warning: " << what << " forward model " << to_json(used).dump()
                  << " differs from the data manifest " << to_json(*manifest).dump() << "\n";
    }
}

}  // namespace

int cmd_degrade(const DegradeOptions& opts) {
    const auto model = model_from_kernel_spec(opts.kernel, opts.sigma);
    if (opts.bit_depth != 8 && opts.bit_depth != 16) throw ValidationError("--bit-depth must be 8 or 16");
    const auto sources = list_images(opts.input);
    if (sources.empty()) throw ValidationError(opts.input.string() + " contains no images");

    std::vector<std::pair<Dataset, fs::path>> splits;
    if (opts.test_count == 0) {
        auto [all, none] = split_dataset(sources, 0, opts.split_seed);
        splits.emplace_back(std::move(all), opts.output);
    } else {
        auto [train, test] = split_dataset(sources, opts.test_count, opts.split_seed);
        splits.emplace_back(std::move(train), opts.output / "train");
        splits.emplace_back(std::move(test), opts.output / "test");
    }

    // Per-file noise seeds are drawn in input order so they do not depend on the split.
    Rng seeds(opts.seed, streams::kDataNoise);
    std::vector<std::uint64_t> file_seed(sources.size());
    for (auto& s : file_seed) s = seeds.engine()();

    for (auto& [split, dir] : splits) {
        const bool refs = opts.with_references || split.split == Split::Test;
        Json files = Json::array();
        for (const auto& sample : split.samples) {
            const auto index = sample.noise_seed;
            const auto clean = crop_to_multiple(load_image(sample.measurement), model.r);
            Rng noise(file_seed[index], streams::kDataNoise);
            const auto y = apply_forward(model, clean, &noise);
            const auto name = sample.id + ".png";
            save_image(y, dir / kMeasurementDir / name, opts.bit_depth);
            Json entry{{"id", sample.id},
                       {"source", sample.measurement.string()},
                       {"measurement", std::string(kMeasurementDir) + "/" + name},
                       {"noise_seed", file_seed[index]}};
            if (refs) {
                save_image(clean, dir / kReferenceDir / name, 16);
                entry["reference"] = std::string(kReferenceDir) + "/" + name;
            }
            files.push_back(std::move(entry));
        }
        Json manifest{{"model", to_json(model)},
                      {"seed", opts.seed},
                      {"split", to_string(split.split)},
                      {"split_seed", opts.split_seed},
                      {"bit_depth", opts.bit_depth},
                      {"files", std::move(files)}};
        write_json(dir / kManifestName, manifest);
        std::cout << "wrote " << split.size() << " " << to_string(split.split) << " measurements to "
                  << dir.string() << "\n";
    }
    return 0;
}

int cmd_train(const TrainOptions& opts) {
    const auto cfg_json = read_json_file(opts.config);
    if (!cfg_json.is_object()) throw ValidationError(opts.config.string() + ": expected a JSON object");
    require_known_keys(cfg_json, {"model", "network", "train", "data", "validation", "output", "init"},
                       opts.config.string());
    auto path_from = [&](const std::optional<fs::path>& flag, const char* key) -> std::optional<fs::path> {
        if (flag) return flag;
        if (cfg_json.contains(key)) return fs::path(cfg_json.at(key).get<std::string>());
        return std::nullopt;
    };
    const auto data_dir = path_from(opts.data, "data");
    const auto output = path_from(opts.output, "output");
    const auto validation_dir = path_from(opts.validation, "validation");
    const auto init = path_from(opts.init, "init");
    if (!data_dir) throw ValidationError("no training data: pass --data or set \"data\" in the config");
    if (!output) throw ValidationError("no output directory: pass --output or set \"output\" in the config");

    const Json train_json = cfg_json.value("train", Json::object());
    auto cfg = train_config_from_json(train_json);
    if (opts.loss) cfg.loss = parse_loss_kind(*opts.loss);

    const bool supervised = cfg.loss == LossKind::Sup;
    auto split = load_split(*data_dir, supervised);

    std::optional<Checkpoint> ckpt;
    if (init) ckpt = load_checkpoint(*init);

    ForwardModel model;
    if (cfg_json.contains("model")) {
        model = forward_model_from_json(cfg_json.at("model"));
        warn_on_model_mismatch(split.model, model, "configured");
    } else if (split.model) {
        model = *split.model;
    } else if (ckpt) {
        model = ckpt->model;
    } else {
        throw ValidationError("no forward model: the data directory has no manifest and the config no \"model\"");
    }
    if (!train_json.contains("lr")) cfg.lr = init ? 0.01 : default_learning_rate(model);

    const Json net_json = cfg_json.value("network", Json::object());
    auto net_cfg = network_config_from_json(net_json);
    if (!net_json.contains("upscale")) net_cfg.upscale = model.r;
    if (!net_json.contains("image_channels")) net_cfg.image_channels = split.measurements.front().dim(0);

    TrainData<float> data{to_float(split.measurements), to_float(split.references)};
    std::optional<ValidationData<float>> val;
    if (validation_dir) {
        auto v = load_split(*validation_dir, true);
        val = ValidationData<float>{to_float(v.measurements), to_float(v.references)};
    }

    LogCallback progress;
    if (!opts.quiet) {
        progress = [](const MetricsRow& row) {
            std::cerr << "epoch " << row.epoch << "  step " << row.step << "  loss " << format_number(row.loss_total);
            if (row.psnr_val) std::cerr << "  psnr_val " << format_number(*row.psnr_val);
            std::cerr << "\n";
        };
    }
    const auto* val_ptr = val ? &*val : nullptr;
    auto result = ckpt ? finetune<float>(*ckpt, model, data, cfg, val_ptr, progress)
                       : train<float>(net_cfg, model, data, cfg, val_ptr, progress);

    fs::create_directories(*output);
    save_checkpoint(result.checkpoint, *output / "checkpoint.seik");
    std::ostringstream csv;
    write_metrics_csv(csv, result.log);
    write_text_file(*output / "metrics.csv", csv.str());
    auto effective = cfg;
    if (ckpt) effective.optimizer = OptimizerKind::Sgd;
    Json resolved{{"model", to_json(model)},
                  {"network", to_json(result.checkpoint.network)},
                  {"train", to_json(effective)},
                  {"data", data_dir->string()}};
    if (validation_dir) resolved["validation"] = validation_dir->string();
    if (init) resolved["init"] = init->string();
    write_json(*output / "run.json", resolved);
    std::cout << "trained " << to_string(cfg.loss) << " for " << cfg.epochs << " epochs; checkpoint at "
              << (*output / "checkpoint.seik").string() << "\n";
    return 0;
}

int cmd_eval(const EvalOptions& opts) {
    auto split = load_split(opts.data, true);
    std::optional<Network<float>> net;
    ForwardModel model;
    if (opts.baseline) {
        if (!split.model) throw ValidationError("--baseline needs a data manifest to know the upsampling factor");
        model = *split.model;
    } else {
        if (!opts.checkpoint) throw ValidationError("--checkpoint is required unless --baseline is given");
        const auto ckpt = load_checkpoint(*opts.checkpoint);
        model = ckpt.model;
        warn_on_model_mismatch(split.model, model, "checkpoint");
        net.emplace(network_from_checkpoint<float>(ckpt));
        if (net->config().image_channels != split.measurements.front().dim(0)) {
            throw ValidationError("checkpoint expects " + std::to_string(net->config().image_channels) +
                                  "-channel images, data has " +
                                  std::to_string(split.measurements.front().dim(0)));
        }
    }

    std::vector<MetricRow> rows;
    for (std::size_t i = 0; i < split.measurements.size(); ++i) {
        const auto& y = split.measurements[i];
        const auto x = net ? cast<double>(reconstruct(*net, cast<float>(y)))
                           : (model.r == 1 ? y : bicubic_upsample(y, model.r));
        const auto& ref = split.references[i];
        if (x.shape() != ref.shape()) {
            throw ValidationError("reconstruction of " + split.ids[i] + " has shape " + shape_str(x.shape()) +
                                  " but the reference is " + shape_str(ref.shape()));
        }
        const auto xy = luminance(x), ry = luminance(ref);
        rows.push_back({split.ids[i], psnr(xy, ry), ssim(xy, ry)});
        if (opts.save_reconstructions) save_image(x, opts.output / "recon" / (split.ids[i] + ".png"));
    }
    std::ostringstream csv;
    write_metric_rows(csv, rows);
    write_text_file(opts.output / "metrics.csv", csv.str());
    const auto mean = summarize(rows);
    std::cout << "images " << rows.size() << "  psnr_y " << format_number(mean.psnr_y) << "  ssim_y "
              << format_number(mean.ssim_y) << "\n";
    return 0;
}

int cmd_oracle(const OracleOptions& opts) {
    if (opts.demo != "theorem1" && opts.demo != "theorem2") {
        throw ValidationError("--demo must be theorem1 or theorem2");
    }
    const auto h = FilterSpec::from(SpectrumFn::bump({opts.h_offset, 0.0}, opts.xi_h, 1.0));
    const auto phi = FilterSpec::from(SpectrumFn::bump({0.0, 0.0}, opts.xi_phi, 1.0));
    Json report;
    std::vector<std::pair<std::string, SpectrumFn>> profiles{{"h", h.spectrum}, {"phi", phi.spectrum}};
    bool passed = false;
    try {
        if (!(opts.xi_h < opts.xi_phi)) {
            throw HypothesisError("the demos need xi_h < xi_phi (got xi_h = " + format_number(opts.xi_h) +
                                  ", xi_phi = " + format_number(opts.xi_phi) + ")");
        }
        if (opts.demo == "theorem1") {
            const auto rep = theorem1_counterexample(h, phi, opts.seed, opts.seeds, opts.samples);
            report = to_json(rep);
            passed = rep.passed();
            profiles.emplace_back("witness", spectrum_multiply(phi.spectrum, phi.spectrum));
        } else {
            Rng rng(opts.seed, streams::kInit);
            std::vector<SpectrumFn> seeds;
            for (std::size_t i = 0; i < opts.seeds; ++i) {
                seeds.push_back(random_seed_spectrum(rng, 1.5 * opts.xi_phi, 3, opts.dim));
            }
            const auto rep = theorem2_set_check(seeds, h, phi, {0.5, 0.75, 1.0, 1.5, 2.0}, opts.seed, opts.samples,
                                                opts.dim);
            report = to_json(rep);
            passed = rep.passed();
            const auto y = spectrum_multiply(h.spectrum, seeds.front());
            profiles.emplace_back("measurement", y);
            profiles.emplace_back("recovered", theorem2_recover(y, h, phi, rep.s, opts.dim));
        }
    } catch (const HypothesisError& e) {
        std::cout << Json{{"demo", opts.demo}, {"error", "hypothesis"}, {"message", e.what()}, {"passed", false}}.dump(2)
                  << "\n";
        throw;
    }
    std::cout << report.dump(2) << "\n";
    if (opts.output) {
        write_json(*opts.output / "report.json", report);
        std::ostringstream csv;
        write_radial_profiles(csv, profiles, 1.25 * std::max(opts.xi_phi, opts.xi_h), 201);
        write_text_file(*opts.output / "profiles.csv", csv.str());
    }
    return passed ? 0 : 2;
}

}  // namespace sei::cli
