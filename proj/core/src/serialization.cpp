#include "sei/serialization.hpp"

#include <algorithm>

#include "sei/error.hpp"

namespace sei {

namespace {

template <class V>
void read(const Json& j, const char* key, V& out, const std::string& context) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<V>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(context + ": bad value for '" + key + "': " + e.what());
    }
}

void require_object(const Json& j, const std::string& context) {
    if (!j.is_object()) throw ValidationError(context + ": expected a JSON object");
}

std::string mode_name(ForwardMode m) { return m == ForwardMode::Blur ? "blur" : "bicubic"; }

}  // namespace

void require_known_keys(const Json& j, std::initializer_list<const char*> allowed,
                        const std::string& context) {
    for (const auto& item : j.items()) {
        const bool known = std::any_of(allowed.begin(), allowed.end(),
                                       [&](const char* k) { return item.key() == k; });
        if (!known) throw ValidationError(context + ": unknown key '" + item.key() + "'");
    }
}

Json to_json(const ForwardModel& model) {
    return Json{{"kernel", model.psf.spec()},
                {"kernel_size", model.psf.size},
                {"r", model.r},
                {"sigma", model.sigma},
                {"phase", {model.phase_r, model.phase_c}},
                {"mode", mode_name(model.mode)}};
}

ForwardModel forward_model_from_json(const Json& j) {
    const std::string ctx = "forward model";
    require_object(j, ctx);
    require_known_keys(j, {"kernel", "kernel_size", "r", "sigma", "phase", "mode"}, ctx);
    ForwardModel m;
    std::string kernel = "delta", mode = "blur";
    std::size_t size = 0;
    std::vector<std::size_t> phase{0, 0};
    read(j, "kernel", kernel, ctx);
    read(j, "kernel_size", size, ctx);
    read(j, "r", m.r, ctx);
    read(j, "sigma", m.sigma, ctx);
    read(j, "phase", phase, ctx);
    read(j, "mode", mode, ctx);
    m.psf = parse_psf(kernel);
    if (size != 0 && size != m.psf.size) {
        if (m.psf.kind != PsfKind::Gaussian) {
            throw ValidationError(ctx + ": kernel_size only applies to gaussian kernels");
        }
        m.psf = gaussian_psf(m.psf.parameter, size);
    }
    if (phase.size() != 2) throw ValidationError(ctx + ": phase must have two entries");
    m.phase_r = phase[0];
    m.phase_c = phase[1];
    if (mode == "blur") {
        m.mode = ForwardMode::Blur;
    } else if (mode == "bicubic") {
        m.mode = ForwardMode::BicubicDownsample;
    } else {
        throw ValidationError(ctx + ": mode must be 'blur' or 'bicubic'");
    }
    m.validate();
    return m;
}

Json to_json(const NetworkConfig& cfg) {
    return Json{{"channels", cfg.channels},   {"depth", cfg.depth},
                {"kernel", cfg.kernel},       {"residual", cfg.residual},
                {"upscale", cfg.upscale},     {"image_channels", cfg.image_channels},
                {"zero_last", cfg.zero_last}};
}

NetworkConfig network_config_from_json(const Json& j) {
    const std::string ctx = "network config";
    require_object(j, ctx);
    require_known_keys(j, {"channels", "depth", "kernel", "residual", "upscale", "image_channels", "zero_last"},
                       ctx);
    NetworkConfig c;
    read(j, "channels", c.channels, ctx);
    read(j, "depth", c.depth, ctx);
    read(j, "kernel", c.kernel, ctx);
    read(j, "residual", c.residual, ctx);
    read(j, "upscale", c.upscale, ctx);
    read(j, "image_channels", c.image_channels, ctx);
    read(j, "zero_last", c.zero_last, ctx);
    c.validate();
    return c;
}

Json to_json(const TrainConfig& cfg) {
    return Json{{"batch", cfg.batch},
                {"epochs", cfg.epochs},
                {"steps_per_epoch", cfg.steps_per_epoch},
                {"lr", cfg.lr},
                {"optimizer", to_string(cfg.optimizer)},
                {"betas", {cfg.beta1, cfg.beta2}},
                {"seed", cfg.seed},
                {"loss", to_string(cfg.loss)},
                {"crop", cfg.crop},
                {"log_every", cfg.log_every},
                {"alpha", cfg.alpha},
                {"stop_gradient", cfg.stop_gradient}};
}

TrainConfig train_config_from_json(const Json& j) {
    const std::string ctx = "train config";
    require_object(j, ctx);
    require_known_keys(j,
                       {"batch", "epochs", "steps_per_epoch", "lr", "optimizer", "betas", "seed",
                        "loss", "crop", "log_every", "alpha", "stop_gradient"},
                       ctx);
    TrainConfig c;
    read(j, "batch", c.batch, ctx);
    read(j, "epochs", c.epochs, ctx);
    read(j, "steps_per_epoch", c.steps_per_epoch, ctx);
    read(j, "lr", c.lr, ctx);
    std::string opt = to_string(c.optimizer), loss = to_string(c.loss);
    read(j, "optimizer", opt, ctx);
    read(j, "loss", loss, ctx);
    c.optimizer = parse_optimizer_kind(opt);
    c.loss = parse_loss_kind(loss);
    std::vector<double> betas{c.beta1, c.beta2};
    read(j, "betas", betas, ctx);
    if (betas.size() != 2) throw ValidationError(ctx + ": betas must have two entries");
    c.beta1 = betas[0];
    c.beta2 = betas[1];
    read(j, "seed", c.seed, ctx);
    read(j, "crop", c.crop, ctx);
    read(j, "log_every", c.log_every, ctx);
    read(j, "alpha", c.alpha, ctx);
    read(j, "stop_gradient", c.stop_gradient, ctx);
    c.validate();
    return c;
}

}  // namespace sei
