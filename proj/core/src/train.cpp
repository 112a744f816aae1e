#include "sei/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "sei/dataset.hpp"
#include "sei/error.hpp"
#include "sei/metrics.hpp"
#include "sei/optim.hpp"

namespace sei {

namespace {

constexpr const char* kLossNames[] = {"sei", "sure", "mc", "css", "ei", "sup"};

// Endless stream of seeded permutations of [0, n).
class IndexStream {
   public:
    IndexStream(std::size_t n, Rng& rng) : order_(n), rng_(rng) { reshuffle(); }

    std::size_t next() {
        if (pos_ == order_.size()) reshuffle();
        return order_[pos_++];
    }

   private:
    void reshuffle() {
        std::iota(order_.begin(), order_.end(), 0);
        for (std::size_t i = order_.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng_.uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(order_[i - 1], order_[j]);
        }
        pos_ = 0;
    }

    std::vector<std::size_t> order_;
    std::size_t pos_ = 0;
    Rng& rng_;
};

struct CropWindow {
    std::size_t r0, c0, rows, cols;
};

CropWindow draw_crop(const ImageDims& d, std::size_t crop, Rng& rng) {
    const std::size_t rows = crop == 0 ? d.rows : std::min(crop, d.rows);
    const std::size_t cols = crop == 0 ? d.cols : std::min(crop, d.cols);
    const auto r0 = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(d.rows - rows)));
    const auto c0 = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(d.cols - cols)));
    return {r0, c0, rows, cols};
}

template <class T>
Tensor<T> cropped(const Tensor<T>& x, const CropWindow& w, std::size_t factor = 1) {
    const auto d = image_dims(x);
    if (w.r0 == 0 && w.c0 == 0 && w.rows * factor == d.rows && w.cols * factor == d.cols) return x;
    return crop(x, w.r0 * factor, w.c0 * factor, w.rows * factor, w.cols * factor);
}

template <class T>
void check_data(const TrainData<T>& data, const TrainConfig& cfg, const ForwardModel& model,
                const NetworkConfig& net) {
    if (data.measurements.empty()) throw ValidationError("train: dataset is empty");
    if (model.r != net.upscale) {
        throw ValidationError("train: network upscale " + std::to_string(net.upscale) +
                              " does not match forward model r=" + std::to_string(model.r));
    }
    if (is_self_supervised(cfg.loss)) {
        if (!data.references.empty()) {
            throw ValidationError("train: self-supervised loss '" + to_string(cfg.loss) +
                                  "' must not be given reference images");
        }
    } else if (data.references.size() != data.measurements.size()) {
        throw ValidationError("train: loss 'sup' needs one reference per measurement (" +
                              std::to_string(data.references.size()) + " references for " +
                              std::to_string(data.measurements.size()) + " measurements)");
    }
    for (std::size_t i = 0; i < data.measurements.size(); ++i) {
        const auto d = image_dims(data.measurements[i]);
        if (d.channels != net.image_channels) {
            throw DimensionError("train: measurement " + std::to_string(i) + " has " +
                                 std::to_string(d.channels) + " channels, network expects " +
                                 std::to_string(net.image_channels));
        }
        if (cfg.loss == LossKind::Sei) {
            // SEQ applies A to a half-scale copy of the reconstructed crop.
            const auto side = std::min(cfg.crop == 0 ? d.rows : std::min(cfg.crop, d.rows),
                                       cfg.crop == 0 ? d.cols : std::min(cfg.crop, d.cols));
            const auto hr = side * model.r / 2;
            const auto seq_side = hr - hr % model.r;
            if (seq_side < model.psf.size || seq_side / model.r < net.kernel) {
                throw ValidationError("train: crop of " + std::to_string(side) +
                                      " pixels is too small for loss 'sei' (the half-scale copy has " +
                                      std::to_string(seq_side) + " pixels, kernel needs " +
                                      std::to_string(std::max(model.psf.size, net.kernel * model.r)) + ")");
            }
        }
        if (!data.references.empty()) {
            const auto dr = image_dims(data.references[i]);
            if (dr.channels != d.channels || dr.rows != d.rows * model.r || dr.cols != d.cols * model.r) {
                throw DimensionError("train: reference " + std::to_string(i) + " " +
                                     shape_str(data.references[i].shape()) + " is not x" +
                                     std::to_string(model.r) + " of measurement " +
                                     shape_str(data.measurements[i].shape()));
            }
        }
    }
}

struct Running {
    double total = 0.0, sure = 0.0, seq = 0.0;
    bool has_sure = false, has_seq = false;
    std::size_t steps = 0;
};

template <class T>
TrainResult<T> run(Network<T>& net, const ForwardModel& model, const TrainData<T>& data,
                   const TrainConfig& cfg, const ValidationData<T>* validation,
                   std::uint64_t epoch_offset, const LogCallback& on_log) {
    cfg.validate();
    model.validate();
    check_data(data, cfg, model, net.config());
    if (validation && validation->measurements.size() != validation->references.size()) {
        throw ValidationError("train: validation set needs one reference per measurement");
    }

    Rng crop_rng(cfg.seed, streams::kCrop);
    Rng loss_rng(cfg.seed, streams::kLoss);
    IndexStream indices(data.measurements.size(), crop_rng);
    const std::size_t steps_per_epoch =
        cfg.steps_per_epoch ? cfg.steps_per_epoch
                            : (data.measurements.size() + cfg.batch - 1) / cfg.batch;
    LossOptions opts;
    opts.alpha = cfg.alpha;
    opts.stop_gradient = cfg.stop_gradient;
    AdamOptions adam_opts{cfg.lr, cfg.beta1, cfg.beta2, 1e-8};
    AdamState<T> adam;
    const T inv_batch = static_cast<T>(1.0 / static_cast<double>(cfg.batch));

    TrainResult<T> result;
    std::size_t global_step = 0;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Running run;
        for (std::size_t s = 0; s < steps_per_epoch; ++s) {
            std::optional<Tensor<T>> total;
            double sure = 0.0, seq = 0.0;
            bool has_sure = false, has_seq = false;
            for (std::size_t b = 0; b < cfg.batch; ++b) {
                const auto idx = indices.next();
                const auto& y_full = data.measurements[idx];
                const auto window = draw_crop(image_dims(y_full), cfg.crop, crop_rng);
                const auto y = cropped(y_full, window);
                LossValue<T> lv =
                    cfg.loss == LossKind::Sup
                        ? loss_supervised<T>(net, y, cropped(data.references[idx], window, model.r))
                        : self_supervised_loss<T>(cfg.loss, net, model, y, loss_rng, opts);
                auto term = scale(lv.total, inv_batch);
                total = total ? add(*total, term) : term;
                if (auto p = lv.part(parts::kSure)) {
                    sure += *p;
                    has_sure = true;
                }
                if (auto p = lv.part(parts::kSeq)) {
                    seq += *p;
                    has_seq = true;
                }
            }
            const double value = static_cast<double>(total->item());
            ++global_step;
            if (!std::isfinite(value)) {
                throw NumericalError("train: non-finite loss at epoch " + std::to_string(epoch) +
                                     ", step " + std::to_string(global_step) + " (loss " +
                                     to_string(cfg.loss) + ", lr " + format_number(cfg.lr) + ")");
            }
            auto grads = backward(*total);
            std::vector<std::vector<T>> g;
            g.reserve(net.parameters().size());
            for (const auto& p : net.parameters()) {
                const auto& raw = grads.raw(p);
                g.push_back(raw.empty() ? std::vector<T>(p.numel(), T(0)) : raw);
            }
            if (cfg.optimizer == OptimizerKind::Adam) {
                adam_step(net.parameters(), g, adam, adam_opts);
            } else {
                sgd_step(net.parameters(), g, cfg.lr);
            }
            run.total += value;
            run.sure += sure / static_cast<double>(cfg.batch);
            run.seq += seq / static_cast<double>(cfg.batch);
            run.has_sure |= has_sure;
            run.has_seq |= has_seq;
            ++run.steps;
        }
        if (epoch % cfg.log_every == 0 || epoch == cfg.epochs) {
            MetricsRow row;
            row.epoch = static_cast<std::size_t>(epoch_offset) + epoch;
            row.step = global_step;
            const double n = static_cast<double>(std::max<std::size_t>(run.steps, 1));
            row.loss_total = run.total / n;
            if (run.has_sure) row.loss_sure = run.sure / n;
            if (run.has_seq) row.loss_seq = run.seq / n;
            if (validation && !validation->measurements.empty()) row.psnr_val = mean_psnr(net, *validation);
            result.log.push_back(row);
            if (on_log) on_log(row);
        }
    }

    result.checkpoint = make_checkpoint(net, model, cfg.optimizer == OptimizerKind::Adam ? &adam : nullptr);
    result.checkpoint.loss = to_string(cfg.loss);
    result.checkpoint.optimizer = to_string(cfg.optimizer);
    result.checkpoint.optimizer_step = cfg.optimizer == OptimizerKind::Adam ? adam.step : global_step;
    result.checkpoint.epoch = epoch_offset + cfg.epochs;
    result.checkpoint.rng_states["crop"] = crop_rng.state();
    result.checkpoint.rng_states["loss"] = loss_rng.state();
    return result;
}

}  // namespace

std::string to_string(LossKind kind) { return kLossNames[static_cast<int>(kind)]; }

LossKind parse_loss_kind(const std::string& text) {
    for (int i = 0; i < 6; ++i)
        if (text == kLossNames[i]) return static_cast<LossKind>(i);
    throw ValidationError("unknown loss '" + text + "' (expected sei|sure|mc|css|ei|sup)");
}

bool is_self_supervised(LossKind kind) { return kind != LossKind::Sup; }

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::Adam ? "adam" : "sgd"; }

OptimizerKind parse_optimizer_kind(const std::string& text) {
    if (text == "adam") return OptimizerKind::Adam;
    if (text == "sgd") return OptimizerKind::Sgd;
    throw ValidationError("unknown optimizer '" + text + "' (expected adam|sgd)");
}

double default_learning_rate(const ForwardModel& model) { return model.r > 1 ? 2e-4 : 5e-4; }

void TrainConfig::validate() const {
    if (batch < 1) throw ValidationError("train config: batch must be >= 1");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ValidationError("train config: lr must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ValidationError("train config: betas must lie in [0, 1)");
    }
    if (log_every < 1) throw ValidationError("train config: log_every must be >= 1");
    if (loss == LossKind::Sei && !(alpha > 0.0)) {
        throw ValidationError("train config: alpha must be > 0 for loss 'sei'");
    }
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows) {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    out << "epoch,step,loss_total,loss_sure,loss_seq,psnr_val\n";
    for (const auto& r : rows) {
        out << r.epoch << ',' << r.step << ',' << format_number(r.loss_total) << ','
            << opt(r.loss_sure) << ',' << opt(r.loss_seq) << ',' << opt(r.psnr_val) << '\n';
    }
}

template <class T>
LossValue<T> self_supervised_loss(LossKind kind, const Reconstructor<T>& f,
                                  const ForwardModel& model, const Tensor<T>& y, Rng& rng,
                                  const LossOptions& opts) {
    switch (kind) {
        case LossKind::Sei:
            return loss_sei(f, model, y, rng, opts);
        case LossKind::Sure:
            return loss_sure(f, model, y, rng, opts);
        case LossKind::Mc:
            return loss_mc(f, model, y);
        case LossKind::Css:
            return loss_css(f, model, y, rng);
        case LossKind::Ei:
            return loss_ei_shift(f, model, y, rng, opts);
        case LossKind::Sup:
            break;
    }
    throw ValidationError("self_supervised_loss: 'sup' is not a self-supervised loss");
}

template <class T>
TrainResult<T> train(const NetworkConfig& net_cfg, const ForwardModel& model,
                     const TrainData<T>& data, const TrainConfig& cfg,
                     const ValidationData<T>* validation, const LogCallback& on_log) {
    Rng init(cfg.seed, streams::kInit);
    Network<T> net(net_cfg, init);
    return run(net, model, data, cfg, validation, 0, on_log);
}

template <class T>
TrainResult<T> finetune(const Checkpoint& ckpt, const ForwardModel& model,
                        const TrainData<T>& data, const TrainConfig& cfg,
                        const ValidationData<T>* validation, const LogCallback& on_log) {
    if (ckpt.network.upscale != model.r) {
        throw ValidationError("finetune: checkpoint network upscale " +
                              std::to_string(ckpt.network.upscale) +
                              " does not match forward model r=" + std::to_string(model.r));
    }
    auto net = network_from_checkpoint<T>(ckpt);
    TrainConfig sgd = cfg;
    sgd.optimizer = OptimizerKind::Sgd;
    return run(net, model, data, sgd, validation, ckpt.epoch, on_log);
}

template <class T>
double mean_psnr(const Network<T>& net, const ValidationData<T>& data) {
    if (data.measurements.empty()) throw ValidationError("mean_psnr: empty validation set");
    double acc = 0.0;
    for (std::size_t i = 0; i < data.measurements.size(); ++i) {
        const auto x = reconstruct(net, data.measurements[i]);
        acc += psnr(luminance(x), luminance(data.references[i]));
    }
    return acc / static_cast<double>(data.measurements.size());
}

#define SEI_INSTANTIATE_TRAIN(T)                                                                   \
    template LossValue<T> self_supervised_loss(LossKind, const Reconstructor<T>&,                  \
                                               const ForwardModel&, const Tensor<T>&, Rng&,        \
                                               const LossOptions&);                                \
    template TrainResult<T> train(const NetworkConfig&, const ForwardModel&, const TrainData<T>&,  \
                                  const TrainConfig&, const ValidationData<T>*,                    \
                                  const LogCallback&);                                             \
    template TrainResult<T> finetune(const Checkpoint&, const ForwardModel&, const TrainData<T>&,  \
                                     const TrainConfig&, const ValidationData<T>*,                 \
                                     const LogCallback&);                                          \
    template double mean_psnr(const Network<T>&, const ValidationData<T>&);

SEI_INSTANTIATE_TRAIN(float)
SEI_INSTANTIATE_TRAIN(double)

}  // namespace sei
