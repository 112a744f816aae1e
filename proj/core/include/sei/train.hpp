#pragma once

// Training loop over all loss kinds, and SGD fine-tuning from a checkpoint.
//
// Self-supervised kinds see measurements only: `TrainData::references` must be
// empty for them, and the per-step loss is computed by a function that takes
// no reference argument.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sei/checkpoint.hpp"
#include "sei/losses.hpp"
#include "sei/network.hpp"

namespace sei {

enum class LossKind { Sei, Sure, Mc, Css, Ei, Sup };

std::string to_string(LossKind kind);
LossKind parse_loss_kind(const std::string& text);
bool is_self_supervised(LossKind kind);

enum class OptimizerKind { Adam, Sgd };

std::string to_string(OptimizerKind kind);
OptimizerKind parse_optimizer_kind(const std::string& text);

/// Initial learning rates: 5e-4 for deblurring, 2e-4 for super-resolution.
double default_learning_rate(const ForwardModel& model);

struct TrainConfig {
    std::size_t batch = 8;
    std::size_t epochs = 1;
    /// Optimizer steps per epoch; 0 means one pass over the data
    /// (ceil(n / batch)).
    std::size_t steps_per_epoch = 0;
    double lr = 5e-4;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::Sei;
    /// Crop extent in measurement pixels; 0 or larger than the image uses
    /// the whole measurement.
    std::size_t crop = 48;
    std::size_t log_every = 1;
    double alpha = 1.0;
    bool stop_gradient = true;

    void validate() const;
    bool operator==(const TrainConfig&) const = default;
};

template <class T>
struct TrainData {
    std::vector<Tensor<T>> measurements;
    /// Ground truth, only for LossKind::Sup. Extents are r times the
    /// measurement extents.
    std::vector<Tensor<T>> references;
};

/// Held-out pairs used only to log PSNR; never enters the loss.
template <class T>
struct ValidationData {
    std::vector<Tensor<T>> measurements;
    std::vector<Tensor<T>> references;
};

struct MetricsRow {
    std::size_t epoch = 0;
    std::size_t step = 0;
    double loss_total = 0.0;
    std::optional<double> loss_sure;
    std::optional<double> loss_seq;
    std::optional<double> psnr_val;
};

/// CSV with header `epoch,step,loss_total,loss_sure,loss_seq,psnr_val`;
/// missing values are empty fields.
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRow>& rows);

/// Called with every metrics row as soon as it is logged.
using LogCallback = std::function<void(const MetricsRow&)>;

template <class T>
struct TrainResult {
    Checkpoint checkpoint;
    std::vector<MetricsRow> log;
};

/// Loss of one measurement for a self-supervised kind.
template <class T>
LossValue<T> self_supervised_loss(LossKind kind, const Reconstructor<T>& f,
                                  const ForwardModel& model, const Tensor<T>& y, Rng& rng,
                                  const LossOptions& opts);

/// Trains a freshly initialised network (init rng stream of cfg.seed).
template <class T>
TrainResult<T> train(const NetworkConfig& net_cfg, const ForwardModel& model,
                     const TrainData<T>& data, const TrainConfig& cfg,
                     const ValidationData<T>* validation = nullptr, const LogCallback& on_log = {});

/// Continues from `ckpt` with plain SGD (cfg.optimizer is ignored). Zero
/// epochs returns the input parameters unchanged.
template <class T>
TrainResult<T> finetune(const Checkpoint& ckpt, const ForwardModel& model,
                        const TrainData<T>& data, const TrainConfig& cfg,
                        const ValidationData<T>* validation = nullptr, const LogCallback& on_log = {});

/// Mean PSNR of the reconstructions against references (luminance).
template <class T>
double mean_psnr(const Network<T>& net, const ValidationData<T>& data);

}  // namespace sei
