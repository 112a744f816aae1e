#pragma once

// Training objectives. Every self-supervised loss takes measurements only;
// the supervised reference loss is the single entry point that sees ground
// truth.

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "sei/operators.hpp"
#include "sei/transforms.hpp"

namespace sei {

/// A trainable mapping y -> x whose output extents are `upscale()` times the
/// input extents.
template <class T>
class Reconstructor {
   public:
    virtual ~Reconstructor() = default;
    virtual Tensor<T> operator()(const Tensor<T>& y) const = 0;
    virtual std::size_t upscale() const = 0;
};

/// Adapts a callable, mostly for tests and fixed linear reconstructors.
template <class T>
class FunctionReconstructor final : public Reconstructor<T> {
   public:
    using Fn = std::function<Tensor<T>(const Tensor<T>&)>;
    explicit FunctionReconstructor(Fn fn, std::size_t upscale = 1)
        : fn_(std::move(fn)), upscale_(upscale) {}
    Tensor<T> operator()(const Tensor<T>& y) const override { return fn_(y); }
    std::size_t upscale() const override { return upscale_; }

   private:
    Fn fn_;
    std::size_t upscale_;
};

/// Part names used in LossValue::parts.
namespace parts {
inline constexpr const char* kSure = "sure";
inline constexpr const char* kSeq = "seq";
inline constexpr const char* kMc = "mc";
inline constexpr const char* kDivergence = "divergence_estimate";
inline constexpr const char* kFidelity = "data_fidelity";
}  // namespace parts

template <class T>
struct LossValue {
    Tensor<T> total;  // scalar, differentiable w.r.t. the reconstructor
    std::map<std::string, double> parts;

    double value() const { return static_cast<double>(total.item()); }
    std::optional<double> part(const std::string& name) const {
        auto it = parts.find(name);
        if (it == parts.end()) return std::nullopt;
        return it->second;
    }
};

struct LossOptions {
    double alpha = 1.0;           // SEQ weight in SEI
    bool stop_gradient = true;    // detach x2 in SEQ / EI
    double divergence_delta = 0;  // 0 selects max(sigma/10, 1e-4 * max|y|)
};

/// Finite-difference step used by the Monte-Carlo divergence.
double default_divergence_delta(double sigma, double y_max_abs);

/// (1/m) ||A f(y) - y||^2.
template <class T>
LossValue<T> loss_mc(const Reconstructor<T>& f, const ForwardModel& model, const Tensor<T>& y);

/// One-probe Monte-Carlo divergence b^T (g(y + delta b) - g(y)) / delta with
/// Rademacher b drawn from `rng` in element order. `gy`, when given, must be
/// g(y) and saves one evaluation.
template <class T>
Tensor<T> mc_divergence(const std::function<Tensor<T>(const Tensor<T>&)>& g, const Tensor<T>& y,
                        Rng& rng, double delta, const std::optional<Tensor<T>>& gy = std::nullopt);

/// (1/m) ||A f(y) - y||^2 - sigma^2 + (2 sigma^2 / m) div[A f](y).
/// With sigma = 0 this is exactly loss_mc and no randomness is consumed.
/// `x1`, when given, must be f(y).
template <class T>
LossValue<T> loss_sure(const Reconstructor<T>& f, const ForwardModel& model, const Tensor<T>& y,
                       Rng& rng, const LossOptions& opts = {},
                       const std::optional<Tensor<T>>& x1 = std::nullopt);

/// x1 = f(y); x2 = stop(scale_s(x1)) cropped to a multiple of r;
/// x3 = f(A x2 + fresh noise); (1/n) ||x3 - x2||^2.
/// Randomness is drawn in the order: scale factor, offsets, noise.
template <class T>
LossValue<T> loss_seq(const Reconstructor<T>& f, const ForwardModel& model, const Tensor<T>& y,
                      Rng& rng, const LossOptions& opts = {},
                      const std::optional<Tensor<T>>& x1 = std::nullopt);

/// SURE + alpha * SEQ sharing x1 = f(y). SURE draws first.
template <class T>
LossValue<T> loss_sei(const Reconstructor<T>& f, const ForwardModel& model, const Tensor<T>& y,
                      Rng& rng, const LossOptions& opts = {});

/// (1/m) ||y - f(A y + fresh noise)||^2.
template <class T>
LossValue<T> loss_css(const Reconstructor<T>& f, const ForwardModel& model, const Tensor<T>& y,
                      Rng& rng);

/// SEQ with a random cyclic shift in place of the downscaling. The shift is
/// drawn from `rng` unless `forced` is given; noise is drawn afterwards.
template <class T>
LossValue<T> loss_ei_shift(const Reconstructor<T>& f, const ForwardModel& model,
                           const Tensor<T>& y, Rng& rng, const LossOptions& opts = {},
                           const std::optional<ShiftParams>& forced = std::nullopt);

/// (1/n) ||f(y) - x_gt||^2.
template <class T>
LossValue<T> loss_supervised(const Reconstructor<T>& f, const Tensor<T>& y, const Tensor<T>& x_gt);

}  // namespace sei
