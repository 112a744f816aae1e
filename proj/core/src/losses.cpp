#include "sei/losses.hpp"

#include <algorithm>
#include <cmath>

#include "sei/error.hpp"

namespace sei {

namespace {

template <class T>
double max_abs(const Tensor<T>& y) {
    double m = 0.0;
    for (auto v : y.data()) m = std::max(m, std::abs(static_cast<double>(v)));
    return m;
}

template <class T>
void check_output(const Reconstructor<T>& f, const Tensor<T>& y, const Tensor<T>& x) {
    const auto dy = image_dims(y);
    const auto dx = image_dims(x);
    const auto r = f.upscale();
    if (dx.channels != dy.channels || dx.rows != dy.rows * r || dx.cols != dy.cols * r) {
        throw DimensionError("reconstructor output " + shape_str(x.shape()) +
                             " is not x" + std::to_string(r) + " of input " + shape_str(y.shape()));
    }
}

template <class T>
Tensor<T> reconstruct_checked(const Reconstructor<T>& f, const Tensor<T>& y) {
    auto x = f(y);
    check_output(f, y, x);
    return x;
}

template <class T>
void require_compatible(const ForwardModel& model, const Tensor<T>& y, std::size_t r_net) {
    if (model.r != r_net) {
        throw DimensionError("reconstructor upscale " + std::to_string(r_net) +
                             " does not match forward model r=" + std::to_string(model.r));
    }
    image_dims(y);
}

// Largest multiple of r not exceeding n.
std::size_t floor_multiple(std::size_t n, std::size_t r) { return n - n % r; }

// Shared tail of SEQ and EI: x3 = f(A x2 + noise), loss = mse(x3, x2).
template <class T>
Tensor<T> equivariance_term(const Reconstructor<T>& f, const ForwardModel& model,
                            const Tensor<T>& x2, Rng& rng) {
    auto ax2 = apply_linear(model, x2);
    auto noisy = model.sigma > 0.0 ? add_gaussian_noise(ax2, model.sigma, rng) : ax2;
    auto x3 = reconstruct_checked(f, noisy);
    return mse(x3, x2);
}

}  // namespace

double default_divergence_delta(double sigma, double y_max_abs) {
    return std::max(sigma / 10.0, 1e-4 * y_max_abs);
}

template <class T>
LossValue<T> loss_mc(const Reconstructor<T>& f, const ForwardModel& model, const Tensor<T>& y) {
    require_compatible(model, y, f.upscale());
    auto x = reconstruct_checked(f, y);
    auto total = mse(apply_linear(model, x), y);
    LossValue<T> lv{total, {}};
    lv.parts[parts::kMc] = lv.value();
    lv.parts[parts::kFidelity] = lv.value();
    return lv;
}

template <class T>
Tensor<T> mc_divergence(const std::function<Tensor<T>(const Tensor<T>&)>& g, const Tensor<T>& y,
                        Rng& rng, double delta, const std::optional<Tensor<T>>& gy) {
    if (!(delta > 0.0)) throw ValidationError("mc_divergence: delta must be positive");
    std::vector<T> b(y.numel());
    for (auto& v : b) v = static_cast<T>(rng.rademacher());
    Tensor<T> probe(y.shape(), b);
    std::vector<T> shifted(y.numel());
    for (std::size_t i = 0; i < shifted.size(); ++i)
        shifted[i] = y[i] + static_cast<T>(delta) * b[i];
    auto g_shift = g(Tensor<T>(y.shape(), std::move(shifted)));
    auto g_base = gy ? *gy : g(y);
    return scale(dot(probe, sub(g_shift, g_base)), static_cast<T>(1.0 / delta));
}

template <class T>
LossValue<T> loss_sure(const Reconstructor<T>& f, const ForwardModel& model, const Tensor<T>& y,
                       Rng& rng, const LossOptions& opts, const std::optional<Tensor<T>>& x1) {
    require_compatible(model, y, f.upscale());
    auto forward = [&](const Tensor<T>& in) { return apply_linear(model, reconstruct_checked(f, in)); };
    auto ax = x1 ? apply_linear(model, *x1) : forward(y);
    auto fidelity = mse(ax, y);
    LossValue<T> lv{fidelity, {}};
    lv.parts[parts::kFidelity] = static_cast<double>(fidelity.item());
    if (model.sigma > 0.0) {
        const double sigma2 = model.sigma * model.sigma;
        const double m = static_cast<double>(y.numel());
        const double delta =
            opts.divergence_delta > 0 ? opts.divergence_delta
                                      : default_divergence_delta(model.sigma, max_abs(y));
        auto div = mc_divergence<T>(forward, y, rng, delta, ax);
        lv.parts[parts::kDivergence] = static_cast<double>(div.item());
        lv.total = add(add_scalar(fidelity, static_cast<T>(-sigma2)),
                       scale(div, static_cast<T>(2.0 * sigma2 / m)));
    }
    lv.parts[parts::kSure] = lv.value();
    return lv;
}

template <class T>
LossValue<T> loss_seq(const Reconstructor<T>& f, const ForwardModel& model, const Tensor<T>& y,
                      Rng& rng, const LossOptions& opts, const std::optional<Tensor<T>>& x1_in) {
    require_compatible(model, y, f.upscale());
    auto x1 = x1_in ? *x1_in : reconstruct_checked(f, y);
    auto params = draw_scale(rng);
    auto x2 = scale_transform(opts.stop_gradient ? detach(x1) : x1, params);
    const auto d2 = image_dims(x2);
    const auto rows = floor_multiple(d2.rows, model.r);
    const auto cols = floor_multiple(d2.cols, model.r);
    if (rows == 0 || cols == 0) throw DimensionError("loss_seq: downscaled image smaller than r");
    if (rows != d2.rows || cols != d2.cols) x2 = crop(x2, 0, 0, rows, cols);
    auto total = equivariance_term(f, model, x2, rng);
    LossValue<T> lv{total, {}};
    lv.parts[parts::kSeq] = lv.value();
    return lv;
}

template <class T>
LossValue<T> loss_sei(const Reconstructor<T>& f, const ForwardModel& model, const Tensor<T>& y,
                      Rng& rng, const LossOptions& opts) {
    if (!(opts.alpha > 0.0)) throw ValidationError("loss_sei: alpha must be positive");
    require_compatible(model, y, f.upscale());
    // f(y) is evaluated once and shared by both terms.
    auto x1 = reconstruct_checked(f, y);
    auto sure = loss_sure<T>(f, model, y, rng, opts, x1);
    auto seq = loss_seq<T>(f, model, y, rng, opts, x1);
    LossValue<T> lv{add(sure.total, scale(seq.total, static_cast<T>(opts.alpha))), sure.parts};
    lv.parts[parts::kSeq] = seq.value();
    return lv;
}

template <class T>
LossValue<T> loss_css(const Reconstructor<T>& f, const ForwardModel& model, const Tensor<T>& y,
                      Rng& rng) {
    require_compatible(model, y, f.upscale());
    auto y_tilde = detach(apply_forward(model, y, &rng));
    auto total = mse(reconstruct_checked(f, y_tilde), y);
    LossValue<T> lv{total, {}};
    lv.parts[parts::kFidelity] = lv.value();
    return lv;
}

template <class T>
LossValue<T> loss_ei_shift(const Reconstructor<T>& f, const ForwardModel& model,
                           const Tensor<T>& y, Rng& rng, const LossOptions& opts,
                           const std::optional<ShiftParams>& forced) {
    require_compatible(model, y, f.upscale());
    auto x1 = reconstruct_checked(f, y);
    const auto d = image_dims(x1);
    auto v = forced ? *forced : draw_shift(d.rows, d.cols, rng);
    auto x2 = cyclic_shift(opts.stop_gradient ? detach(x1) : x1, v);
    auto total = equivariance_term(f, model, x2, rng);
    LossValue<T> lv{total, {}};
    lv.parts[parts::kSeq] = lv.value();
    return lv;
}

template <class T>
LossValue<T> loss_supervised(const Reconstructor<T>& f, const Tensor<T>& y, const Tensor<T>& x_gt) {
    auto x = reconstruct_checked(f, y);
    if (x.shape() != x_gt.shape()) {
        throw DimensionError("loss_supervised: reference " + shape_str(x_gt.shape()) +
                             " does not match reconstruction " + shape_str(x.shape()));
    }
    auto total = mse(x, x_gt);
    LossValue<T> lv{total, {}};
    lv.parts[parts::kFidelity] = lv.value();
    return lv;
}

#define SEI_INSTANTIATE_LOSSES(T)                                                             \
    template LossValue<T> loss_mc(const Reconstructor<T>&, const ForwardModel&,               \
                                  const Tensor<T>&);                                          \
    template Tensor<T> mc_divergence(const std::function<Tensor<T>(const Tensor<T>&)>&,       \
                                     const Tensor<T>&, Rng&, double,                          \
                                     const std::optional<Tensor<T>>&);                        \
    template LossValue<T> loss_sure(const Reconstructor<T>&, const ForwardModel&,             \
                                    const Tensor<T>&, Rng&, const LossOptions&,               \
                                    const std::optional<Tensor<T>>&);                         \
    template LossValue<T> loss_seq(const Reconstructor<T>&, const ForwardModel&,              \
                                   const Tensor<T>&, Rng&, const LossOptions&,                \
                                   const std::optional<Tensor<T>>&);                          \
    template LossValue<T> loss_sei(const Reconstructor<T>&, const ForwardModel&,              \
                                   const Tensor<T>&, Rng&, const LossOptions&);               \
    template LossValue<T> loss_css(const Reconstructor<T>&, const ForwardModel&,              \
                                   const Tensor<T>&, Rng&);                                   \
    template LossValue<T> loss_ei_shift(const Reconstructor<T>&, const ForwardModel&,         \
                                        const Tensor<T>&, Rng&, const LossOptions&,           \
                                        const std::optional<ShiftParams>&);                   \
    template LossValue<T> loss_supervised(const Reconstructor<T>&, const Tensor<T>&,          \
                                          const Tensor<T>&);

SEI_INSTANTIATE_LOSSES(float)
SEI_INSTANTIATE_LOSSES(double)

}  // namespace sei
