#include "sei/transforms.hpp"

#include <algorithm>
#include <cmath>

#include "sei/error.hpp"
#include "sei/fft.hpp"

namespace sei {

std::size_t ScaleParams::output_extent(std::size_t n) const {
    return static_cast<std::size_t>(std::floor(s * static_cast<double>(n) + 1e-9));
}

template <class T>
Tensor<T> scale_transform(const Tensor<T>& x, const ScaleParams& params) {
    if (!(params.s > 0.0 && params.s <= 1.0)) {
        throw ValidationError("scale_transform: s must lie in (0, 1], got " +
                              std::to_string(params.s));
    }
    const auto d = image_dims(x);
    auto grid = [&](std::size_t n, double offset) {
        std::vector<double> p(params.output_extent(n));
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = offset + static_cast<double>(i) / params.s;
        return p;
    };
    const auto ho = params.output_extent(d.rows);
    const auto wo = params.output_extent(d.cols);
    if (ho == 0 || wo == 0) throw DimensionError("scale_transform: output would be empty");
    return resample2d(x, Resampler1D::bicubic(d.rows, grid(d.rows, params.offset_r)),
                      Resampler1D::bicubic(d.cols, grid(d.cols, params.offset_c)));
}

ScaleParams draw_scale(Rng& rng) {
    ScaleParams p;
    p.s = kScaleChoices[rng.uniform_int(0, 1)];
    p.offset_r = rng.uniform(0.0, 1.0 / p.s);
    p.offset_c = rng.uniform(0.0, 1.0 / p.s);
    return p;
}

template <class T>
std::pair<Tensor<T>, ScaleParams> random_scale(const Tensor<T>& x, Rng& rng) {
    auto p = draw_scale(rng);
    return {scale_transform(x, p), p};
}

ShiftParams draw_shift(std::size_t rows, std::size_t cols, Rng& rng) {
    ShiftParams p;
    p.dr = static_cast<long>(rng.uniform_int(0, static_cast<std::int64_t>(rows) - 1));
    p.dc = static_cast<long>(rng.uniform_int(0, static_cast<std::int64_t>(cols) - 1));
    return p;
}

template <class T>
double measured_bandwidth(const Tensor<T>& x, double energy_fraction) {
    if (!(energy_fraction > 0.0 && energy_fraction < 1.0)) {
        throw ValidationError("measured_bandwidth: energy fraction must lie in (0, 1)");
    }
    const auto d = image_dims(x);
    const std::size_t plane = d.rows * d.cols;
    std::vector<double> energy(plane, 0.0);
    for (std::size_t c = 0; c < d.channels; ++c) {
        std::vector<double> v(x.values().begin() + c * plane, x.values().begin() + (c + 1) * plane);
        auto f = fft::dft2_real(v, d.rows, d.cols);
        for (std::size_t i = 0; i < plane; ++i) energy[i] += std::norm(f[i]);
    }
    std::vector<std::pair<double, double>> bins(plane);
    double total = 0.0;
    for (std::size_t i = 0; i < d.rows; ++i)
        for (std::size_t j = 0; j < d.cols; ++j) {
            const double kr = static_cast<double>(fft::signed_bin(i, d.rows));
            const double kc = static_cast<double>(fft::signed_bin(j, d.cols));
            bins[i * d.cols + j] = {std::hypot(kr, kc), energy[i * d.cols + j]};
            total += energy[i * d.cols + j];
        }
    if (total == 0.0) return 0.0;
    std::sort(bins.begin(), bins.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < bins.size(); ++i) {
        acc += bins[i].second;
        // Bins sharing a radius are taken together.
        if (i + 1 < bins.size() && bins[i + 1].first == bins[i].first) continue;
        if (acc >= energy_fraction * total) return bins[i].first;
    }
    return bins.back().first;
}

#define SEI_INSTANTIATE_TRANSFORMS(T)                                                     \
    template Tensor<T> scale_transform(const Tensor<T>&, const ScaleParams&);             \
    template std::pair<Tensor<T>, ScaleParams> random_scale(const Tensor<T>&, Rng&);      \
    template double measured_bandwidth(const Tensor<T>&, double);

SEI_INSTANTIATE_TRANSFORMS(float)
SEI_INSTANTIATE_TRANSFORMS(double)

}  // namespace sei
