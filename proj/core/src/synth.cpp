#include "sei/synth.hpp"

#include <algorithm>
#include <cmath>

#include "sei/error.hpp"
#include "sei/fft.hpp"
#include "sei/ops.hpp"
#include "sei/rng.hpp"

namespace sei {

Tensor<double> synth_texture(std::uint64_t seed, std::size_t n, double slope) {
    if (n < 2 || (n & (n - 1)) != 0) {
        throw ValidationError("synth_texture: N must be a power of two, got " + std::to_string(n));
    }
    if (!(slope > 0.0)) throw ValidationError("synth_texture: slope must be positive");
    Rng rng(seed, streams::kTexture);
    std::vector<double> noise(n * n);
    for (auto& v : noise) v = rng.normal();
    auto spec = fft::dft2_real(noise, n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            auto& c = spec[i * n + j];
            const double ki = static_cast<double>(fft::signed_bin(i, n));
            const double kj = static_cast<double>(fft::signed_bin(j, n));
            const double radius = std::hypot(ki, kj);
            const double mag = std::abs(c);
            if (radius == 0.0 || mag == 0.0) {
                c = 0.0;
                continue;
            }
            c *= std::pow(radius, -slope) / mag;
        }
    }
    fft::dft2(spec, n, n, true);
    std::vector<double> v(n * n);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = spec[i].real();
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    const double a = *lo, span = *hi - *lo;
    for (auto& x : v) x = span > 0.0 ? (x - a) / span : 0.0;
    return Tensor<double>({1, n, n}, std::move(v));
}

double fitted_spectral_slope(const Tensor<double>& image) {
    const auto d = image_dims(image);
    if (d.channels != 1 || d.rows != d.cols) {
        throw DimensionError("fitted_spectral_slope: need a square single-channel image");
    }
    const std::size_t n = d.rows;
    const auto spec = fft::dft2_real(image.values(), n, n);
    double sx = 0, sy = 0, sxx = 0, sxy = 0, count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double r = std::hypot(static_cast<double>(fft::signed_bin(i, n)),
                                        static_cast<double>(fft::signed_bin(j, n)));
            if (r < 2.0 || r > static_cast<double>(n) / 4.0) continue;
            const double amp = std::abs(spec[i * n + j]);
            if (amp <= 0.0) continue;
            const double lx = std::log(r), ly = std::log(amp);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            count += 1;
        }
    }
    if (count < 2) throw NumericalError("fitted_spectral_slope: too few frequency bins");
    return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

}  // namespace sei
