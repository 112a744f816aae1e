#pragma once

// Group actions on images: the periodic bicubic downscaling transform, cyclic
// shifts, and a spectral bandwidth diagnostic.

#include <utility>

#include "sei/ops.hpp"
#include "sei/rng.hpp"

namespace sei {

/// Scale factor s in (0, 1] and the sub-pixel origin of the coarse grid.
struct ScaleParams {
    double s = 1.0;
    double offset_r = 0.0;
    double offset_c = 0.0;

    /// floor(s * n), the output extent for an axis of length n.
    std::size_t output_extent(std::size_t n) const;
};

/// The factors random_scale draws from.
inline constexpr double kScaleChoices[2] = {0.5, 0.75};

struct ShiftParams {
    long dr = 0;
    long dc = 0;
};

/// Resamples the periodic image on the grid offset + (i, j) / s with bicubic
/// interpolation; no anti-aliasing prefilter. Output extents floor(s*H) x
/// floor(s*W).
template <class T>
Tensor<T> scale_transform(const Tensor<T>& x, const ScaleParams& params);

/// Draws s uniformly from {0.5, 0.75}, then the row and column offsets
/// uniformly from [0, 1/s), in that order.
ScaleParams draw_scale(Rng& rng);

template <class T>
std::pair<Tensor<T>, ScaleParams> random_scale(const Tensor<T>& x, Rng& rng);

template <class T>
Tensor<T> cyclic_shift(const Tensor<T>& x, const ShiftParams& params) {
    return cyclic_shift(x, params.dr, params.dc);
}

/// Uniform integer displacement over the full period of each axis.
ShiftParams draw_shift(std::size_t rows, std::size_t cols, Rng& rng);

/// Smallest radial frequency R (cycles per image) such that the DFT energy
/// of all bins with radius <= R is at least `energy_fraction` of the total,
/// summed over channels.
template <class T>
double measured_bandwidth(const Tensor<T>& x, double energy_fraction);

}  // namespace sei
