#pragma once

#include <cstdint>

#include "sei/tensor.hpp"

namespace sei {

/// N x N single-channel texture with isotropic amplitude spectrum
/// |k|^(-slope), phases taken from the DFT of seeded white noise, zero mean
/// before a min-max rescale to [0, 1]. N must be a power of two.
Tensor<double> synth_texture(std::uint64_t seed, std::size_t n, double slope);

/// Least-squares slope of log amplitude against log radius over the DFT bins
/// with 2 <= |k| <= n/4, for a single-channel square image.
double fitted_spectral_slope(const Tensor<double>& image);

}  // namespace sei
