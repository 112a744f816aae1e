#pragma once

// Image quality metrics on the luminance channel.

#include "sei/tensor.hpp"

namespace sei {

/// PSNR reported for identical inputs.
inline constexpr double kPsnrCap = 99.0;

/// BT.601 luma weights (full range).
inline constexpr double kLumaR = 0.299;
inline constexpr double kLumaG = 0.587;
inline constexpr double kLumaB = 0.114;

/// 0.299 R + 0.587 G + 0.114 B for a 3-channel image.
template <class T>
Tensor<T> rgb_to_y(const Tensor<T>& image);

/// rgb_to_y for 3 channels, the image itself for 1 channel.
template <class T>
Tensor<T> luminance(const Tensor<T>& image);

/// 10 log10(peak^2 / mse), capped at kPsnrCap.
template <class T>
double psnr(const Tensor<T>& a, const Tensor<T>& b, double peak = 1.0);

/// Mean SSIM (11x11 Gaussian window, sigma 1.5, K1 = 0.01, K2 = 0.03) with
/// periodic windows. Single-channel images.
template <class T>
double ssim(const Tensor<T>& a, const Tensor<T>& b, double peak = 1.0);

}  // namespace sei
