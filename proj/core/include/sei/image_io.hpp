#pragma once

// Reading and writing images as {C, H, W} tensors with intensities in [0, 1].
// Supported: PNG (8/16-bit gray, gray+alpha, RGB, RGBA, palette) and binary
// PGM/PPM (P5/P6, maxval up to 65535). Alpha channels are dropped on load.

#include <filesystem>

#include "sei/tensor.hpp"

namespace sei {

Tensor<double> load_image(const std::filesystem::path& path);

/// Writes 1- or 3-channel images. The format follows the extension (.png,
/// .pgm, .ppm). Values are clamped to [0, 1] and rounded to the nearest code.
void save_image(const Tensor<double>& image, const std::filesystem::path& path,
                int bit_depth = 8);

/// True for extensions handled by load_image.
bool is_image_path(const std::filesystem::path& path);

}  // namespace sei
