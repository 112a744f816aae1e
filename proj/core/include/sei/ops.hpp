#pragma once

// Image-shaped differentiable operators. Images are tensors of shape
// {C, H, W} (planar, row-major); every spatial operator treats the image as
// periodic.

#include <cstddef>
#include <vector>

#include "sei/tensor.hpp"

namespace sei {

template <class T>
using Image = Tensor<T>;

/// Extents of an image tensor; throws unless rank 3.
struct ImageDims {
    std::size_t channels, rows, cols;
};
template <class T>
ImageDims image_dims(const Tensor<T>& x);

/// Kernels with both extents at most this size use the direct path.
inline constexpr std::size_t kDirectConvMaxExtent = 9;

enum class ConvPath { Auto, Direct, Fft };

/// Periodic 2-D convolution of every channel of `x` ({C,H,W}) with the
/// centred kernel `k` ({kh,kw}, odd extents no larger than the image):
///   out(c,i,j) = sum_{a,b} k(a,b) x(c, i-(a-kh/2), j-(b-kw/2)).
/// Differentiable in both arguments.
template <class T>
Tensor<T> conv2d_periodic(const Tensor<T>& x, const Tensor<T>& k, ConvPath path = ConvPath::Auto);

/// Kernel rotated by 180 degrees; the adjoint of convolution with `k` is
/// convolution with `flip(k)`.
template <class T>
Tensor<T> flip_kernel(const Tensor<T>& k);

/// Multi-channel periodic cross-correlation with bias ("same" extents), the
/// building block of the reconstruction network.
///   x: {Cin,H,W}, weight: {Cout,Cin,kh,kw}, bias: {Cout}
template <class T>
Tensor<T> conv2d_layer(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias);

/// Keeps samples at (phase_r + r*i, phase_c + r*j).
template <class T>
Tensor<T> subsample(const Tensor<T>& x, std::size_t r, std::size_t phase_r = 0,
                    std::size_t phase_c = 0);

/// Adjoint of `subsample`: places y(i,j) at (phase_r + r*i, phase_c + r*j) of
/// a zero image with `rows` x `cols` extents.
template <class T>
Tensor<T> upsample_zero(const Tensor<T>& y, std::size_t r, std::size_t rows, std::size_t cols,
                        std::size_t phase_r = 0, std::size_t phase_c = 0);

/// out(c,i,j) = x(c, (i-dr) mod H, (j-dc) mod W).
template <class T>
Tensor<T> cyclic_shift(const Tensor<T>& x, long dr, long dc);

/// Rectangular window starting at (r0, c0), without wrap-around.
template <class T>
Tensor<T> crop(const Tensor<T>& x, std::size_t r0, std::size_t c0, std::size_t rows,
               std::size_t cols);

/// Keys cubic convolution kernel with parameter a (a = -0.5 is the classic
/// "bicubic" choice).
double keys_kernel(double t, double a = -0.5);

/// Sparse periodic 1-D resampling matrix: output sample i is
///   sum_t w((pos_i - t) / width) / width * in[t mod n],
/// with w the Keys kernel. width = 1 interpolates; width = r > 1 yields the
/// anti-aliased kernel used for bicubic downsampling by r.
struct Resampler1D {
    std::size_t in_size = 0;
    std::size_t out_size = 0;
    std::size_t taps = 0;
    std::vector<std::size_t> index;  // out_size * taps
    std::vector<double> weight;      // out_size * taps

    static Resampler1D bicubic(std::size_t in_size, const std::vector<double>& positions,
                               double width = 1.0);
};

/// Separable periodic resampling: rows along the first spatial axis, cols
/// along the second. Linear and differentiable in x.
template <class T>
Tensor<T> resample2d(const Tensor<T>& x, const Resampler1D& rows, const Resampler1D& cols);

/// Periodic bicubic upsampling by integer factor r, aligned with the
/// subsampling phase convention: high-resolution pixel I sits at
/// low-resolution coordinate (I - phase) / r.
template <class T>
Tensor<T> bicubic_upsample(const Tensor<T>& y, std::size_t r, std::size_t phase_r = 0,
                           std::size_t phase_c = 0);

/// Periodic anti-aliased bicubic downsampling by integer factor r: samples
/// at (phase + r*i) with the Keys kernel stretched by r.
template <class T>
Tensor<T> bicubic_downsample(const Tensor<T>& x, std::size_t r, std::size_t phase_r = 0,
                             std::size_t phase_c = 0);

}  // namespace sei
