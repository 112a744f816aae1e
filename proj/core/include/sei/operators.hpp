#pragma once

// Degradation models: point-spread functions and the forward operator
//   y = subsample_r(h * x) + noise
// together with its exact adjoint.

#include <cstddef>
#include <string>
#include <vector>

#include "sei/ops.hpp"
#include "sei/rng.hpp"

namespace sei {

enum class PsfKind { Delta, Gaussian, Box, Bicubic };

std::string to_string(PsfKind kind);

/// A centred, odd-sized blur kernel in pixel units. `parameter` is sigma for
/// Gaussian, the radius for box, the factor r for bicubic, unused for delta.
struct Psf {
    PsfKind kind = PsfKind::Delta;
    double parameter = 0.0;
    std::size_t size = 1;
    std::vector<double> taps{1.0};  // size * size, row-major

    template <class T>
    Tensor<T> kernel() const;

    double sum() const;
    /// Canonical text form accepted by `parse_psf`, e.g. "gaussian:2".
    std::string spec() const;
    bool operator==(const Psf&) const = default;
};

Psf delta_psf();

/// Discretised isotropic Gaussian renormalised to unit mass. `support` = 0
/// selects 2*ceil(3*sigma)+1 taps.
Psf gaussian_psf(double sigma, std::size_t support = 0);

/// (2*radius+1)^2 uniform taps.
Psf box_psf(int radius);

/// Separable Keys (a = -0.5) kernel stretched by r: taps K(t/r)/r for
/// |t| <= 2r-1. Blurring with it and subsampling by r is bicubic
/// downsampling.
Psf bicubic_psf(int r);

/// Parses "delta", "gaussian:<sigma>", "box:<radius>" or "bicubic:<r>".
Psf parse_psf(const std::string& spec);

/// One row per line, space-separated taps.
std::string psf_to_text(const Psf& psf);

enum class ForwardMode { Blur, BicubicDownsample };

struct ForwardModel {
    Psf psf = delta_psf();
    std::size_t r = 1;
    double sigma = 0.0;
    std::size_t phase_r = 0;
    std::size_t phase_c = 0;
    ForwardMode mode = ForwardMode::Blur;

    static ForwardModel deblurring(Psf psf, double sigma);
    static ForwardModel super_resolution(int r, double sigma);

    /// Throws ValidationError when invariants are violated.
    void validate() const;

    /// Measurement extents for an image with the given extents.
    std::size_t measured_rows(std::size_t rows) const;
    std::size_t measured_cols(std::size_t cols) const;

    bool operator==(const ForwardModel&) const = default;
};

/// Noiseless linear part A x; differentiable in x.
template <class T>
Tensor<T> apply_linear(const ForwardModel& model, const Tensor<T>& x);

/// A x + noise. `rng` is required when sigma > 0; the noise is a constant in
/// the graph.
template <class T>
Tensor<T> apply_forward(const ForwardModel& model, const Tensor<T>& x, Rng* rng);

/// A^T y = flip(h) * upsample_zero(y).
template <class T>
Tensor<T> apply_adjoint(const ForwardModel& model, const Tensor<T>& y);

/// x + eps with eps i.i.d. N(0, sigma^2), drawn from `rng` in element order.
template <class T>
Tensor<T> add_gaussian_noise(const Tensor<T>& x, double sigma, Rng& rng);

}  // namespace sei
