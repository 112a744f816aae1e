#include "sei/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "sei/error.hpp"
#include "sei/ops.hpp"

namespace sei {

namespace {

constexpr int kWindow = 11;
constexpr double kWindowSigma = 1.5;

std::vector<double> gaussian_window_1d() {
    std::vector<double> w(kWindow);
    double total = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double t = i - kWindow / 2;
        w[i] = std::exp(-t * t / (2.0 * kWindowSigma * kWindowSigma));
        total += w[i];
    }
    for (auto& v : w) v /= total;
    return w;
}

// Separable periodic filtering with the SSIM window.
std::vector<double> window_filter(const std::vector<double>& x, std::size_t h, std::size_t w,
                                  const std::vector<double>& g) {
    std::vector<double> tmp(x.size()), out(x.size());
    const long half = kWindow / 2;
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            double acc = 0.0;
            for (long t = -half; t <= half; ++t) {
                const long jj = ((static_cast<long>(j) + t) % static_cast<long>(w) + static_cast<long>(w)) %
                                static_cast<long>(w);
                acc += g[t + half] * x[i * w + jj];
            }
            tmp[i * w + j] = acc;
        }
    }
    for (std::size_t i = 0; i < h; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            double acc = 0.0;
            for (long t = -half; t <= half; ++t) {
                const long ii = ((static_cast<long>(i) + t) % static_cast<long>(h) + static_cast<long>(h)) %
                                static_cast<long>(h);
                acc += g[t + half] * tmp[ii * w + j];
            }
            out[i * w + j] = acc;
        }
    }
    return out;
}

template <class T>
void require_same(const Tensor<T>& a, const Tensor<T>& b, const char* who) {
    if (a.shape() != b.shape()) {
        throw DimensionError(std::string(who) + ": shape mismatch " + shape_str(a.shape()) + " vs " +
                             shape_str(b.shape()));
    }
}

}  // namespace

template <class T>
Tensor<T> rgb_to_y(const Tensor<T>& image) {
    const auto d = image_dims(image);
    if (d.channels != 3) {
        throw DimensionError("rgb_to_y: expected 3 channels, got " + std::to_string(d.channels));
    }
    const std::size_t n = d.rows * d.cols;
    std::vector<T> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<T>(kLumaR * image[i] + kLumaG * image[n + i] + kLumaB * image[2 * n + i]);
    }
    return Tensor<T>({1, d.rows, d.cols}, std::move(y));
}

template <class T>
Tensor<T> luminance(const Tensor<T>& image) {
    const auto d = image_dims(image);
    if (d.channels == 1) return image;
    return rgb_to_y(image);
}

template <class T>
double psnr(const Tensor<T>& a, const Tensor<T>& b, double peak) {
    require_same(a, b, "psnr");
    if (a.numel() == 0) throw DimensionError("psnr: empty images");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.numel(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        acc += d * d;
    }
    const double m = acc / static_cast<double>(a.numel());
    if (m == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(peak * peak / m));
}

template <class T>
double ssim(const Tensor<T>& a, const Tensor<T>& b, double peak) {
    require_same(a, b, "ssim");
    const auto d = image_dims(a);
    if (d.channels != 1) throw DimensionError("ssim: expected a single-channel image");
    const std::size_t n = d.rows * d.cols;
    std::vector<double> x(a.values().begin(), a.values().end());
    std::vector<double> y(b.values().begin(), b.values().end());
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
        xy[i] = x[i] * y[i];
    }
    const auto g = gaussian_window_1d();
    const auto mx = window_filter(x, d.rows, d.cols, g);
    const auto my = window_filter(y, d.rows, d.cols, g);
    const auto sxx = window_filter(xx, d.rows, d.cols, g);
    const auto syy = window_filter(yy, d.rows, d.cols, g);
    const auto sxy = window_filter(xy, d.rows, d.cols, g);
    const double c1 = (0.01 * peak) * (0.01 * peak);
    const double c2 = (0.03 * peak) * (0.03 * peak);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double vx = sxx[i] - mx[i] * mx[i];
        const double vy = syy[i] - my[i] * my[i];
        const double cxy = sxy[i] - mx[i] * my[i];
        total += ((2.0 * mx[i] * my[i] + c1) * (2.0 * cxy + c2)) /
                 ((mx[i] * mx[i] + my[i] * my[i] + c1) * (vx + vy + c2));
    }
    return total / static_cast<double>(n);
}

template Tensor<float> rgb_to_y(const Tensor<float>&);
template Tensor<double> rgb_to_y(const Tensor<double>&);
template Tensor<float> luminance(const Tensor<float>&);
template Tensor<double> luminance(const Tensor<double>&);
template double psnr(const Tensor<float>&, const Tensor<float>&, double);
template double psnr(const Tensor<double>&, const Tensor<double>&, double);
template double ssim(const Tensor<float>&, const Tensor<float>&, double);
template double ssim(const Tensor<double>&, const Tensor<double>&, double);

}  // namespace sei
