#include "sei/ops.hpp"

#include <cmath>
#include <complex>

#include "sei/error.hpp"
#include "sei/fft.hpp"

namespace sei {

namespace {

inline std::size_t wrap(long i, std::size_t n) {
    long m = i % static_cast<long>(n);
    return static_cast<std::size_t>(m < 0 ? m + static_cast<long>(n) : m);
}

// dst(i,j) += w * src((i-dr) mod H, (j-dc) mod W) for one H x W plane.
template <class T>
void accumulate_shifted(T* dst, const T* src, std::size_t rows, std::size_t cols, long dr,
                        long dc, T w) {
    const std::size_t sc = wrap(-dc, cols);  // column of src feeding dst column 0
    const std::size_t head = cols - sc;
    for (std::size_t i = 0; i < rows; ++i) {
        const T* s = src + wrap(static_cast<long>(i) - dr, rows) * cols;
        T* d = dst + i * cols;
        for (std::size_t j = 0; j < head; ++j) d[j] += w * s[sc + j];
        for (std::size_t j = head; j < cols; ++j) d[j] += w * s[j - head];
    }
}

// sum_{i,j} a(i,j) * b((i-dr) mod H, (j-dc) mod W)
template <class T>
T shifted_inner(const T* a, const T* b, std::size_t rows, std::size_t cols, long dr, long dc) {
    const std::size_t sc = wrap(-dc, cols);
    const std::size_t head = cols - sc;
    T acc = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        const T* s = b + wrap(static_cast<long>(i) - dr, rows) * cols;
        const T* d = a + i * cols;
        for (std::size_t j = 0; j < head; ++j) acc += d[j] * s[sc + j];
        for (std::size_t j = head; j < cols; ++j) acc += d[j] * s[j - head];
    }
    return acc;
}

template <class T>
std::vector<T> conv_direct(const std::vector<T>& x, const ImageDims& d, const std::vector<T>& k,
                           std::size_t kh, std::size_t kw, bool adjoint) {
    std::vector<T> out(x.size(), T(0));
    const long ch = static_cast<long>(kh / 2);
    const long cw = static_cast<long>(kw / 2);
    const std::size_t plane = d.rows * d.cols;
    for (std::size_t c = 0; c < d.channels; ++c) {
        for (std::size_t a = 0; a < kh; ++a) {
            for (std::size_t b = 0; b < kw; ++b) {
                const T w = k[a * kw + b];
                if (w == T(0)) continue;
                long dr = static_cast<long>(a) - ch;
                long dc = static_cast<long>(b) - cw;
                if (adjoint) {
                    dr = -dr;
                    dc = -dc;
                }
                accumulate_shifted(out.data() + c * plane, x.data() + c * plane, d.rows, d.cols,
                                   dr, dc, w);
            }
        }
    }
    return out;
}

template <class T>
std::vector<T> conv_fft(const std::vector<T>& x, const ImageDims& d, const std::vector<T>& k,
                        std::size_t kh, std::size_t kw, bool adjoint) {
    const std::size_t plane = d.rows * d.cols;
    std::vector<fft::Complex> kf(plane, 0.0);
    const long ch = static_cast<long>(kh / 2);
    const long cw = static_cast<long>(kw / 2);
    for (std::size_t a = 0; a < kh; ++a) {
        for (std::size_t b = 0; b < kw; ++b) {
            const std::size_t i = wrap(static_cast<long>(a) - ch, d.rows);
            const std::size_t j = wrap(static_cast<long>(b) - cw, d.cols);
            kf[i * d.cols + j] += static_cast<double>(k[a * kw + b]);
        }
    }
    fft::dft2(kf, d.rows, d.cols);
    if (adjoint) {
        for (auto& v : kf) v = std::conj(v);
    }
    std::vector<T> out(x.size());
    std::vector<fft::Complex> buf(plane);
    for (std::size_t c = 0; c < d.channels; ++c) {
        for (std::size_t i = 0; i < plane; ++i) buf[i] = static_cast<double>(x[c * plane + i]);
        fft::dft2(buf, d.rows, d.cols);
        for (std::size_t i = 0; i < plane; ++i) buf[i] *= kf[i];
        fft::dft2(buf, d.rows, d.cols, true);
        for (std::size_t i = 0; i < plane; ++i) out[c * plane + i] = static_cast<T>(buf[i].real());
    }
    return out;
}

template <class T>
std::vector<T> conv_dispatch(const std::vector<T>& x, const ImageDims& d, const std::vector<T>& k,
                             std::size_t kh, std::size_t kw, bool adjoint, ConvPath path) {
    bool direct = path == ConvPath::Direct ||
                  (path == ConvPath::Auto && kh <= kDirectConvMaxExtent && kw <= kDirectConvMaxExtent);
    return direct ? conv_direct(x, d, k, kh, kw, adjoint) : conv_fft(x, d, k, kh, kw, adjoint);
}

}  // namespace

template <class T>
ImageDims image_dims(const Tensor<T>& x) {
    if (x.rank() != 3) {
        throw DimensionError("expected an image of shape {C,H,W}, got " + shape_str(x.shape()));
    }
    return {x.dim(0), x.dim(1), x.dim(2)};
}

template <class T>
Tensor<T> conv2d_periodic(const Tensor<T>& x, const Tensor<T>& k, ConvPath path) {
    const auto d = image_dims(x);
    if (k.rank() != 2) throw DimensionError("conv2d_periodic: kernel must be 2-D");
    const std::size_t kh = k.dim(0), kw = k.dim(1);
    if (kh % 2 == 0 || kw % 2 == 0) {
        throw DimensionError("conv2d_periodic: kernel extents must be odd, got " +
                             shape_str(k.shape()));
    }
    if (kh > d.rows || kw > d.cols) {
        throw DimensionError("conv2d_periodic: kernel " + shape_str(k.shape()) +
                             " larger than image " + shape_str(x.shape()));
    }
    auto out = conv_dispatch(x.values(), d, k.values(), kh, kw, false, path);
    auto xn = x.node();
    auto kn = k.node();
    return Tensor<T>::make_result(
        x.shape(), std::move(out), {x, k},
        [xn, kn, d, kh, kw, path](std::span<const T> g, std::span<std::vector<T>*> pg) {
            std::vector<T> gv(g.begin(), g.end());
            if (pg[0]) {
                auto gx = conv_dispatch(gv, d, kn->value, kh, kw, true, path);
                for (std::size_t i = 0; i < gx.size(); ++i) (*pg[0])[i] += gx[i];
            }
            if (pg[1]) {
                const long ch = static_cast<long>(kh / 2);
                const long cw = static_cast<long>(kw / 2);
                const std::size_t plane = d.rows * d.cols;
                for (std::size_t a = 0; a < kh; ++a) {
                    for (std::size_t b = 0; b < kw; ++b) {
                        T acc = 0;
                        for (std::size_t c = 0; c < d.channels; ++c) {
                            acc += shifted_inner(gv.data() + c * plane,
                                                 xn->value.data() + c * plane, d.rows, d.cols,
                                                 static_cast<long>(a) - ch,
                                                 static_cast<long>(b) - cw);
                        }
                        (*pg[1])[a * kw + b] += acc;
                    }
                }
            }
        });
}

template <class T>
Tensor<T> flip_kernel(const Tensor<T>& k) {
    if (k.rank() != 2) throw DimensionError("flip_kernel: kernel must be 2-D");
    const std::size_t kh = k.dim(0), kw = k.dim(1);
    std::vector<T> v(k.numel());
    for (std::size_t a = 0; a < kh; ++a)
        for (std::size_t b = 0; b < kw; ++b) v[a * kw + b] = k[(kh - 1 - a) * kw + (kw - 1 - b)];
    return Tensor<T>::make_result(k.shape(), std::move(v), {k},
                                  [kh, kw](std::span<const T> g, std::span<std::vector<T>*> pg) {
                                      for (std::size_t a = 0; a < kh; ++a)
                                          for (std::size_t b = 0; b < kw; ++b)
                                              (*pg[0])[(kh - 1 - a) * kw + (kw - 1 - b)] +=
                                                  g[a * kw + b];
                                  });
}

template <class T>
Tensor<T> conv2d_layer(const Tensor<T>& x, const Tensor<T>& weight, const Tensor<T>& bias) {
    const auto d = image_dims(x);
    if (weight.rank() != 4 || weight.dim(1) != d.channels) {
        throw DimensionError("conv2d_layer: weight " + shape_str(weight.shape()) +
                             " incompatible with input " + shape_str(x.shape()));
    }
    const std::size_t cout = weight.dim(0), cin = d.channels;
    const std::size_t kh = weight.dim(2), kw = weight.dim(3);
    if (bias.numel() != cout) throw DimensionError("conv2d_layer: bias size mismatch");
    if (kh % 2 == 0 || kw % 2 == 0 || kh > d.rows || kw > d.cols) {
        throw DimensionError("conv2d_layer: kernel " + shape_str(weight.shape()) +
                             " invalid for input " + shape_str(x.shape()));
    }
    const std::size_t H = d.rows, W = d.cols;
    const std::size_t ph = kh / 2, pw = kw / 2;
    const std::size_t Hp = H + kh - 1, Wp = W + kw - 1;

    // Periodically padded copy of the input, kept for the weight gradient.
    std::vector<T> pad(cin * Hp * Wp);
    for (std::size_t c = 0; c < cin; ++c) {
        const T* src = x.data().data() + c * H * W;
        T* dst = pad.data() + c * Hp * Wp;
        for (std::size_t y = 0; y < Hp; ++y) {
            const T* srow = src + wrap(static_cast<long>(y) - static_cast<long>(ph), H) * W;
            T* drow = dst + y * Wp;
            for (std::size_t xx = 0; xx < Wp; ++xx)
                drow[xx] = srow[wrap(static_cast<long>(xx) - static_cast<long>(pw), W)];
        }
    }

    const T* w = weight.data().data();
    std::vector<T> out(cout * H * W);
    for (std::size_t co = 0; co < cout; ++co) {
        T* o = out.data() + co * H * W;
        std::fill(o, o + H * W, bias[co]);
        for (std::size_t ci = 0; ci < cin; ++ci) {
            const T* p = pad.data() + ci * Hp * Wp;
            const T* wk = w + (co * cin + ci) * kh * kw;
            for (std::size_t y = 0; y < H; ++y) {
                T* orow = o + y * W;
                for (std::size_t ky = 0; ky < kh; ++ky) {
                    const T* prow = p + (y + ky) * Wp;
                    for (std::size_t kx = 0; kx < kw; ++kx) {
                        const T wv = wk[ky * kw + kx];
                        const T* s = prow + kx;
                        for (std::size_t xx = 0; xx < W; ++xx) orow[xx] += wv * s[xx];
                    }
                }
            }
        }
    }

    auto wn = weight.node();
    return Tensor<T>::make_result(
        Shape{cout, H, W}, std::move(out), {x, weight, bias},
        [pad = std::move(pad), wn, cin, cout, H, W, kh, kw, ph, pw, Hp, Wp](
            std::span<const T> g, std::span<std::vector<T>*> pg) {
            const T* gp = g.data();
            if (pg[2]) {
                for (std::size_t co = 0; co < cout; ++co) {
                    T acc = 0;
                    for (std::size_t i = 0; i < H * W; ++i) acc += gp[co * H * W + i];
                    (*pg[2])[co] += acc;
                }
            }
            if (pg[1]) {
                auto& gw = *pg[1];
                // Column-wise partial sums keep the inner loop vectorisable.
                std::vector<T> partial(W);
                for (std::size_t co = 0; co < cout; ++co) {
                    const T* go = gp + co * H * W;
                    for (std::size_t ci = 0; ci < cin; ++ci) {
                        const T* p = pad.data() + ci * Hp * Wp;
                        T* gwk = gw.data() + (co * cin + ci) * kh * kw;
                        for (std::size_t ky = 0; ky < kh; ++ky) {
                            for (std::size_t kx = 0; kx < kw; ++kx) {
                                std::fill(partial.begin(), partial.end(), T(0));
                                for (std::size_t y = 0; y < H; ++y) {
                                    const T* s = p + (y + ky) * Wp + kx;
                                    const T* gr = go + y * W;
                                    for (std::size_t xx = 0; xx < W; ++xx) partial[xx] += gr[xx] * s[xx];
                                }
                                T acc = 0;
                                for (auto v : partial) acc += v;
                                gwk[ky * kw + kx] += acc;
                            }
                        }
                    }
                }
            }
            if (pg[0]) {
                const T* w = wn->value.data();
                std::vector<T> gpad(cin * Hp * Wp, T(0));
                for (std::size_t co = 0; co < cout; ++co) {
                    const T* go = gp + co * H * W;
                    for (std::size_t ci = 0; ci < cin; ++ci) {
                        T* q = gpad.data() + ci * Hp * Wp;
                        const T* wk = w + (co * cin + ci) * kh * kw;
                        for (std::size_t y = 0; y < H; ++y) {
                            const T* gr = go + y * W;
                            for (std::size_t ky = 0; ky < kh; ++ky) {
                                T* qrow = q + (y + ky) * Wp;
                                for (std::size_t kx = 0; kx < kw; ++kx) {
                                    const T wv = wk[ky * kw + kx];
                                    T* dq = qrow + kx;
                                    for (std::size_t xx = 0; xx < W; ++xx) dq[xx] += wv * gr[xx];
                                }
                            }
                        }
                    }
                }
                auto& gx = *pg[0];
                for (std::size_t ci = 0; ci < cin; ++ci) {
                    const T* q = gpad.data() + ci * Hp * Wp;
                    T* dst = gx.data() + ci * H * W;
                    for (std::size_t y = 0; y < Hp; ++y) {
                        const std::size_t sy = wrap(static_cast<long>(y) - static_cast<long>(ph), H);
                        for (std::size_t xx = 0; xx < Wp; ++xx) {
                            dst[sy * W + wrap(static_cast<long>(xx) - static_cast<long>(pw), W)] +=
                                q[y * Wp + xx];
                        }
                    }
                }
            }
        });
}

template <class T>
Tensor<T> subsample(const Tensor<T>& x, std::size_t r, std::size_t phase_r, std::size_t phase_c) {
    const auto d = image_dims(x);
    if (r == 0) throw DimensionError("subsample: factor must be >= 1");
    if (d.rows % r != 0 || d.cols % r != 0) {
        throw DimensionError("subsample: extents " + shape_str(x.shape()) +
                             " not divisible by " + std::to_string(r));
    }
    if (phase_r >= r || phase_c >= r) throw DimensionError("subsample: phase must lie in [0, r)");
    const std::size_t ho = d.rows / r, wo = d.cols / r;
    std::vector<T> out(d.channels * ho * wo);
    std::vector<std::size_t> src(out.size());
    for (std::size_t c = 0; c < d.channels; ++c)
        for (std::size_t i = 0; i < ho; ++i)
            for (std::size_t j = 0; j < wo; ++j) {
                const std::size_t o = (c * ho + i) * wo + j;
                src[o] = (c * d.rows + phase_r + r * i) * d.cols + phase_c + r * j;
                out[o] = x[src[o]];
            }
    return Tensor<T>::make_result(Shape{d.channels, ho, wo}, std::move(out), {x},
                                  [src = std::move(src)](std::span<const T> g,
                                                         std::span<std::vector<T>*> pg) {
                                      for (std::size_t i = 0; i < g.size(); ++i)
                                          (*pg[0])[src[i]] += g[i];
                                  });
}

template <class T>
Tensor<T> upsample_zero(const Tensor<T>& y, std::size_t r, std::size_t rows, std::size_t cols,
                        std::size_t phase_r, std::size_t phase_c) {
    const auto d = image_dims(y);
    if (r == 0 || d.rows * r != rows || d.cols * r != cols) {
        throw DimensionError("upsample_zero: " + shape_str(y.shape()) + " x" + std::to_string(r) +
                             " does not produce " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    if (phase_r >= r || phase_c >= r) throw DimensionError("upsample_zero: phase must lie in [0, r)");
    std::vector<T> out(d.channels * rows * cols, T(0));
    std::vector<std::size_t> dst(y.numel());
    for (std::size_t c = 0; c < d.channels; ++c)
        for (std::size_t i = 0; i < d.rows; ++i)
            for (std::size_t j = 0; j < d.cols; ++j) {
                const std::size_t o = (c * d.rows + i) * d.cols + j;
                dst[o] = (c * rows + phase_r + r * i) * cols + phase_c + r * j;
                out[dst[o]] = y[o];
            }
    return Tensor<T>::make_result(Shape{d.channels, rows, cols}, std::move(out), {y},
                                  [dst = std::move(dst)](std::span<const T> g,
                                                         std::span<std::vector<T>*> pg) {
                                      for (std::size_t i = 0; i < dst.size(); ++i)
                                          (*pg[0])[i] += g[dst[i]];
                                  });
}

template <class T>
Tensor<T> cyclic_shift(const Tensor<T>& x, long dr, long dc) {
    const auto d = image_dims(x);
    const std::size_t plane = d.rows * d.cols;
    std::vector<T> out(x.numel(), T(0));
    for (std::size_t c = 0; c < d.channels; ++c) {
        const T* s = x.data().data() + c * plane;
        T* o = out.data() + c * plane;
        for (std::size_t i = 0; i < d.rows; ++i) {
            const std::size_t si = wrap(static_cast<long>(i) - dr, d.rows);
            for (std::size_t j = 0; j < d.cols; ++j)
                o[i * d.cols + j] = s[si * d.cols + wrap(static_cast<long>(j) - dc, d.cols)];
        }
    }
    return Tensor<T>::make_result(
        x.shape(), std::move(out), {x}, [d, dr, dc](std::span<const T> g, std::span<std::vector<T>*> pg) {
            const std::size_t plane = d.rows * d.cols;
            for (std::size_t c = 0; c < d.channels; ++c)
                accumulate_shifted(pg[0]->data() + c * plane, g.data() + c * plane, d.rows,
                                   d.cols, -dr, -dc, T(1));
        });
}

template <class T>
Tensor<T> crop(const Tensor<T>& x, std::size_t r0, std::size_t c0, std::size_t rows,
               std::size_t cols) {
    const auto d = image_dims(x);
    if (r0 + rows > d.rows || c0 + cols > d.cols) {
        throw DimensionError("crop: window exceeds image " + shape_str(x.shape()));
    }
    std::vector<T> out(d.channels * rows * cols);
    for (std::size_t c = 0; c < d.channels; ++c)
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                out[(c * rows + i) * cols + j] = x[(c * d.rows + r0 + i) * d.cols + c0 + j];
    return Tensor<T>::make_result(
        Shape{d.channels, rows, cols}, std::move(out), {x},
        [d, r0, c0, rows, cols](std::span<const T> g, std::span<std::vector<T>*> pg) {
            for (std::size_t c = 0; c < d.channels; ++c)
                for (std::size_t i = 0; i < rows; ++i)
                    for (std::size_t j = 0; j < cols; ++j)
                        (*pg[0])[(c * d.rows + r0 + i) * d.cols + c0 + j] +=
                            g[(c * rows + i) * cols + j];
        });
}

double keys_kernel(double t, double a) {
    t = std::abs(t);
    if (t < 1.0) return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
    if (t < 2.0) return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
    return 0.0;
}

Resampler1D Resampler1D::bicubic(std::size_t in_size, const std::vector<double>& positions,
                                 double width) {
    if (in_size == 0) throw DimensionError("resampler: empty input axis");
    if (!(width >= 1.0)) throw ValidationError("resampler: kernel width must be >= 1");
    Resampler1D r;
    r.in_size = in_size;
    r.out_size = positions.size();
    const long half = static_cast<long>(std::ceil(2.0 * width));
    r.taps = static_cast<std::size_t>(2 * half);
    r.index.resize(r.out_size * r.taps);
    r.weight.resize(r.out_size * r.taps);
    for (std::size_t i = 0; i < r.out_size; ++i) {
        const double p = positions[i];
        const long base = static_cast<long>(std::floor(p)) - half + 1;
        for (std::size_t k = 0; k < r.taps; ++k) {
            const long t = base + static_cast<long>(k);
            r.index[i * r.taps + k] = wrap(t, in_size);
            r.weight[i * r.taps + k] = keys_kernel((p - static_cast<double>(t)) / width) / width;
        }
    }
    return r;
}

template <class T>
Tensor<T> resample2d(const Tensor<T>& x, const Resampler1D& rows, const Resampler1D& cols) {
    const auto d = image_dims(x);
    if (rows.in_size != d.rows || cols.in_size != d.cols) {
        throw DimensionError("resample2d: resampler extents do not match " + shape_str(x.shape()));
    }
    const std::size_t ho = rows.out_size, wo = cols.out_size;
    // tmp: {C, H, wo} after resampling columns.
    std::vector<T> tmp(d.channels * d.rows * wo);
    for (std::size_t c = 0; c < d.channels; ++c)
        for (std::size_t h = 0; h < d.rows; ++h) {
            const T* src = x.data().data() + (c * d.rows + h) * d.cols;
            T* dst = tmp.data() + (c * d.rows + h) * wo;
            for (std::size_t j = 0; j < wo; ++j) {
                T acc = 0;
                for (std::size_t k = 0; k < cols.taps; ++k)
                    acc += static_cast<T>(cols.weight[j * cols.taps + k]) *
                           src[cols.index[j * cols.taps + k]];
                dst[j] = acc;
            }
        }
    std::vector<T> out(d.channels * ho * wo, T(0));
    for (std::size_t c = 0; c < d.channels; ++c)
        for (std::size_t i = 0; i < ho; ++i) {
            T* dst = out.data() + (c * ho + i) * wo;
            for (std::size_t k = 0; k < rows.taps; ++k) {
                const T w = static_cast<T>(rows.weight[i * rows.taps + k]);
                const T* src = tmp.data() + (c * d.rows + rows.index[i * rows.taps + k]) * wo;
                for (std::size_t j = 0; j < wo; ++j) dst[j] += w * src[j];
            }
        }
    return Tensor<T>::make_result(
        Shape{d.channels, ho, wo}, std::move(out), {x},
        [rows, cols, d, ho, wo](std::span<const T> g, std::span<std::vector<T>*> pg) {
            std::vector<T> gtmp(d.channels * d.rows * wo, T(0));
            for (std::size_t c = 0; c < d.channels; ++c)
                for (std::size_t i = 0; i < ho; ++i) {
                    const T* gi = g.data() + (c * ho + i) * wo;
                    for (std::size_t k = 0; k < rows.taps; ++k) {
                        const T w = static_cast<T>(rows.weight[i * rows.taps + k]);
                        T* dst = gtmp.data() + (c * d.rows + rows.index[i * rows.taps + k]) * wo;
                        for (std::size_t j = 0; j < wo; ++j) dst[j] += w * gi[j];
                    }
                }
            auto& gx = *pg[0];
            for (std::size_t c = 0; c < d.channels; ++c)
                for (std::size_t h = 0; h < d.rows; ++h) {
                    const T* gt = gtmp.data() + (c * d.rows + h) * wo;
                    T* dst = gx.data() + (c * d.rows + h) * d.cols;
                    for (std::size_t j = 0; j < wo; ++j)
                        for (std::size_t k = 0; k < cols.taps; ++k)
                            dst[cols.index[j * cols.taps + k]] +=
                                static_cast<T>(cols.weight[j * cols.taps + k]) * gt[j];
                }
        });
}

template <class T>
Tensor<T> bicubic_upsample(const Tensor<T>& y, std::size_t r, std::size_t phase_r,
                           std::size_t phase_c) {
    const auto d = image_dims(y);
    if (r == 0) throw DimensionError("bicubic_upsample: factor must be >= 1");
    auto positions = [r](std::size_t n, std::size_t phase) {
        std::vector<double> p(n * r);
        for (std::size_t i = 0; i < p.size(); ++i)
            p[i] = (static_cast<double>(i) - static_cast<double>(phase)) / static_cast<double>(r);
        return p;
    };
    return resample2d(y, Resampler1D::bicubic(d.rows, positions(d.rows, phase_r)),
                      Resampler1D::bicubic(d.cols, positions(d.cols, phase_c)));
}

template <class T>
Tensor<T> bicubic_downsample(const Tensor<T>& x, std::size_t r, std::size_t phase_r,
                             std::size_t phase_c) {
    const auto d = image_dims(x);
    if (r == 0 || d.rows % r != 0 || d.cols % r != 0) {
        throw DimensionError("bicubic_downsample: extents " + shape_str(x.shape()) +
                             " not divisible by " + std::to_string(r));
    }
    auto positions = [r](std::size_t n, std::size_t phase) {
        std::vector<double> p(n / r);
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = static_cast<double>(phase + r * i);
        return p;
    };
    const double w = static_cast<double>(r);
    return resample2d(x, Resampler1D::bicubic(d.rows, positions(d.rows, phase_r), w),
                      Resampler1D::bicubic(d.cols, positions(d.cols, phase_c), w));
}

#define SEI_INSTANTIATE_OPS(T)                                                                 \
    template ImageDims image_dims(const Tensor<T>&);                                           \
    template Tensor<T> conv2d_periodic(const Tensor<T>&, const Tensor<T>&, ConvPath);          \
    template Tensor<T> flip_kernel(const Tensor<T>&);                                          \
    template Tensor<T> conv2d_layer(const Tensor<T>&, const Tensor<T>&, const Tensor<T>&);     \
    template Tensor<T> subsample(const Tensor<T>&, std::size_t, std::size_t, std::size_t);     \
    template Tensor<T> upsample_zero(const Tensor<T>&, std::size_t, std::size_t, std::size_t,  \
                                     std::size_t, std::size_t);                                \
    template Tensor<T> cyclic_shift(const Tensor<T>&, long, long);                             \
    template Tensor<T> crop(const Tensor<T>&, std::size_t, std::size_t, std::size_t,           \
                            std::size_t);                                                      \
    template Tensor<T> resample2d(const Tensor<T>&, const Resampler1D&, const Resampler1D&);   \
    template Tensor<T> bicubic_upsample(const Tensor<T>&, std::size_t, std::size_t,            \
                                        std::size_t);                                          \
    template Tensor<T> bicubic_downsample(const Tensor<T>&, std::size_t, std::size_t,          \
                                          std::size_t);

SEI_INSTANTIATE_OPS(float)
SEI_INSTANTIATE_OPS(double)

}  // namespace sei
