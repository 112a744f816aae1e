#include "sei/operators.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "sei/error.hpp"

namespace sei {

std::string to_string(PsfKind kind) {
    switch (kind) {
        case PsfKind::Delta:
            return "delta";
        case PsfKind::Gaussian:
            return "gaussian";
        case PsfKind::Box:
            return "box";
        case PsfKind::Bicubic:
            return "bicubic";
    }
    return "unknown";
}

template <class T>
Tensor<T> Psf::kernel() const {
    return Tensor<T>(Shape{size, size}, std::vector<T>(taps.begin(), taps.end()));
}

double Psf::sum() const {
    double s = 0.0;
    for (double t : taps) s += t;
    return s;
}

std::string Psf::spec() const {
    std::ostringstream os;
    os << to_string(kind);
    if (kind != PsfKind::Delta) os << ':' << std::setprecision(17) << parameter;
    return os.str();
}

Psf delta_psf() { return Psf{}; }

Psf gaussian_psf(double sigma, std::size_t support) {
    if (!(sigma > 0.0)) throw ValidationError("gaussian_psf: sigma must be positive");
    if (support == 0) support = 2 * static_cast<std::size_t>(std::ceil(3.0 * sigma)) + 1;
    if (support % 2 == 0) throw ValidationError("gaussian_psf: support must be odd");
    Psf p;
    p.kind = PsfKind::Gaussian;
    p.parameter = sigma;
    p.size = support;
    p.taps.assign(support * support, 0.0);
    const long c = static_cast<long>(support / 2);
    double z = 0.0;
    for (std::size_t i = 0; i < support; ++i)
        for (std::size_t j = 0; j < support; ++j) {
            const double di = static_cast<double>(static_cast<long>(i) - c);
            const double dj = static_cast<double>(static_cast<long>(j) - c);
            const double v = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
            p.taps[i * support + j] = v;
            z += v;
        }
    for (double& t : p.taps) t /= z;
    return p;
}

Psf box_psf(int radius) {
    if (radius < 1) throw ValidationError("box_psf: radius must be >= 1");
    Psf p;
    p.kind = PsfKind::Box;
    p.parameter = radius;
    p.size = static_cast<std::size_t>(2 * radius + 1);
    p.taps.assign(p.size * p.size, 1.0 / static_cast<double>(p.size * p.size));
    return p;
}

Psf bicubic_psf(int r) {
    if (r < 1) throw ValidationError("bicubic_psf: factor must be >= 1");
    Psf p;
    p.kind = PsfKind::Bicubic;
    p.parameter = r;
    p.size = static_cast<std::size_t>(4 * r - 1);
    std::vector<double> line(p.size);
    const long c = 2 * r - 1;
    for (std::size_t i = 0; i < p.size; ++i)
        line[i] = keys_kernel(static_cast<double>(static_cast<long>(i) - c) / r) / r;
    p.taps.resize(p.size * p.size);
    for (std::size_t i = 0; i < p.size; ++i)
        for (std::size_t j = 0; j < p.size; ++j) p.taps[i * p.size + j] = line[i] * line[j];
    return p;
}

Psf parse_psf(const std::string& spec) {
    if (spec == "delta") return delta_psf();
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw ValidationError("bad kernel spec '" + spec +
                              "' (expected gaussian:<sigma>, box:<radius>, bicubic:<r> or delta)");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    double value = 0.0;
    try {
        std::size_t used = 0;
        value = std::stod(arg, &used);
        if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
        throw ValidationError("bad kernel parameter in '" + spec + "'");
    }
    auto as_int = [&](const char* what) {
        if (value != std::floor(value)) {
            throw ValidationError(std::string(what) + " must be an integer in '" + spec + "'");
        }
        return static_cast<int>(value);
    };
    if (kind == "gaussian") return gaussian_psf(value);
    if (kind == "box") return box_psf(as_int("box radius"));
    if (kind == "bicubic") return bicubic_psf(as_int("bicubic factor"));
    throw ValidationError("unknown kernel kind '" + kind + "'");
}

std::string psf_to_text(const Psf& psf) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < psf.size; ++i) {
        for (std::size_t j = 0; j < psf.size; ++j) {
            if (j) os << ' ';
            os << psf.taps[i * psf.size + j];
        }
        os << '\n';
    }
    return os.str();
}

ForwardModel ForwardModel::deblurring(Psf psf, double sigma) {
    ForwardModel m;
    m.psf = std::move(psf);
    m.sigma = sigma;
    m.validate();
    return m;
}

ForwardModel ForwardModel::super_resolution(int r, double sigma) {
    ForwardModel m;
    m.psf = bicubic_psf(r);
    m.r = static_cast<std::size_t>(r);
    m.sigma = sigma;
    m.mode = ForwardMode::BicubicDownsample;
    m.validate();
    return m;
}

void ForwardModel::validate() const {
    if (r < 1) throw ValidationError("forward model: r must be >= 1");
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ValidationError("forward model: sigma must be finite and >= 0");
    }
    if (phase_r >= r || phase_c >= r) throw ValidationError("forward model: phase must lie in [0, r)");
    if (psf.size % 2 == 0 || psf.taps.size() != psf.size * psf.size) {
        throw ValidationError("forward model: malformed psf");
    }
    if (mode == ForwardMode::BicubicDownsample) {
        if (r < 2 || r > 4) throw ValidationError("forward model: bicubic downsampling needs r in {2,3,4}");
        if (psf.kind != PsfKind::Bicubic || static_cast<std::size_t>(psf.parameter) != r) {
            throw ValidationError("forward model: bicubic mode needs a bicubic psf of factor r");
        }
    }
}

std::size_t ForwardModel::measured_rows(std::size_t rows) const { return rows / r; }
std::size_t ForwardModel::measured_cols(std::size_t cols) const { return cols / r; }

template <class T>
Tensor<T> apply_linear(const ForwardModel& model, const Tensor<T>& x) {
    const auto d = image_dims(x);
    if (d.rows % model.r != 0 || d.cols % model.r != 0) {
        throw DimensionError("forward operator: extents " + shape_str(x.shape()) +
                             " not divisible by r=" + std::to_string(model.r));
    }
    auto blurred = model.psf.kind == PsfKind::Delta ? x : conv2d_periodic(x, model.psf.kernel<T>());
    if (model.r == 1) return blurred;
    return subsample(blurred, model.r, model.phase_r, model.phase_c);
}

template <class T>
Tensor<T> apply_forward(const ForwardModel& model, const Tensor<T>& x, Rng* rng) {
    auto y = apply_linear(model, x);
    if (model.sigma > 0.0) {
        if (!rng) throw ValidationError("apply_forward: sigma > 0 requires a random stream");
        return add_gaussian_noise(y, model.sigma, *rng);
    }
    return y;
}

template <class T>
Tensor<T> apply_adjoint(const ForwardModel& model, const Tensor<T>& y) {
    const auto d = image_dims(y);
    auto up = model.r == 1 ? y
                           : upsample_zero(y, model.r, d.rows * model.r, d.cols * model.r,
                                           model.phase_r, model.phase_c);
    if (model.psf.kind == PsfKind::Delta) return up;
    return conv2d_periodic(up, flip_kernel(model.psf.kernel<T>()));
}

template <class T>
Tensor<T> add_gaussian_noise(const Tensor<T>& x, double sigma, Rng& rng) {
    if (!(sigma >= 0.0)) throw ValidationError("add_gaussian_noise: sigma must be >= 0");
    if (sigma == 0.0) return x;
    std::vector<T> noise(x.numel());
    for (auto& n : noise) n = static_cast<T>(sigma * rng.normal());
    return add(x, Tensor<T>(x.shape(), std::move(noise)));
}

#define SEI_INSTANTIATE_OPERATORS(T)                                                  \
    template Tensor<T> Psf::kernel<T>() const;                                        \
    template Tensor<T> apply_linear(const ForwardModel&, const Tensor<T>&);           \
    template Tensor<T> apply_forward(const ForwardModel&, const Tensor<T>&, Rng*);    \
    template Tensor<T> apply_adjoint(const ForwardModel&, const Tensor<T>&);          \
    template Tensor<T> add_gaussian_noise(const Tensor<T>&, double, Rng&);

SEI_INSTANTIATE_OPERATORS(float)
SEI_INSTANTIATE_OPERATORS(double)

}  // namespace sei
