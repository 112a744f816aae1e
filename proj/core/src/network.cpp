#include "sei/network.hpp"

#include <cmath>

#include "sei/error.hpp"
#include "sei/ops.hpp"

namespace sei {

namespace {

struct LayerShape {
    std::size_t in;
    std::size_t out;
};

LayerShape layer_shape(const NetworkConfig& cfg, std::size_t layer) {
    const auto c = cfg.channels;
    const auto img = cfg.image_channels;
    return {layer == 0 ? img : c, layer + 1 == cfg.depth ? img : c};
}

}  // namespace

void NetworkConfig::validate() const {
    if (depth < 1) throw ValidationError("network: depth must be >= 1");
    if (channels < 1) throw ValidationError("network: channels must be >= 1");
    if (kernel < 1 || kernel % 2 == 0) throw ValidationError("network: kernel must be odd");
    if (upscale < 1) throw ValidationError("network: upscale must be >= 1");
    if (image_channels < 1) throw ValidationError("network: image_channels must be >= 1");
}

std::size_t NetworkConfig::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < depth; ++l) {
        const auto s = layer_shape(*this, l);
        n += s.out * s.in * kernel * kernel + s.out;
    }
    return n;
}

template <class T>
Network<T>::Network(const NetworkConfig& cfg, Rng& rng) : cfg_(cfg) {
    cfg_.validate();
    for (std::size_t l = 0; l < cfg_.depth; ++l) {
        const auto s = layer_shape(cfg_, l);
        Shape wshape{s.out, s.in, cfg_.kernel, cfg_.kernel};
        std::vector<T> w(shape_numel(wshape), T(0));
        const bool last = l + 1 == cfg_.depth;
        if (!(last && cfg_.zero_last)) {
            const double bound = std::sqrt(6.0 / static_cast<double>(s.in * cfg_.kernel * cfg_.kernel));
            for (auto& v : w) v = static_cast<T>(rng.uniform(-bound, bound));
        }
        params_.emplace_back(std::move(wshape), std::move(w), true);
        params_.push_back(Tensor<T>::zeros({s.out}, true));
    }
}

template <class T>
Network<T>::Network(const NetworkConfig& cfg, std::vector<Tensor<T>> params)
    : cfg_(cfg), params_(std::move(params)) {
    cfg_.validate();
    if (params_.size() != 2 * cfg_.depth) {
        throw ValidationError("network: expected " + std::to_string(2 * cfg_.depth) +
                              " parameter tensors, got " + std::to_string(params_.size()));
    }
    for (std::size_t l = 0; l < cfg_.depth; ++l) {
        const auto s = layer_shape(cfg_, l);
        const Shape wshape{s.out, s.in, cfg_.kernel, cfg_.kernel};
        if (params_[2 * l].shape() != wshape || params_[2 * l + 1].shape() != Shape{s.out}) {
            throw DimensionError("network: layer " + std::to_string(l) + " has shapes " +
                                 shape_str(params_[2 * l].shape()) + ", " +
                                 shape_str(params_[2 * l + 1].shape()) + "; expected " +
                                 shape_str(wshape) + ", [" + std::to_string(s.out) + "]");
        }
        for (std::size_t k = 0; k < 2; ++k) {
            auto& p = params_[2 * l + k];
            if (!p.is_leaf()) p = p.clone(true);
            p.set_requires_grad(true);
        }
    }
}

template <class T>
Tensor<T> Network<T>::operator()(const Tensor<T>& y) const {
    const auto d = image_dims(y);
    if (d.channels != cfg_.image_channels) {
        throw DimensionError("network: expected " + std::to_string(cfg_.image_channels) +
                             " channels, got " + std::to_string(d.channels));
    }
    if (d.rows < cfg_.kernel || d.cols < cfg_.kernel) {
        throw DimensionError("network: input " + shape_str(y.shape()) + " smaller than kernel " +
                             std::to_string(cfg_.kernel));
    }
    auto u = cfg_.upscale == 1 ? y : bicubic_upsample(y, cfg_.upscale);
    auto h = u;
    for (std::size_t l = 0; l < cfg_.depth; ++l) {
        h = conv2d_layer(h, params_[2 * l], params_[2 * l + 1]);
        if (l + 1 < cfg_.depth) h = relu(h);
    }
    return cfg_.residual ? add(u, h) : h;
}

template <class T>
std::vector<std::pair<std::string, Tensor<T>>> Network<T>::named_parameters() const {
    std::vector<std::pair<std::string, Tensor<T>>> out;
    for (std::size_t l = 0; l < cfg_.depth; ++l) {
        const auto prefix = "conv" + std::to_string(l);
        out.emplace_back(prefix + ".weight", params_[2 * l]);
        out.emplace_back(prefix + ".bias", params_[2 * l + 1]);
    }
    return out;
}

template <class T>
std::size_t Network<T>::parameter_count() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.numel();
    return n;
}

template <class T>
Tensor<T> reconstruct(const Network<T>& net, const Tensor<T>& y) {
    NoGradGuard guard;
    return net(y);
}

template class Network<float>;
template class Network<double>;
template Tensor<float> reconstruct(const Network<float>&, const Tensor<float>&);
template Tensor<double> reconstruct(const Network<double>&, const Tensor<double>&);

}  // namespace sei
