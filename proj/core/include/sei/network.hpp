#pragma once

// Small residual CNN used as the reconstruction function:
//   u = bicubic_upsample_r(y);  out = u + stack(u)
// where stack is conv-ReLU-...-conv with periodic padding.

#include <string>
#include <utility>
#include <vector>

#include "sei/losses.hpp"
#include "sei/rng.hpp"

namespace sei {

struct NetworkConfig {
    std::size_t channels = 32;
    std::size_t depth = 6;  // number of conv layers
    std::size_t kernel = 3;
    bool residual = true;
    std::size_t upscale = 1;
    std::size_t image_channels = 1;
    bool zero_last = true;  // start as the (upsampled) identity

    void validate() const;
    /// Closed-form parameter count (weights + biases).
    std::size_t parameter_count() const;
    bool operator==(const NetworkConfig&) const = default;
};

template <class T>
class Network final : public Reconstructor<T> {
   public:
    /// Weights ~ U(-b, b) with b = sqrt(6 / fan_in); biases zero.
    Network(const NetworkConfig& cfg, Rng& rng);
    /// Wraps existing parameters (checkpoint restore). Order as `named_parameters`.
    Network(const NetworkConfig& cfg, std::vector<Tensor<T>> params);

    Tensor<T> operator()(const Tensor<T>& y) const override;
    std::size_t upscale() const override { return cfg_.upscale; }

    const NetworkConfig& config() const { return cfg_; }
    std::vector<Tensor<T>>& parameters() { return params_; }
    const std::vector<Tensor<T>>& parameters() const { return params_; }
    /// ("conv0.weight", w0), ("conv0.bias", b0), ...
    std::vector<std::pair<std::string, Tensor<T>>> named_parameters() const;
    std::size_t parameter_count() const;

   private:
    NetworkConfig cfg_;
    std::vector<Tensor<T>> params_;
};

/// Runs the network on `y` without recording a graph.
template <class T>
Tensor<T> reconstruct(const Network<T>& net, const Tensor<T>& y);

}  // namespace sei
