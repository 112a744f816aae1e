#pragma once

// First-order optimizers acting in place on leaf parameter tensors.

#include <cstdint>
#include <vector>

#include "sei/tensor.hpp"

namespace sei {

struct AdamOptions {
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// First and second moment estimates, one pair of buffers per parameter.
template <class T>
struct AdamState {
    std::uint64_t step = 0;
    std::vector<std::vector<T>> m;
    std::vector<std::vector<T>> v;
};

/// Bias-corrected Adam. `grads[i]` must match `params[i]` in size; moments are
/// allocated on the first call.
template <class T>
void adam_step(std::vector<Tensor<T>>& params, const std::vector<std::vector<T>>& grads,
               AdamState<T>& state, const AdamOptions& opts);

/// params -= lr * grads.
template <class T>
void sgd_step(std::vector<Tensor<T>>& params, const std::vector<std::vector<T>>& grads, double lr);

}  // namespace sei
