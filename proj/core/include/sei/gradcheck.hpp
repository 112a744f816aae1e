#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "sei/tensor.hpp"

namespace sei {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t worst_index = 0;
    std::vector<double> analytic;
    std::vector<double> numeric;
};

/// Compares the reverse-mode gradient of a scalar function against central
/// differences. The error for coordinate i is
///   |analytic_i - numeric_i| / (|analytic_i| + floor).
/// `fn` must rebuild its graph from the leaf it is given on every call.
inline GradCheckResult finite_diff_check(
    const std::function<Tensor<double>(const Tensor<double>&)>& fn, const Tensor<double>& x,
    double eps = 1e-6, double floor = 1e-6) {
    GradCheckResult res;
    Tensor<double> leaf = x.clone(true);
    auto grads = backward(fn(leaf));
    auto g = grads.of(leaf);
    res.analytic.assign(g.values().begin(), g.values().end());
    res.numeric.resize(x.numel());

    Tensor<double> probe = x.clone(false);
    for (std::size_t i = 0; i < x.numel(); ++i) {
        const double orig = probe[i];
        probe.mutable_data()[i] = orig + eps;
        const double fp = fn(probe).item();
        probe.mutable_data()[i] = orig - eps;
        const double fm = fn(probe).item();
        probe.mutable_data()[i] = orig;
        res.numeric[i] = (fp - fm) / (2.0 * eps);
        const double err =
            std::abs(res.analytic[i] - res.numeric[i]) / (std::abs(res.analytic[i]) + floor);
        if (err > res.max_rel_error) {
            res.max_rel_error = err;
            res.worst_index = i;
        }
    }
    return res;
}

}  // namespace sei
