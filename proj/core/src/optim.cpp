#include "sei/optim.hpp"

#include <cmath>

#include "sei/error.hpp"

namespace sei {

namespace {

template <class T>
void check_grads(const std::vector<Tensor<T>>& params, const std::vector<std::vector<T>>& grads,
                 const char* who) {
    if (params.size() != grads.size()) {
        throw DimensionError(std::string(who) + ": " + std::to_string(params.size()) +
                             " parameters but " + std::to_string(grads.size()) + " gradients");
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        if (params[i].numel() != grads[i].size()) {
            throw DimensionError(std::string(who) + ": gradient " + std::to_string(i) +
                                 " has " + std::to_string(grads[i].size()) +
                                 " entries for parameter of shape " +
                                 shape_str(params[i].shape()));
        }
    }
}

}  // namespace

template <class T>
void adam_step(std::vector<Tensor<T>>& params, const std::vector<std::vector<T>>& grads,
               AdamState<T>& state, const AdamOptions& opts) {
    check_grads(params, grads, "adam_step");
    if (state.m.empty()) {
        for (const auto& p : params) {
            state.m.emplace_back(p.numel(), T(0));
            state.v.emplace_back(p.numel(), T(0));
        }
    }
    if (state.m.size() != params.size()) {
        throw DimensionError("adam_step: optimizer state does not match parameter list");
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(opts.beta1, t);
    const double c2 = 1.0 - std::pow(opts.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto p = params[i].mutable_data();
        auto& m = state.m[i];
        auto& v = state.v[i];
        if (m.size() != p.size()) throw DimensionError("adam_step: moment buffer size mismatch");
        for (std::size_t j = 0; j < p.size(); ++j) {
            const double g = static_cast<double>(grads[i][j]);
            const double mj = opts.beta1 * static_cast<double>(m[j]) + (1.0 - opts.beta1) * g;
            const double vj = opts.beta2 * static_cast<double>(v[j]) + (1.0 - opts.beta2) * g * g;
            m[j] = static_cast<T>(mj);
            v[j] = static_cast<T>(vj);
            const double update = opts.lr * (mj / c1) / (std::sqrt(vj / c2) + opts.eps);
            p[j] = static_cast<T>(static_cast<double>(p[j]) - update);
        }
    }
}

template <class T>
void sgd_step(std::vector<Tensor<T>>& params, const std::vector<std::vector<T>>& grads, double lr) {
    check_grads(params, grads, "sgd_step");
    for (std::size_t i = 0; i < params.size(); ++i) {
        auto p = params[i].mutable_data();
        for (std::size_t j = 0; j < p.size(); ++j) {
            p[j] = static_cast<T>(static_cast<double>(p[j]) - lr * static_cast<double>(grads[i][j]));
        }
    }
}

template void adam_step(std::vector<Tensor<float>>&, const std::vector<std::vector<float>>&,
                        AdamState<float>&, const AdamOptions&);
template void adam_step(std::vector<Tensor<double>>&, const std::vector<std::vector<double>>&,
                        AdamState<double>&, const AdamOptions&);
template void sgd_step(std::vector<Tensor<float>>&, const std::vector<std::vector<float>>&, double);
template void sgd_step(std::vector<Tensor<double>>&, const std::vector<std::vector<double>>&,
                       double);

}  // namespace sei
