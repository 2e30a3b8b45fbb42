#include "warprl/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace warprl::nn {

void adam_step(std::span<double> params, std::span<const double> grad,
               AdamState& state, const AdamConfig& cfg) {
    if (params.size() != grad.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: shape mismatch between params, grad, and moments");

    double sq = 0.0;
    for (double g : grad) {
        if (!std::isfinite(g)) throw std::runtime_error("adam_step: non-finite gradient");
        sq += g * g;
    }
    double scale = 1.0;
    if (cfg.clip_norm > 0.0) {
        double norm = std::sqrt(sq);
        if (norm > cfg.clip_norm) scale = cfg.clip_norm / norm;
    }

    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (size_t i = 0; i < params.size(); ++i) {
        const double g = grad[i] * scale;
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
}

}  // namespace warprl::nn
