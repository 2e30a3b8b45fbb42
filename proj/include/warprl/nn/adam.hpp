#pragma once
#include <span>
#include <vector>

namespace warprl::nn {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double clip_norm = 10.0;  ///< global-norm gradient clip; <= 0 disables
};

/// Adaptive-moment optimizer state; accumulators mirror the parameter layout.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long step = 0;

    explicit AdamState(size_t n) : m(n, 0.0), v(n, 0.0) {}
    AdamState() = default;
};

/// One bias-corrected update, applied in place. Clips the gradient by global
/// norm first. Throws on non-finite gradient entries.
void adam_step(std::span<double> params, std::span<const double> grad,
               AdamState& state, const AdamConfig& cfg);

}  // namespace warprl::nn
